"""
Module for loading simulation summaries to a SQLite database.
"""
import logging

import pandas as pd
from sqlalchemy import create_engine, text
from sqlalchemy.exc import SQLAlchemyError

from core.exceptions import ConfigError

logger = logging.getLogger(__name__)

SUMMARY_TABLE = "simulation_summaries"


def load_summaries_to_sqlite(records, db_uri, table_name=SUMMARY_TABLE):
    """
    Append summary records to a database table, creating it on first use.

    Args:
        records (list of dict): Rows to append
        db_uri (str): SQLAlchemy database URI, e.g. sqlite:///studies.db
        table_name (str): Table to append to

    Returns:
        int: Number of rows in the table after loading

    Raises:
        ConfigError: if the database cannot be opened or written
    """
    logger.info(f"Loading {len(records)} summaries to table: {table_name}")
    df = pd.DataFrame(list(records))
    if df.empty:
        raise ConfigError("Cannot load an empty set of summaries")

    try:
        engine = create_engine(db_uri)
        df.to_sql(name=table_name, con=engine, if_exists="append", index=False)

        # Verify the data was loaded by counting rows
        with engine.connect() as connection:
            row_count = connection.execute(text(f"SELECT COUNT(*) FROM {table_name}")).scalar()
    except (SQLAlchemyError, ValueError) as e:
        logger.error(f"Error loading summaries to {db_uri}: {e}")
        raise ConfigError(f"Cannot write summaries to {db_uri}: {e}") from e

    logger.info(f"Table '{table_name}' now holds {row_count} rows")
    return row_count
