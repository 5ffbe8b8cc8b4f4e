"""
Module for extracting incomplete numeric datasets from CSV files.
"""
import os
import logging

import pandas as pd

from core.dataset import Dataset
from core.exceptions import DataError

logger = logging.getLogger(__name__)


def extract_dataset_from_csv(file_path):
    """
    Extract a dataset from a CSV file with a header row.

    Only empty cells count as missing; any other non-numeric text is an error.

    Args:
        file_path (str): Path to the CSV file

    Returns:
        Dataset: Values and missingness mask

    Raises:
        DataError: if the file is absent, empty or not numeric
    """
    logger.info(f"Extracting dataset from CSV file: {file_path}")

    if not os.path.exists(file_path):
        raise DataError(f"CSV file not found: {file_path}")

    try:
        # %.17g text must read back to the same doubles
        df = pd.read_csv(file_path, na_values=[""], keep_default_na=False, float_precision="round_trip")
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        logger.error(f"Error reading CSV file {file_path}: {e}")
        raise DataError(f"Cannot read CSV file {file_path}: {e}") from e

    if df.empty:
        raise DataError(f"CSV file has no data rows: {file_path}")

    data = Dataset.from_frame(df)
    data.describe(name="CSV data")
    logger.info(f"Successfully extracted {data.n_rows} rows from CSV")
    return data
