"""
Module for exporting result records and estimate grids to CSV files.
"""
import os
import logging

import pandas as pd

import config
from core.grid import EstimateGrid
from extractors.grid_extractor import DIRECT_REP
from utils import ensure_directory

logger = logging.getLogger(__name__)


def export_records_to_csv(records, columns, file_path):
    """
    Export result records to a CSV file with a fixed column order.

    Floats are written with 17 significant digits and infinite degrees of
    freedom as "inf", independent of locale.

    Args:
        records (list of dict): One dict per output row
        columns (list of str): Column order
        file_path (str): Path to the output CSV file

    Returns:
        str: Path to the created CSV file
    """
    ensure_directory(os.path.dirname(file_path))
    df = pd.DataFrame(list(records), columns=list(columns))
    df.to_csv(file_path, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Successfully exported {len(df)} rows to CSV: {file_path}")
    return file_path


def export_grid_to_csv(grid: EstimateGrid, file_path):
    """
    Write an estimate grid in the format read by extract_grid_from_csv.

    Args:
        grid (EstimateGrid): Grid to write
        file_path (str): Path to the output file

    Returns:
        str: Path to the created file
    """
    rows = []
    for g in range(grid.n_groups):
        if grid.direct_estimates is not None:
            direct_var = None if grid.direct_variances is None else grid.direct_variances[g]
            rows.append((g, DIRECT_REP, grid.direct_estimates[g], direct_var))
        for r in range(grid.n_reps):
            within = None if grid.within_variances is None else grid.within_variances[g, r]
            rows.append((g, r, grid.estimates[g, r], within))

    df = pd.DataFrame(rows, columns=["group", "rep", "estimate", "within_variance"])
    if df["within_variance"].isna().all():
        df = df.drop(columns="within_variance")

    ensure_directory(os.path.dirname(file_path))
    with open(file_path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# orientation: {grid.orientation.value}\n")
        df.to_csv(f, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Successfully exported a {grid.n_groups}x{grid.n_reps} grid to CSV: {file_path}")
    return file_path
