"""
Module for extracting estimate grids written by `analyze --grid-out` or by
an imputer releasing bootstrap-clustered imputations.

Format: a first line "# orientation: <value>", then CSV columns
group,rep,estimate[,within_variance]. Rows with rep = -1 carry the direct
estimate of an imputation (and its analytic variance).
"""
import os
import re
import logging

import numpy as np
import pandas as pd

from core.exceptions import DataError
from core.grid import EstimateGrid, Orientation

logger = logging.getLogger(__name__)

ORIENTATION_PATTERN = re.compile(r"^#\s*orientation\s*:\s*(\S+)\s*$")
GRID_COLUMNS = ["group", "rep", "estimate"]
DIRECT_REP = -1


def _read_orientation(file_path):
    with open(file_path, "r", encoding="utf-8") as f:
        first_line = f.readline()
    match = ORIENTATION_PATTERN.match(first_line)
    if match is None:
        raise DataError(f"Grid file {file_path} must start with '# orientation: <value>'")
    return Orientation.parse(match.group(1))


def _pivot(rows, column, name):
    table = rows.pivot(index="group", columns="rep", values=column)
    n_groups, n_reps = table.shape
    if list(table.index) != list(range(n_groups)) or list(table.columns) != list(range(n_reps)):
        raise DataError(f"Grid {name} must be indexed by groups 0..G-1 and reps 0..R-1")
    values = table.to_numpy(dtype=float)
    if np.isnan(values).any():
        raise DataError(f"Grid {name} has empty cells; every (group, rep) pair needs a value")
    return values


def extract_grid_from_csv(file_path):
    """
    Extract an EstimateGrid from a grid CSV file.

    Args:
        file_path (str): Path to the grid file

    Returns:
        EstimateGrid: Grid with its declared orientation

    Raises:
        DataError: malformed file or incomplete grid
        ConfigError: unknown orientation
    """
    logger.info(f"Extracting estimate grid from CSV file: {file_path}")
    if not os.path.exists(file_path):
        raise DataError(f"Grid file not found: {file_path}")

    orientation = _read_orientation(file_path)
    try:
        df = pd.read_csv(
            file_path, skiprows=1, na_values=[""], keep_default_na=False, float_precision="round_trip"
        )
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise DataError(f"Cannot read grid file {file_path}: {e}") from e

    missing = [c for c in GRID_COLUMNS if c not in df.columns]
    if missing or df.empty:
        raise DataError(f"Grid file {file_path} needs rows with columns {GRID_COLUMNS}; missing {missing}")
    if df.duplicated(subset=["group", "rep"]).any():
        raise DataError(f"Grid file {file_path} repeats a (group, rep) pair")

    try:
        df["group"] = df["group"].astype(int)
        df["rep"] = df["rep"].astype(int)
        for column in ("estimate", "within_variance"):
            if column in df.columns:
                df[column] = df[column].astype(float)
    except (TypeError, ValueError) as e:
        raise DataError(f"Grid file {file_path} has non-numeric entries: {e}") from e

    direct_rows = df[df["rep"] == DIRECT_REP]
    cells = df[df["rep"] != DIRECT_REP]
    has_within = "within_variance" in cells.columns and cells["within_variance"].notna().any()

    estimates = _pivot(cells, "estimate", "estimates")
    within = _pivot(cells, "within_variance", "within variances") if has_within else None

    direct = direct_var = None
    if not direct_rows.empty:
        direct_rows = direct_rows.sort_values("group")
        if list(direct_rows["group"]) != list(range(estimates.shape[0])):
            raise DataError("Direct-estimate rows (rep = -1) must cover every group exactly once")
        direct = direct_rows["estimate"].to_numpy(dtype=float)
        if "within_variance" in direct_rows.columns and direct_rows["within_variance"].notna().all():
            direct_var = direct_rows["within_variance"].to_numpy(dtype=float)

    grid = EstimateGrid(estimates, orientation, within, direct, direct_var)
    logger.info(f"Extracted a {grid.n_groups}x{grid.n_reps} {orientation.value} grid")
    return grid
