"""
Rectangular numeric datasets with an explicit missingness mask.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from core.exceptions import ConfigError, DataError

logger = logging.getLogger(__name__)

# Masked-out cells hold this value; the mask is authoritative.
MISSING_SENTINEL = np.nan


def _frozen(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    n x p real-valued data plus an n x p boolean mask (True = observed).

    Arrays are copied on construction and made read-only, so a Dataset can be
    shared between workers without copying.
    """

    columns: tuple
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        columns = tuple(str(c) for c in self.columns)
        if len(set(columns)) != len(columns):
            raise ConfigError(f"Column names must be unique: {columns}")

        values = np.array(self.values, dtype=float, copy=True)
        mask = np.array(self.mask, dtype=bool, copy=True)
        if values.ndim != 2:
            raise DataError(f"Dataset values must be two-dimensional, got shape {values.shape}")
        if mask.shape != values.shape:
            raise DataError(f"Mask shape {mask.shape} does not match values shape {values.shape}")
        if values.shape[1] != len(columns):
            raise DataError(f"{len(columns)} column names for {values.shape[1]} columns")
        if not np.all(np.isfinite(values[mask])):
            raise DataError("Observed cells must hold finite values")

        values[~mask] = MISSING_SENTINEL

        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "mask", _frozen(mask))

    @classmethod
    def from_arrays(cls, columns: Sequence[str], values, mask=None) -> "Dataset":
        """Build a dataset; with no mask, non-NaN cells count as observed."""
        values = np.asarray(values, dtype=float)
        if mask is None:
            mask = ~np.isnan(values)
        return cls(tuple(columns), values, mask)

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "Dataset":
        """Build a dataset from a DataFrame; NaN cells are missing."""
        try:
            values = df.to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise DataError(f"Dataset columns must be numeric: {e}") from e
        return cls(tuple(df.columns), values, ~np.isnan(values))

    def to_frame(self) -> pd.DataFrame:
        """Return a DataFrame copy with NaN in missing cells."""
        return pd.DataFrame(np.array(self.values), columns=list(self.columns))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise ConfigError(f"Unknown column '{name}'; available: {list(self.columns)}") from None

    def has_column(self, name: str) -> bool:
        return name in self.columns

    def observed(self, name: str) -> np.ndarray:
        """Boolean vector of observed rows for one column."""
        return self.mask[:, self.column_index(name)]

    def column(self, name: str) -> np.ndarray:
        """
        Values of one column. Missing positions carry the sentinel;
        callers must consult observed() before reading them.
        """
        return self.values[:, self.column_index(name)]

    def matrix(self, names: Sequence[str], rows=None) -> np.ndarray:
        """Values for several columns (and optionally a row selection) as a new array."""
        idx = [self.column_index(n) for n in names]
        block = self.values[:, idx] if rows is None else self.values[rows][:, idx]
        return np.array(block)

    def complete_rows(self, names: Sequence[str]) -> np.ndarray:
        """Rows where every named column is observed."""
        idx = [self.column_index(n) for n in names]
        return self.mask[:, idx].all(axis=1)

    def missing_count(self, name: str) -> int:
        return int((~self.observed(name)).sum())

    def take(self, rows) -> "Dataset":
        """New dataset of the given rows (boolean mask or index array, repeats allowed)."""
        return Dataset(self.columns, self.values[rows], self.mask[rows])

    def with_filled(self, name: str, rows: np.ndarray, new_values: np.ndarray) -> "Dataset":
        """
        Copy with the given missing cells of one column filled and marked observed.

        Raises:
            DataError: if any targeted cell is already observed
        """
        j = self.column_index(name)
        rows = np.asarray(rows)
        if np.any(self.mask[rows, j]):
            raise DataError(f"Refusing to overwrite observed cells of column '{name}'")
        values = np.array(self.values)
        mask = np.array(self.mask)
        values[rows, j] = new_values
        mask[rows, j] = True
        return Dataset(self.columns, values, mask)

    def describe(self, name="Dataset"):
        """Log the shape and missingness of the dataset."""
        missing = {c: int(k) for c, k in zip(self.columns, (~self.mask).sum(axis=0)) if k}
        logger.info(f"{name} shape: {self.shape}")
        logger.info(f"{name} columns: {', '.join(self.columns)}")
        logger.info(f"{name} missing cells: {missing if missing else 'none'}")
