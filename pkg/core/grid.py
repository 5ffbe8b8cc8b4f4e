"""
Estimate grids: the interchange object between resampling engines and poolers.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from core.exceptions import ConfigError, DataError, OrientationError


class Orientation(str, Enum):
    """Which resampling loop indexes the rows of a grid."""

    IMPUTATION_OUTER = "imputation_outer"
    BOOTSTRAP_OUTER = "bootstrap_outer"

    @classmethod
    def parse(cls, value):
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(
                f"Unknown orientation '{value}'; expected one of {[o.value for o in cls]}"
            ) from None


def _readonly(array, name, shape=None):
    if array is None:
        return None
    array = np.array(array, dtype=float, copy=True)
    if shape is not None and array.shape != shape:
        raise DataError(f"{name} has shape {array.shape}, expected {shape}")
    if not np.all(np.isfinite(array)):
        raise DataError(f"{name} must contain only finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class EstimateGrid:
    """
    G x M matrix of point estimates.

    For imputation_outer grids (MI then bootstrap) row g holds the B bootstrap
    estimates of imputation g and ``direct_estimates`` the M estimates fitted to
    the imputed datasets themselves. For bootstrap_outer grids (bootstrap then
    MI) row g holds the M imputation estimates of bootstrap sample g.
    """

    estimates: np.ndarray
    orientation: Orientation
    within_variances: Optional[np.ndarray] = None
    direct_estimates: Optional[np.ndarray] = None
    direct_variances: Optional[np.ndarray] = None

    def __post_init__(self):
        estimates = np.array(self.estimates, dtype=float, copy=True)
        if estimates.ndim != 2 or estimates.shape[0] < 1 or estimates.shape[1] < 1:
            raise DataError(f"Estimate grid must be a non-empty matrix, got shape {estimates.shape}")
        orientation = Orientation.parse(self.orientation)

        estimates = _readonly(estimates, "estimates")
        within = _readonly(self.within_variances, "within_variances", estimates.shape)
        direct = _readonly(self.direct_estimates, "direct_estimates", (estimates.shape[0],))
        direct_var = _readonly(self.direct_variances, "direct_variances", (estimates.shape[0],))
        if direct is not None and orientation is not Orientation.IMPUTATION_OUTER:
            raise ConfigError("Direct estimates only exist for imputation_outer grids")
        if direct_var is not None and direct is None:
            raise ConfigError("direct_variances given without direct_estimates")

        object.__setattr__(self, "estimates", estimates)
        object.__setattr__(self, "orientation", orientation)
        object.__setattr__(self, "within_variances", within)
        object.__setattr__(self, "direct_estimates", direct)
        object.__setattr__(self, "direct_variances", direct_var)

    @property
    def n_groups(self) -> int:
        return self.estimates.shape[0]

    @property
    def n_reps(self) -> int:
        return self.estimates.shape[1]

    def require(self, orientation: Orientation, method: str):
        """Raise OrientationError unless the grid has the given orientation."""
        if self.orientation is not orientation:
            raise OrientationError(
                f"Method '{method}' needs a {orientation.value} grid, "
                f"got a {self.orientation.value} grid"
            )

    def subgrid(self, n_groups: int, n_reps: int) -> "EstimateGrid":
        """Leading n_groups x n_reps block (with matching direct estimates)."""
        if not (1 <= n_groups <= self.n_groups and 1 <= n_reps <= self.n_reps):
            raise ConfigError(
                f"Cannot take a {n_groups}x{n_reps} block of a {self.n_groups}x{self.n_reps} grid"
            )
        within = None if self.within_variances is None else self.within_variances[:n_groups, :n_reps]
        direct = None if self.direct_estimates is None else self.direct_estimates[:n_groups]
        direct_var = None if self.direct_variances is None else self.direct_variances[:n_groups]
        return EstimateGrid(
            self.estimates[:n_groups, :n_reps], self.orientation, within, direct, direct_var
        )


def grid_row_means(grid: EstimateGrid) -> np.ndarray:
    """Mean of each outer group (theta_b for bootstrap_outer grids)."""
    return grid.estimates.mean(axis=1)


def grid_grand_mean(grid: EstimateGrid) -> float:
    """Mean of all G*M estimates."""
    return float(grid.estimates.mean())
