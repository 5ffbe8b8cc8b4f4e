"""
Method dispatch with the orientation guard.
"""
from __future__ import annotations

from typing import Optional

import config
from core.exceptions import ConfigError
from core.grid import EstimateGrid, Orientation
from core.results import Method, PooledResult
from pooling.percentile import pool_boot_mi_normal, pool_boot_mi_percentile, pool_mi_boot_pooled_percentile
from pooling.rubin import RubinInputs, pool_mi_boot_rubin, pool_rubin
from pooling.von_hippel import pool_von_hippel

# Methods whose interval may be reported around the mean of the direct MI estimates
POINT_ESTIMATE_METHODS = (Method.MI_BOOT_POOLED_PERCENTILE, Method.BOOT_MI_PERCENTILE, Method.BOOT_MI_NORMAL)


def rubin_inputs_from_grid(grid: EstimateGrid, alpha=config.DEFAULT_ALPHA) -> RubinInputs:
    """
    Rubin inputs held by an imputation_outer grid: its direct estimates and
    variances, or a single-column grid of estimates with within variances.
    """
    grid.require(Orientation.IMPUTATION_OUTER, Method.MI_RUBIN.value)
    if grid.direct_estimates is not None and grid.direct_variances is not None:
        return RubinInputs(grid.direct_estimates, grid.direct_variances, alpha)
    if grid.n_reps == 1 and grid.within_variances is not None:
        return RubinInputs(grid.estimates[:, 0], grid.within_variances[:, 0], alpha)
    raise ConfigError(
        "MI Rubin needs direct estimates with variances, or one estimate and within variance per imputation"
    )


def pool_grid(method, grid: EstimateGrid, alpha=config.DEFAULT_ALPHA,
              point_estimate: Optional[float] = None) -> PooledResult:
    """
    Pool a grid with the named method.

    Args:
        method (Method or str): Pooling procedure
        grid (EstimateGrid): Grid from the matching engine
        alpha (float): Two-sided level
        point_estimate (float, optional): Alternative point for POINT_ESTIMATE_METHODS

    Raises:
        OrientationError: if the grid comes from the other engine
    """
    method = Method.parse(method)
    if point_estimate is not None and method not in POINT_ESTIMATE_METHODS:
        raise ConfigError(
            f"An alternative point estimate only applies to {[m.value for m in POINT_ESTIMATE_METHODS]}, not '{method.value}'"
        )

    if method is Method.MI_RUBIN:
        return pool_rubin(rubin_inputs_from_grid(grid, alpha))
    if method is Method.MI_BOOT_RUBIN:
        return pool_mi_boot_rubin(grid, alpha)
    if method is Method.MI_BOOT_POOLED_PERCENTILE:
        return pool_mi_boot_pooled_percentile(grid, alpha, point_estimate)
    if method is Method.BOOT_MI_PERCENTILE:
        return pool_boot_mi_percentile(grid, alpha, point_estimate)
    if method is Method.BOOT_MI_NORMAL:
        return pool_boot_mi_normal(grid, alpha, point_estimate)
    return pool_von_hippel(grid, alpha)
