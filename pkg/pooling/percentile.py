"""
Percentile intervals for both resampling orders, plus the normal-based
Boot MI interval.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

import config
from core.exceptions import ConfigError
from core.grid import EstimateGrid, Orientation, grid_grand_mean, grid_row_means
from core.results import Method, PooledResult
from pooling.quantiles import check_alpha, empirical_percentile, t_quantile


def _percentile_interval(values, alpha):
    return (
        empirical_percentile(values, alpha / 2.0),
        empirical_percentile(values, 1.0 - alpha / 2.0),
    )


def pool_mi_boot_pooled_percentile(
    grid: EstimateGrid, alpha=config.DEFAULT_ALPHA, point_estimate: Optional[float] = None
) -> PooledResult:
    """
    MI boot pooled percentile.

    All M*B bootstrap estimates are pooled into one sample. The interval runs
    between its alpha/2 and 1 - alpha/2 empirical percentiles and the variance
    is the pooled sample variance with divisor M*B. The reported df, M*B - 1,
    is descriptive only.

    Args:
        grid (EstimateGrid): imputation_outer grid
        alpha (float): Two-sided level
        point_estimate (float, optional): Report this instead of the pooled
            mean (e.g. the mean of the direct estimates)
    """
    alpha = check_alpha(alpha)
    grid.require(Orientation.IMPUTATION_OUTER, Method.MI_BOOT_POOLED_PERCENTILE.value)
    pooled = grid.estimates.ravel()
    if pooled.size < 2:
        raise ConfigError("The pooled percentile interval needs at least 2 estimates")

    # Pooled variance uses divisor M*B, unlike the row-mean variances below
    grand = grid_grand_mean(grid)
    variance = float(np.mean((pooled - grand) ** 2))
    lower, upper = _percentile_interval(pooled, alpha)
    return PooledResult(
        method=Method.MI_BOOT_POOLED_PERCENTILE,
        point=grand if point_estimate is None else float(point_estimate),
        variance=variance,
        df=float(pooled.size - 1),
        ci_lower=lower,
        ci_upper=upper,
        alpha=alpha,
        m=grid.n_groups,
        b=grid.n_reps,
    )


def pool_boot_mi_percentile(
    grid: EstimateGrid, alpha=config.DEFAULT_ALPHA, point_estimate: Optional[float] = None
) -> PooledResult:
    """
    Boot MI percentile: percentile interval of the B bootstrap means theta_b.

    The point is the grand mean theta_BM unless point_estimate is given; the
    variance (sample variance of the theta_b) and df = B - 1 are descriptive.
    """
    alpha = check_alpha(alpha)
    grid.require(Orientation.BOOTSTRAP_OUTER, Method.BOOT_MI_PERCENTILE.value)
    if grid.n_groups < 2:
        raise ConfigError(f"Boot MI percentile needs B >= 2, got B={grid.n_groups}")

    # Percentiles of the bootstrap means theta_b, not of single estimates
    row_means = grid_row_means(grid)
    lower, upper = _percentile_interval(row_means, alpha)
    return PooledResult(
        method=Method.BOOT_MI_PERCENTILE,
        point=grid_grand_mean(grid) if point_estimate is None else float(point_estimate),
        variance=float(row_means.var(ddof=1)),
        df=float(grid.n_groups - 1),
        ci_lower=lower,
        ci_upper=upper,
        alpha=alpha,
        m=grid.n_reps,
        b=grid.n_groups,
    )


def pool_boot_mi_normal(
    grid: EstimateGrid, alpha=config.DEFAULT_ALPHA, point_estimate: Optional[float] = None
) -> PooledResult:
    """
    Boot MI with a normal interval: point +/- z * sd(theta_b).

    The interval is centred on theta_BM, or on point_estimate when given
    (theta_M, the mean of the MI estimates on the original data).
    """
    alpha = check_alpha(alpha)
    grid.require(Orientation.BOOTSTRAP_OUTER, Method.BOOT_MI_NORMAL.value)
    if grid.n_groups < 2:
        raise ConfigError(f"Boot MI normal needs B >= 2, got B={grid.n_groups}")

    point = grid_grand_mean(grid) if point_estimate is None else float(point_estimate)
    variance = float(grid_row_means(grid).var(ddof=1))
    half_width = t_quantile(1.0 - alpha / 2.0, math.inf) * math.sqrt(variance)
    return PooledResult(
        method=Method.BOOT_MI_NORMAL,
        point=point,
        variance=variance,
        df=math.inf,
        ci_lower=point - half_width,
        ci_upper=point + half_width,
        alpha=alpha,
        m=grid.n_reps,
        b=grid.n_groups,
    )
