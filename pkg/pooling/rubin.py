"""
Rubin's rules, with analytic or bootstrap within-imputation variances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

import config
from core.exceptions import ConfigError
from core.grid import EstimateGrid, Orientation
from core.results import Method, PooledResult
from pooling.quantiles import check_alpha, t_quantile


@dataclass(frozen=True)
class RubinInputs:
    """M imputation estimates and their complete-data variances."""

    estimates: np.ndarray
    within_variances: np.ndarray
    alpha: float = config.DEFAULT_ALPHA

    def __post_init__(self):
        estimates = np.asarray(self.estimates, dtype=float)
        within = np.asarray(self.within_variances, dtype=float)
        if estimates.ndim != 1 or estimates.shape != within.shape:
            raise ConfigError(
                f"Need equal-length estimate and variance vectors, got {estimates.shape} and {within.shape}"
            )
        if np.any(within < 0):
            raise ConfigError("Within-imputation variances must be nonnegative")
        object.__setattr__(self, "estimates", estimates)
        object.__setattr__(self, "within_variances", within)
        object.__setattr__(self, "alpha", check_alpha(self.alpha))


def pool_rubin(inputs: RubinInputs, method=Method.MI_RUBIN, b=0) -> PooledResult:
    """
    Combine M estimates by Rubin's rules.

    variance = (1 + 1/M) sigma2_btw + sigma2_wtn, with t degrees of freedom
    (M - 1) [(sigma2_wtn + (1 + 1/M) sigma2_btw) / ((1 + 1/M) sigma2_btw)]^2.
    A zero between-imputation variance gives infinite df (normal quantiles).

    Args:
        inputs (RubinInputs): Estimates, within variances and alpha
        method (Method): Tag recorded on the result
        b (int): Bootstraps behind the within variances, for the record

    Returns:
        PooledResult: Pooled estimate and t interval
    """
    m = inputs.estimates.size
    if m < 2:
        raise ConfigError(f"Rubin's rules need at least 2 imputations, got {m}")

    # Between- and within-imputation variance
    point = float(inputs.estimates.mean())
    between = float(inputs.estimates.var(ddof=1))
    within = float(inputs.within_variances.mean())
    inflated = (1.0 + 1.0 / m) * between
    variance = inflated + within

    # No between-imputation spread: normal quantiles
    df = math.inf if inflated == 0.0 else (m - 1) * ((within + inflated) / inflated) ** 2
    half_width = t_quantile(1.0 - inputs.alpha / 2.0, df) * math.sqrt(variance)
    return PooledResult(
        method=method,
        point=point,
        variance=variance,
        df=df,
        ci_lower=point - half_width,
        ci_upper=point + half_width,
        alpha=inputs.alpha,
        m=m,
        b=b,
    )


def bootstrap_within_variances(grid: EstimateGrid) -> np.ndarray:
    """Sample variance (divisor B - 1) of each imputation's bootstrap estimates."""
    grid.require(Orientation.IMPUTATION_OUTER, Method.MI_BOOT_RUBIN.value)
    if grid.n_reps < 2:
        raise ConfigError(f"Bootstrap variances need B >= 2, got B={grid.n_reps}")
    return grid.estimates.var(axis=1, ddof=1)


def pool_mi_boot_rubin(grid: EstimateGrid, alpha=config.DEFAULT_ALPHA) -> PooledResult:
    """
    MI boot Rubin: Rubin's rules on the direct estimates, with each
    imputation's within variance estimated by bootstrapping it.
    """
    within = bootstrap_within_variances(grid)
    if grid.direct_estimates is None:
        raise ConfigError("MI boot Rubin needs the direct estimates of each imputed dataset")
    inputs = RubinInputs(grid.direct_estimates, within, alpha)
    return pool_rubin(inputs, method=Method.MI_BOOT_RUBIN, b=grid.n_reps)
