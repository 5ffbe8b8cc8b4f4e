"""
von Hippel's Boot MI estimator: grand mean, ANOVA-based variance and
Satterthwaite degrees of freedom.
"""
from __future__ import annotations

import logging
import math

import config
from core.exceptions import ConfigError
from core.grid import EstimateGrid, Orientation, grid_grand_mean
from core.results import Method, PooledResult, VarianceComponents
from pooling.anova import one_way_anova
from pooling.quantiles import check_alpha, t_quantile

logger = logging.getLogger(__name__)


def von_hippel_variance(components: VarianceComponents, b, m):
    """
    Var(theta_BM) = (1 + 1/B) sigma2_inf + sigma2_btw / (B M).

    Without fallback this equals ((B + 1)/(B M)) MSB - MSW/M.
    """
    return (1.0 + 1.0 / b) * components.sigma2_inf + components.sigma2_btw / (b * m)


def satterthwaite_df(components: VarianceComponents, b, m):
    """Satterthwaite df for ((B + 1)/(B M)) MSB - MSW/M."""
    weight = (b + 1.0) / (b * m)
    variance = weight * components.msb - components.msw / m
    denominator = (weight * components.msb) ** 2 / (b - 1) + components.msw ** 2 / (b * m ** 2 * (m - 1))
    return variance ** 2 / denominator


def pool_von_hippel(grid: EstimateGrid, alpha=config.DEFAULT_ALPHA) -> PooledResult:
    """
    Pool a bootstrap_outer grid by von Hippel's method.

    Under the fallback (MSB <= MSW) the variance is sigma2_btw/(B M) and the
    df is B M - 1.

    Args:
        grid (EstimateGrid): B x M grid, B >= 2 and M >= 2
        alpha (float): Two-sided level

    Returns:
        PooledResult: theta_BM +/- t_{1-alpha/2, df} sqrt(variance)
    """
    alpha = check_alpha(alpha)
    grid.require(Orientation.BOOTSTRAP_OUTER, Method.VON_HIPPEL.value)
    b, m = grid.estimates.shape
    if b < 2 or m < 2:
        raise ConfigError(f"von Hippel needs B >= 2 and M >= 2, got B={b}, M={m}")

    # Variance components from the one-way ANOVA of the grid
    components = one_way_anova(grid)
    variance = von_hippel_variance(components, b, m)
    if components.fallback_used:
        logger.warning(f"von Hippel MSB <= MSW (B={b}, M={m}); using the total-variance fallback")
        df = float(b * m - 1)
    else:
        df = satterthwaite_df(components, b, m)

    point = grid_grand_mean(grid)
    half_width = t_quantile(1.0 - alpha / 2.0, df) * math.sqrt(variance)
    return PooledResult(
        method=Method.VON_HIPPEL,
        point=point,
        variance=variance,
        df=df,
        ci_lower=point - half_width,
        ci_upper=point + half_width,
        alpha=alpha,
        m=m,
        b=b,
        fallback_used=components.fallback_used,
    )
