"""
One-way random-effects ANOVA of an estimate grid.
"""
import logging

import numpy as np

from core.exceptions import ConfigError
from core.grid import EstimateGrid, grid_grand_mean, grid_row_means
from core.results import VarianceComponents

logger = logging.getLogger(__name__)


def one_way_anova(grid: EstimateGrid) -> VarianceComponents:
    """
    Mean squares between and within groups, and the REML variance components.

    With MSB > MSW: sigma2_inf = (MSB - MSW)/M and sigma2_btw = MSW. Otherwise
    sigma2_inf = 0 and sigma2_btw is the total sample variance of all G*M
    estimates (fallback_used is set).

    Args:
        grid (EstimateGrid): G x M grid, G >= 2 and M >= 2

    Returns:
        VarianceComponents: MSB, MSW and the two components
    """
    g, m = grid.estimates.shape
    if g < 2 or m < 2:
        raise ConfigError(f"One-way ANOVA needs at least 2 groups of 2, got a {g}x{m} grid")

    # Mean squares between and within groups
    row_means = grid_row_means(grid)
    grand = grid_grand_mean(grid)
    msb = m * float(np.sum((row_means - grand) ** 2)) / (g - 1)
    msw = float(np.sum((grid.estimates - row_means[:, None]) ** 2)) / (g * (m - 1))

    # Negative sigma2_inf estimate: fall back to the total variance
    if msb - msw <= 0.0:
        total = float(grid.estimates.var(ddof=1))
        logger.debug(f"MSB ({msb:.6g}) <= MSW ({msw:.6g}); using the total-variance fallback")
        return VarianceComponents(msb, msw, 0.0, total, True)
    return VarianceComponents(msb, msw, (msb - msw) / m, msw, False)
