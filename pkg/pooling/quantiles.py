"""
Quantile helpers shared by the poolers.
"""
import math

import numpy as np
from scipy import stats

from core.exceptions import ConfigError, DataError


def check_alpha(alpha):
    """Validate a two-sided level; intervals have nominal coverage 1 - alpha."""
    if not 0.0 < alpha < 0.5:
        raise ConfigError(f"alpha must lie in (0, 0.5), got {alpha}")
    return float(alpha)


def empirical_percentile(values, q):
    """
    Interpolated order statistic.

    Linear interpolation between order statistics at 1-based position
    q(n - 1) + 1, i.e. numpy's "linear" rule.

    Raises:
        DataError: on empty input
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DataError("Cannot take a percentile of an empty sample")
    if not 0.0 < q < 1.0:
        raise ConfigError(f"Percentile level must lie in (0, 1), got {q}")
    return float(np.quantile(values, q, method="linear"))


def t_quantile(p, df):
    """Quantile of Student's t on df degrees of freedom; infinite df gives the normal quantile."""
    if math.isinf(df):
        return float(stats.norm.ppf(p))
    return float(stats.t.ppf(p, df))
