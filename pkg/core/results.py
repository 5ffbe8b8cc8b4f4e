"""
Pooled inference results and variance-component records.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from core.exceptions import ConfigError, NumericalError


class Method(str, Enum):
    """Procedures that turn an estimate grid into an interval."""

    MI_RUBIN = "mi-rubin"
    MI_BOOT_RUBIN = "mi-boot-rubin"
    MI_BOOT_POOLED_PERCENTILE = "mi-boot-pooled-percentile"
    BOOT_MI_PERCENTILE = "boot-mi-percentile"
    VON_HIPPEL = "von-hippel"
    BOOT_MI_NORMAL = "boot-mi-normal"

    @classmethod
    def parse(cls, value):
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(
                f"Unknown method '{value}'; expected one of {[m.value for m in cls]}"
            ) from None

    @property
    def bootstraps_first(self) -> bool:
        return self in (Method.BOOT_MI_PERCENTILE, Method.VON_HIPPEL, Method.BOOT_MI_NORMAL)

    @property
    def uses_bootstrap(self) -> bool:
        return self is not Method.MI_RUBIN


@dataclass(frozen=True)
class VarianceComponents:
    """One-way ANOVA mean squares and the variance components derived from them."""

    msb: float
    msw: float
    sigma2_inf: float
    sigma2_btw: float
    fallback_used: bool


@dataclass(frozen=True)
class PooledResult:
    """Point estimate, variance, degrees of freedom and interval of one procedure."""

    method: Method
    point: float
    variance: float
    df: float
    ci_lower: float
    ci_upper: float
    alpha: float
    m: int
    b: int = 0
    fallback_used: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ConfigError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if self.variance < 0:
            raise NumericalError(f"Pooled variance must be nonnegative, got {self.variance}")
        if not self.df > 0:
            raise NumericalError(f"Degrees of freedom must be positive, got {self.df}")
        if self.ci_lower > self.ci_upper:
            raise NumericalError(f"Interval is reversed: ({self.ci_lower}, {self.ci_upper})")

    def to_record(self) -> dict:
        """Flat record in the documented result-column order."""
        return {
            "method": self.method.value,
            "M": self.m,
            "B": self.b,
            "point": self.point,
            "variance": self.variance,
            "df": self.df,
            "ci_lower": self.ci_lower,
            "ci_upper": self.ci_upper,
            "alpha": self.alpha,
            "fallback_used": self.fallback_used,
        }
