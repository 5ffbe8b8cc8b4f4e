"""
Resampling plans.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from core.exceptions import ConfigError


class ResampleOrder(str, Enum):
    MI_THEN_BOOT = "mi_then_boot"
    BOOT_THEN_MI = "boot_then_mi"


@dataclass(frozen=True)
class ResamplePlan:
    """
    Numbers of imputations and bootstraps plus the seed they are drawn from.

    ``stream_prefix`` is prepended to every cell key; a simulation replicate r
    uses (REPLICATE, r) so replicates never share a stream.
    """

    m: int
    b: int
    seed: int
    order: ResampleOrder = ResampleOrder.BOOT_THEN_MI
    stream_prefix: Tuple[int, ...] = ()

    def __post_init__(self):
        if int(self.m) < 1 or int(self.b) < 1:
            raise ConfigError(f"Plans need m >= 1 and b >= 1, got m={self.m}, b={self.b}")
        if int(self.seed) < 0:
            raise ConfigError(f"Seed must be nonnegative, got {self.seed}")
        try:
            object.__setattr__(self, "order", ResampleOrder(self.order))
        except ValueError:
            raise ConfigError(f"Unknown resampling order '{self.order}'") from None
        object.__setattr__(self, "stream_prefix", tuple(int(k) for k in self.stream_prefix))

    def require(self, order: ResampleOrder):
        if self.order is not order:
            raise ConfigError(f"Engine needs a {order.value} plan, got {self.order.value}")

    def key(self, *cell):
        return (*self.stream_prefix, *cell)
