"""
Method batteries: which pooling procedures to run, with which M and B, and
the driver that evaluates a battery on one incomplete dataset.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

import config
from analysis.ols import AnalyzerSpec
from core.dataset import Dataset
from core.exceptions import ConfigError
from core.grid import EstimateGrid, Orientation
from core.results import Method, PooledResult
from engines.boot_then_mi import run_boot_then_mi
from engines.mi_then_boot import run_mi, run_mi_then_boot
from engines.plan import ResampleOrder, ResamplePlan
from imputation.missing_value_handler import ImputerSpec
from pooling.dispatch import POINT_ESTIMATE_METHODS, pool_grid

logger = logging.getLogger(__name__)

POINT_CHOICES = ("grand", "direct")


@dataclass(frozen=True)
class MethodSpec:
    """One procedure of a battery with its number of imputations and bootstraps."""

    method: Method
    m: int
    b: int = 0

    def __post_init__(self):
        method = Method.parse(self.method)
        m, b = int(self.m), int(self.b)
        object.__setattr__(self, "method", method)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "b", b)

        if method is Method.MI_RUBIN:
            if m < 2 or b != 0:
                raise ConfigError(f"mi-rubin needs M >= 2 and no bootstraps, got M={m}, B={b}")
            return
        min_m = 2 if method in (Method.MI_BOOT_RUBIN, Method.VON_HIPPEL) else 1
        if m < min_m or b < 2:
            raise ConfigError(f"{method.value} needs M >= {min_m} and B >= 2, got M={m}, B={b}")

    @property
    def label(self) -> str:
        if self.method is Method.MI_RUBIN:
            return f"{self.method.value} (M={self.m})"
        return f"{self.method.value} (M={self.m}, B={self.b})"

    @classmethod
    def from_dict(cls, spec: dict) -> "MethodSpec":
        try:
            return cls(spec["method"], spec["m"], spec.get("b", 0))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid battery entry {spec}: {e}") from e

    def to_dict(self) -> dict:
        return {"method": self.method.value, "m": self.m, "b": self.b}


def default_battery() -> List[MethodSpec]:
    return [MethodSpec(method, m, b) for method, m, b in config.DEFAULT_BATTERY]


def apply_overrides(battery: Sequence[MethodSpec], m=None, b=None) -> List[MethodSpec]:
    """
    Apply --m and --b to a battery.

    M is replaced for entries whose M exceeds 2, so the single-imputation Boot MI
    percentile and the M = 2 von Hippel entries keep theirs. B is replaced for
    every bootstrap method.
    """
    result = []
    for spec in battery:
        if m is not None and spec.m > 2:
            spec = replace(spec, m=int(m))
        if b is not None and spec.method.uses_bootstrap:
            spec = replace(spec, b=int(b))
        result.append(spec)
    return result


class BatteryRun(NamedTuple):
    results: Dict[MethodSpec, PooledResult]
    grids: Dict[Orientation, EstimateGrid]


def _imputation_side(data, imputer, analyzer, battery, seed, prefix, n_jobs, point):
    specs = [s for s in battery if not s.method.bootstraps_first]
    m = max((s.m for s in specs), default=0)
    if point == "direct":
        # Direct points of the Boot-then-MI methods come from the first M imputations
        m = max([m] + [s.m for s in battery if s.method.bootstraps_first and s.method in POINT_ESTIMATE_METHODS])
    if m == 0:
        return None

    b = max((s.b for s in specs), default=0)
    if b > 0:
        plan = ResamplePlan(m, b, seed, ResampleOrder.MI_THEN_BOOT, prefix)
        return run_mi_then_boot(data, imputer, analyzer, plan, n_jobs=n_jobs)
    plan = ResamplePlan(m, 1, seed, ResampleOrder.MI_THEN_BOOT, prefix)
    estimates = run_mi(data, imputer, analyzer, plan, n_jobs=n_jobs)
    # One column per imputation so the grid CSV round-trips into `pool`
    return EstimateGrid(
        estimates=estimates.estimates[:, None],
        orientation=Orientation.IMPUTATION_OUTER,
        within_variances=estimates.within_variances[:, None],
        direct_estimates=estimates.estimates,
        direct_variances=estimates.within_variances,
    )


def _bootstrap_side(data, imputer, analyzer, battery, seed, prefix, n_jobs):
    specs = [s for s in battery if s.method.bootstraps_first]
    if not specs:
        return None
    plan = ResamplePlan(
        max(s.m for s in specs), max(s.b for s in specs), seed, ResampleOrder.BOOT_THEN_MI, prefix
    )
    return run_boot_then_mi(data, imputer, analyzer, plan, n_jobs=n_jobs)


def _direct_point(mi_grid: Optional[EstimateGrid], m) -> float:
    return float(np.mean(mi_grid.direct_estimates[:m]))


def run_battery(
    data: Dataset,
    imputer: ImputerSpec,
    analyzer: AnalyzerSpec,
    battery: Sequence[MethodSpec],
    seed: int,
    alpha=config.DEFAULT_ALPHA,
    stream_prefix=(),
    n_jobs=1,
    point="grand",
) -> BatteryRun:
    """
    Evaluate every method of a battery on one dataset.

    Each resampling order runs once with the largest M and B any of its methods
    needs; smaller configurations pool the leading block of that grid. Because
    every cell has its own substream, the block equals a dedicated smaller run.

    Args:
        data (Dataset): Incomplete data
        imputer (ImputerSpec): Imputation model
        analyzer (AnalyzerSpec): Analysis model
        battery (list of MethodSpec): Methods to evaluate
        seed (int): Master seed
        alpha (float): Two-sided level
        stream_prefix (tuple of int): Key prefix separating this run's streams
        n_jobs (int): joblib workers inside the engines
        point (str): 'grand' or 'direct' point estimate for POINT_ESTIMATE_METHODS

    Returns:
        BatteryRun: PooledResult per MethodSpec and the grids produced
    """
    if point not in POINT_CHOICES:
        raise ConfigError(f"Point estimate must be one of {POINT_CHOICES}, got '{point}'")
    if not battery:
        raise ConfigError("The method battery is empty")

    # One run per resampling order at the largest M and B
    mi_grid = _imputation_side(data, imputer, analyzer, battery, seed, stream_prefix, n_jobs, point)
    boot_grid = _bootstrap_side(data, imputer, analyzer, battery, seed, stream_prefix, n_jobs)

    results = {}
    for spec in battery:
        point_estimate = None
        if point == "direct" and spec.method in POINT_ESTIMATE_METHODS:
            point_estimate = _direct_point(mi_grid, spec.m)

        # Leading block of the shared grid
        if spec.method.bootstraps_first:
            grid = boot_grid.subgrid(spec.b, spec.m)
        else:
            grid = mi_grid.subgrid(spec.m, max(spec.b, 1))
        results[spec] = pool_grid(spec.method, grid, alpha, point_estimate)

    grids = {}
    if mi_grid is not None:
        grids[Orientation.IMPUTATION_OUTER] = mi_grid
    if boot_grid is not None:
        grids[Orientation.BOOTSTRAP_OUTER] = boot_grid
    return BatteryRun(results, grids)
