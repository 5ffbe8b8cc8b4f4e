"""
Bootstrap-then-impute engine.
"""
from __future__ import annotations

import logging

import numpy as np
from joblib import Parallel, delayed

from analysis.ols import AnalyzerSpec, analyze
from core.dataset import Dataset
from core.grid import EstimateGrid, Orientation
from core.streams import BOOT_FIRST, IMPUTE_AFTER_BOOT, derive_stream
from engines.mi_then_boot import run_cell
from engines.plan import ResampleOrder, ResamplePlan
from engines.resampler import bootstrap_sample
from imputation.missing_value_handler import ImputerSpec, handle_missing_values

logger = logging.getLogger(__name__)


def _bootstrap_row(data, imputer, analyzer, plan, b):
    # Resample the incomplete data, then impute the resample M times
    rng = derive_stream(plan.seed, *plan.key(BOOT_FIRST, b))
    sample = bootstrap_sample(data, rng)

    estimates = np.empty(plan.m)
    variances = np.empty(plan.m)
    for m in range(plan.m):
        rng = derive_stream(plan.seed, *plan.key(IMPUTE_AFTER_BOOT, b, m))
        completed = run_cell(b, m, handle_missing_values, sample, imputer, rng)
        estimates[m], variances[m] = run_cell(b, m, analyze, completed, analyzer)
    return estimates, variances


def run_boot_then_mi(
    data: Dataset, imputer: ImputerSpec, analyzer: AnalyzerSpec, plan: ResamplePlan, n_jobs=1
) -> EstimateGrid:
    """
    Bootstrap the incomplete data B times and multiply impute each resample M times.

    Args:
        data (Dataset): Incomplete observed data
        imputer (ImputerSpec): Imputation model
        analyzer (AnalyzerSpec): Analysis model
        plan (ResamplePlan): boot_then_mi plan
        n_jobs (int): joblib workers over bootstrap samples

    Returns:
        EstimateGrid: bootstrap_outer grid, B rows of M estimates
    """
    plan.require(ResampleOrder.BOOT_THEN_MI)
    logger.debug(f"Bootstrap then MI: B={plan.b}, M={plan.m}, prefix={plan.stream_prefix}")

    rows = Parallel(n_jobs=n_jobs)(
        delayed(_bootstrap_row)(data, imputer, analyzer, plan, b) for b in range(plan.b)
    )
    return EstimateGrid(
        estimates=np.vstack([row[0] for row in rows]),
        orientation=Orientation.BOOTSTRAP_OUTER,
        within_variances=np.vstack([row[1] for row in rows]),
    )
