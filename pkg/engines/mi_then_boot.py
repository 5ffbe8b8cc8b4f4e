"""
Impute-then-bootstrap engines: plain MI and MI followed by bootstrapping
each completed dataset.
"""
from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from analysis.ols import AnalyzerSpec, analyze
from core.dataset import Dataset
from core.exceptions import EngineCellError, InsufficientDataError, NumericalError
from core.grid import EstimateGrid, Orientation
from core.streams import BOOT_AFTER_IMPUTE, IMPUTE_FIRST, derive_stream
from engines.plan import ResampleOrder, ResamplePlan
from engines.resampler import bootstrap_sample
from imputation.missing_value_handler import ImputerSpec, handle_missing_values

logger = logging.getLogger(__name__)

DIRECT = -1


class MultipleImputationEstimates(NamedTuple):
    estimates: np.ndarray
    within_variances: np.ndarray


def run_cell(group, rep, function, *args):
    """Evaluate one grid cell, turning numerical failures into EngineCellError."""
    try:
        return function(*args)
    except (NumericalError, InsufficientDataError, np.linalg.LinAlgError) as e:
        if isinstance(e, EngineCellError):
            raise
        raise EngineCellError(group, rep, e) from e


def _impute(data, imputer, plan, m):
    rng = derive_stream(plan.seed, *plan.key(IMPUTE_FIRST, m))
    return run_cell(m, DIRECT, handle_missing_values, data, imputer, rng)


def _imputation_row(data, imputer, analyzer, plan, m, n_boot):
    # Direct estimate on the completed dataset
    completed = _impute(data, imputer, plan, m)
    theta, theta_var = run_cell(m, DIRECT, analyze, completed, analyzer)

    # Bootstrap the completed dataset
    estimates = np.empty(n_boot)
    variances = np.empty(n_boot)
    for b in range(n_boot):
        rng = derive_stream(plan.seed, *plan.key(BOOT_AFTER_IMPUTE, m, b))
        sample = bootstrap_sample(completed, rng)
        estimates[b], variances[b] = run_cell(m, b, analyze, sample, analyzer)
    return theta, theta_var, estimates, variances


def run_mi(
    data: Dataset, imputer: ImputerSpec, analyzer: AnalyzerSpec, plan: ResamplePlan, n_jobs=1
) -> MultipleImputationEstimates:
    """
    Impute M times and analyze each completed dataset (plan.b is not used).

    The imputations use the same substreams as run_mi_then_boot, so both
    engines see identical completed datasets under one seed.
    """
    plan.require(ResampleOrder.MI_THEN_BOOT)
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_imputation_row)(data, imputer, analyzer, plan, m, 0) for m in range(plan.m)
    )
    return MultipleImputationEstimates(
        np.array([row[0] for row in rows]), np.array([row[1] for row in rows])
    )


def run_mi_then_boot(
    data: Dataset, imputer: ImputerSpec, analyzer: AnalyzerSpec, plan: ResamplePlan, n_jobs=1
) -> EstimateGrid:
    """
    Impute M times, then bootstrap each completed dataset B times.

    Args:
        data (Dataset): Incomplete observed data
        imputer (ImputerSpec): Imputation model
        analyzer (AnalyzerSpec): Analysis model
        plan (ResamplePlan): mi_then_boot plan
        n_jobs (int): joblib workers over imputations

    Returns:
        EstimateGrid: imputation_outer grid with M rows of B bootstrap
        estimates and the M direct estimates with their analytic variances
    """
    plan.require(ResampleOrder.MI_THEN_BOOT)
    logger.debug(f"MI then bootstrap: M={plan.m}, B={plan.b}, prefix={plan.stream_prefix}")

    # Rows come back in imputation order whatever the worker count
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_imputation_row)(data, imputer, analyzer, plan, m, plan.b) for m in range(plan.m)
    )
    return EstimateGrid(
        estimates=np.vstack([row[2] for row in rows]),
        orientation=Orientation.IMPUTATION_OUTER,
        within_variances=np.vstack([row[3] for row in rows]),
        direct_estimates=np.array([row[0] for row in rows]),
        direct_variances=np.array([row[1] for row in rows]),
    )
