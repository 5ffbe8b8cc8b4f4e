"""
Monte Carlo driver: repeated data generation, battery evaluation and
coverage summaries.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

import config
from core.exceptions import ConfigError, DataError, NumericalError, StudyFailedError
from core.streams import CALIBRATE, GENERATE_DATA, REPLICATE, derive_stream
from engines.mi_then_boot import run_mi
from engines.plan import ResampleOrder, ResamplePlan
from simlab.battery import MethodSpec, run_battery
from simlab.scenarios import ScenarioConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationSummary:
    """Coverage and interval width of one method over a study."""

    label: str
    method: str
    M: int
    B: int
    nsim: int
    n_failed: int
    coverage: float
    median_ci_width: float
    mc_se_coverage: float
    mean_point: float
    true_theta: float

    def to_record(self) -> dict:
        return asdict(self)


def summarize_coverage(spec: MethodSpec, lowers, uppers, points, true_theta, n_failed=0) -> SimulationSummary:
    """
    Coverage of true_theta by the intervals of the successful replicates.

    Args:
        spec (MethodSpec): Method the intervals come from
        lowers, uppers, points (array-like): One entry per successful replicate
        true_theta (float): Estimand
        n_failed (int): Replicates that produced no interval

    Returns:
        SimulationSummary: coverage, median width, MC SE sqrt(c (1 - c)/nsim)
    """
    lowers = np.asarray(lowers, dtype=float)
    uppers = np.asarray(uppers, dtype=float)
    points = np.asarray(points, dtype=float)
    nsim = lowers.size
    if nsim == 0:
        raise StudyFailedError(f"No successful replicates for {spec.label}")

    covered = (lowers <= true_theta) & (true_theta <= uppers)
    coverage = float(covered.mean())
    return SimulationSummary(
        label=spec.label,
        method=spec.method.value,
        M=spec.m,
        B=spec.b,
        nsim=nsim,
        n_failed=int(n_failed),
        coverage=coverage,
        median_ci_width=float(np.median(uppers - lowers)),
        mc_se_coverage=math.sqrt(coverage * (1.0 - coverage) / nsim),
        mean_point=float(points.mean()),
        true_theta=float(true_theta),
    )


def run_replicate(scenario: ScenarioConfig, battery: Sequence[MethodSpec], master_seed, replicate,
                  alpha=config.DEFAULT_ALPHA):
    """
    Generate one dataset and evaluate the battery on it.

    Returns:
        tuple: (replicate, {MethodSpec: (lower, upper, point)}) or
        (replicate, None) when the replicate failed
    """
    prefix = (REPLICATE, int(replicate))
    try:
        data = scenario.generate(derive_stream(master_seed, *prefix, GENERATE_DATA))
        run = run_battery(data, scenario.imputer, scenario.analyzer, battery, master_seed, alpha, prefix)
    except (DataError, NumericalError) as e:
        logger.warning(f"Replicate {replicate} failed: {e}")
        return replicate, None

    logger.debug(f"Replicate {replicate} done")
    return replicate, {
        spec: (result.ci_lower, result.ci_upper, result.point) for spec, result in run.results.items()
    }


def calibrate_true_theta(scenario: ScenarioConfig, seed, n=config.CALIBRATION_N, m=config.CALIBRATION_M) -> float:
    """
    Estimate the scenario's estimand by one large-sample MI run.

    Averages the M MI estimates from a dataset of size n, which for
    reference-based imputation gives the estimand the imputation targets.
    """
    large = scenario.with_sample_size(n)
    data = large.generate(derive_stream(seed, CALIBRATE, GENERATE_DATA))
    plan = ResamplePlan(m, 1, seed, ResampleOrder.MI_THEN_BOOT, stream_prefix=(CALIBRATE,))
    estimates = run_mi(data, large.imputer, large.analyzer, plan)
    value = float(np.mean(estimates.estimates))
    logger.info(f"Calibrated estimand for '{scenario.name}': {value:.6g} (n={n}, M={m})")
    return value


def check_calibration(scenario: ScenarioConfig, seed, tolerance=config.CALIBRATION_TOLERANCE, **kwargs) -> float:
    """Run calibrate_true_theta and insist it agrees with the configured estimand."""
    calibrated = calibrate_true_theta(scenario, seed, **kwargs)
    if abs(calibrated - scenario.true_theta) > tolerance:
        raise ConfigError(
            f"Scenario '{scenario.name}' declares true theta {scenario.true_theta} "
            f"but calibration gives {calibrated:.6g}"
        )
    return calibrated


def run_study(
    scenario: ScenarioConfig,
    battery: Sequence[MethodSpec],
    nsim: int,
    master_seed: int,
    alpha=config.DEFAULT_ALPHA,
    n_jobs=1,
    calibrate: Optional[bool] = None,
) -> List[SimulationSummary]:
    """
    Run nsim replicates of a scenario and summarize coverage per method.

    Replicate r draws its data and resamples from streams keyed by r, so the
    summaries depend on master_seed only, not on n_jobs.

    Args:
        scenario (ScenarioConfig): Data model and models to apply
        battery (list of MethodSpec): Methods to score
        nsim (int): Number of replicates
        master_seed (int): Seed of the study
        alpha (float): Two-sided level
        n_jobs (int): joblib workers over replicates
        calibrate (bool, optional): Check the estimand first; defaults to scenario.calibrate

    Returns:
        list of SimulationSummary: one per battery entry, in battery order

    Raises:
        StudyFailedError: if more than MAX_FAILURE_RATE of the replicates fail
    """
    if int(nsim) < 1:
        raise ConfigError(f"nsim must be at least 1, got {nsim}")
    # Drop repeated entries, keep battery order
    battery = list(dict.fromkeys(battery))
    if calibrate is None:
        calibrate = scenario.calibrate
    if calibrate:
        check_calibration(scenario, master_seed)

    logger.info(f"Study '{scenario.name}': nsim={nsim}, {len(battery)} methods, seed {master_seed}")
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(run_replicate)(scenario, battery, master_seed, r, alpha) for r in range(nsim)
    )
    # Aggregate by replicate index
    outcomes = [intervals for _, intervals in sorted(outcomes, key=lambda o: o[0])]

    # Check the failure rate before summarizing
    succeeded = [o for o in outcomes if o is not None]
    n_failed = len(outcomes) - len(succeeded)
    if n_failed:
        logger.warning(f"{n_failed} of {nsim} replicates failed")
    if n_failed / nsim > config.MAX_FAILURE_RATE:
        raise StudyFailedError(
            f"{n_failed} of {nsim} replicates failed, above the {config.MAX_FAILURE_RATE:.1%} limit"
        )

    summaries = []
    for spec in battery:
        lowers, uppers, points = zip(*(o[spec] for o in succeeded))
        summary = summarize_coverage(spec, lowers, uppers, points, scenario.true_theta, n_failed)
        logger.info(
            f"{summary.label}: coverage {summary.coverage:.4f} (MC SE {summary.mc_se_coverage:.4f}), "
            f"median width {summary.median_ci_width:.4g}"
        )
        summaries.append(summary)
    return summaries
