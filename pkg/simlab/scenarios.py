"""
Simulation scenarios: data-model parameters plus the imputation and analysis
models that are applied to each generated dataset.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Tuple, Union

import numpy as np

import config
from analysis.ols import AnalyzerSpec
from core.dataset import Dataset
from core.exceptions import ConfigError
from extractors.json_extractor import extract_config_from_json
from imputation.missing_value_handler import ImputerSpec
from simlab.generators import generate_regression_data, generate_trial_data

logger = logging.getLogger(__name__)


class RegressionScenario(str, Enum):
    SUBGROUP = "subgroup"
    HETEROSCEDASTIC = "heteroscedastic"
    OMITTED_INTERACTION = "omitted_interaction"
    NON_NORMAL = "non_normal"


def _check_covariance(matrix, name):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (2, 2) or not np.allclose(matrix, matrix.T):
        raise ConfigError(f"{name} must be a symmetric 2x2 matrix, got {matrix.tolist()}")
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise ConfigError(f"{name} must be positive definite, got {matrix.tolist()}") from None


def _check_probability(value, name):
    if not 0.0 <= float(value) <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class RegressionScenarioParams:
    """
    Parameters of the insulin-index regression model.

    sex ~ Bernoulli(pi); (age, height) | sex ~ N(alpha0 + alpha1 sex, sigma);
    weight = iota0 + iota1 sex + iota2 age + iota3 height + eta^sex lam e1;
    loginsindex = beta0 + beta1 sex + beta2 age + theta weight + eta^sex omega e2.
    Weight is observed with probability p_observe_men (sex = 1) or
    p_observe_women (sex = 0).
    """

    scenario: RegressionScenario = RegressionScenario.HETEROSCEDASTIC
    n: int = 1000
    pi: float = 0.4577
    alpha0: Tuple[float, float] = (25.02, 1.774)
    alpha1: Tuple[float, float] = (-0.03616, -0.1336)
    sigma: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.5521, 0.001574), (0.001574, 0.003705))
    iota0: float = -32.98
    iota1: float = -2.314
    iota2: float = -0.01566
    iota3: float = 65.38
    lam: float = 12.29
    beta0: float = 1.854
    beta1: float = 0.2908
    beta2: float = 0.08003
    theta: float = 0.01119
    omega: float = 0.7887
    eta: float = 0.5
    p_observe_men: float = 0.4
    p_observe_women: float = 0.4
    lognormal_sd: float = 0.25

    def __post_init__(self):
        try:
            object.__setattr__(self, "scenario", RegressionScenario(self.scenario))
        except ValueError:
            raise ConfigError(f"Unknown regression scenario '{self.scenario}'") from None
        if int(self.n) < 1:
            raise ConfigError(f"Sample size must be positive, got {self.n}")
        object.__setattr__(self, "alpha0", tuple(float(v) for v in self.alpha0))
        object.__setattr__(self, "alpha1", tuple(float(v) for v in self.alpha1))
        object.__setattr__(self, "sigma", tuple(tuple(float(v) for v in row) for row in self.sigma))
        _check_covariance(self.sigma, "sigma")
        for name in ("pi", "p_observe_men", "p_observe_women"):
            _check_probability(getattr(self, name), name)
        if self.eta < 0 or self.lam < 0 or self.omega < 0 or self.lognormal_sd < 0:
            raise ConfigError("Error scales eta, lam, omega and lognormal_sd must be nonnegative")

    @property
    def errors_lognormal(self) -> bool:
        return self.scenario is RegressionScenario.NON_NORMAL

    def with_sample_size(self, n) -> "RegressionScenarioParams":
        return replace(self, n=int(n))


def regression_preset(scenario) -> RegressionScenarioParams:
    """
    Parameters of one named regression scenario.

    The subgroup scenario nulls the sex effects (alpha1, iota1, beta1), makes
    the errors homoscedastic and leaves weight missing among men only.
    Heteroscedastic keeps eta = 0.5; the other two set eta = 1.
    """
    try:
        scenario = RegressionScenario(scenario)
    except ValueError:
        raise ConfigError(
            f"Unknown regression scenario '{scenario}'; expected one of {[s.value for s in RegressionScenario]}"
        ) from None
    if scenario is RegressionScenario.SUBGROUP:
        return RegressionScenarioParams(
            scenario=scenario, alpha1=(0.0, 0.0), iota1=0.0, beta1=0.0, eta=1.0,
            p_observe_men=0.4, p_observe_women=1.0,
        )
    if scenario is RegressionScenario.HETEROSCEDASTIC:
        return RegressionScenarioParams(scenario=scenario)
    return RegressionScenarioParams(scenario=scenario, eta=1.0)


@dataclass(frozen=True)
class TrialScenarioParams:
    """
    Two-arm trial: (X, Y) | Z ~ N((mean_x, mean_y + effect Z), covariance),
    n_per_arm rows per arm, Y missing completely at random with p_missing.
    """

    n_per_arm: int = 250
    mean_x: float = 2.0
    mean_y: float = 2.0
    effect: float = 0.2
    covariance: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.4, 0.2), (0.2, 0.4))
    p_missing: float = 0.5

    def __post_init__(self):
        if int(self.n_per_arm) < 1:
            raise ConfigError(f"Arm size must be positive, got {self.n_per_arm}")
        object.__setattr__(self, "covariance", tuple(tuple(float(v) for v in row) for row in self.covariance))
        _check_covariance(self.covariance, "covariance")
        _check_probability(self.p_missing, "p_missing")

    @property
    def n(self) -> int:
        return 2 * int(self.n_per_arm)

    def with_sample_size(self, n) -> "TrialScenarioParams":
        return replace(self, n_per_arm=max(1, int(n) // 2))


ScenarioParams = Union[RegressionScenarioParams, TrialScenarioParams]


def _params_from_dict(kind, spec: dict) -> ScenarioParams:
    overrides = dict(spec.get("params") or {})
    if kind == "trial":
        allowed = {f.name for f in fields(TrialScenarioParams)}
        base = TrialScenarioParams()
    else:
        allowed = {f.name for f in fields(RegressionScenarioParams)}
        if "scenario" not in spec:
            raise ConfigError("Regression scenario configs must name a 'scenario'")
        base = regression_preset(spec["scenario"])
        if "p_observe_weight" in overrides:
            p = overrides.pop("p_observe_weight")
            overrides.setdefault("p_observe_men", p)
            overrides.setdefault("p_observe_women", p)

    unknown = sorted(set(overrides) - allowed)
    if unknown:
        raise ConfigError(f"Unknown {kind} parameters: {unknown}")
    return replace(base, **overrides)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one simulation study."""

    name: str
    kind: str
    params: ScenarioParams
    imputer: ImputerSpec
    analyzer: AnalyzerSpec
    true_theta: float
    calibrate: bool = False

    @classmethod
    def from_dict(cls, name, spec: dict) -> "ScenarioConfig":
        kind = spec.get("kind")
        if kind not in ("regression", "trial"):
            raise ConfigError(f"Scenario '{name}' must have kind 'regression' or 'trial', got {kind!r}")
        try:
            true_theta = float(spec["true_theta"])
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Scenario '{name}' needs a numeric true_theta: {e}") from e
        return cls(
            name=name,
            kind=kind,
            params=_params_from_dict(kind, spec),
            imputer=ImputerSpec.from_dict(spec.get("imputer") or {}),
            analyzer=AnalyzerSpec.from_dict(spec.get("analyzer") or {}),
            true_theta=true_theta,
            calibrate=bool(spec.get("calibrate", False)),
        )

    def generate(self, rng) -> Dataset:
        if self.kind == "trial":
            return generate_trial_data(self.params, rng)
        return generate_regression_data(self.params, rng)

    def with_sample_size(self, n) -> "ScenarioConfig":
        return replace(self, params=self.params.with_sample_size(n))


def load_scenario(scenario_id, scenario_dir=config.SCENARIO_DIR) -> ScenarioConfig:
    """
    Load a shipped scenario by id.

    Args:
        scenario_id (str): One of config.SCENARIO_FILES
        scenario_dir (str): Directory holding the scenario JSON files

    Returns:
        ScenarioConfig: Parsed scenario

    Raises:
        ConfigError: for an unknown id or an invalid file
    """
    if scenario_id not in config.SCENARIO_FILES:
        raise ConfigError(f"Unknown scenario '{scenario_id}'; expected one of {sorted(config.SCENARIO_FILES)}")

    path = os.path.join(scenario_dir, config.SCENARIO_FILES[scenario_id])
    scenario = ScenarioConfig.from_dict(scenario_id, extract_config_from_json(path))
    logger.info(
        f"Loaded scenario '{scenario_id}' ({scenario.kind}, n={scenario.params.n}, "
        f"true theta {scenario.true_theta})"
    )
    return scenario
