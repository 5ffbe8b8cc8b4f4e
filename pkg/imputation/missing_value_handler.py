"""
Module for imputing missing values by normal linear regression.

Two imputers are provided. ``mar_proper`` draws parameters from their
posterior given the complete cases and then draws each missing value from the
fitted conditional law (missing at random). ``jump_to_reference`` fits the same
model to the reference arm only and imputes every missing value, in either arm,
from the reference-arm law.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from analysis.ols import least_squares
from core.dataset import Dataset
from core.exceptions import ConfigError, DataError, InsufficientDataError

logger = logging.getLogger(__name__)


class ImputationMode(str, Enum):
    MAR_PROPER = "mar_proper"
    JUMP_TO_REFERENCE = "jump_to_reference"


@dataclass(frozen=True)
class ImputerSpec:
    """Imputation model for one incomplete column."""

    target: str
    predictors: Tuple[str, ...]
    mode: ImputationMode = ImputationMode.MAR_PROPER
    reference_arm_column: Optional[str] = None
    reference_arm_value: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "predictors", tuple(self.predictors))
        try:
            object.__setattr__(self, "mode", ImputationMode(self.mode))
        except ValueError:
            raise ConfigError(
                f"Unknown imputation mode '{self.mode}'; expected one of {[m.value for m in ImputationMode]}"
            ) from None

        if self.target in self.predictors:
            raise ConfigError(f"Imputation target '{self.target}' cannot predict itself")
        if self.mode is ImputationMode.JUMP_TO_REFERENCE:
            if self.reference_arm_column is None or self.reference_arm_value is None:
                raise ConfigError("jump_to_reference needs reference_arm_column and reference_arm_value")
            if self.reference_arm_column in self.predictors:
                raise ConfigError(
                    f"Arm column '{self.reference_arm_column}' is constant within the reference arm "
                    "and cannot be a jump_to_reference predictor"
                )

    @property
    def required_columns(self):
        names = [self.target, *self.predictors]
        if self.reference_arm_column is not None:
            names.append(self.reference_arm_column)
        return names

    @classmethod
    def from_dict(cls, spec: dict) -> "ImputerSpec":
        """Build from the JSON form used in run and scenario configs."""
        try:
            arm = spec.get("reference_arm") or {}
            return cls(
                target=spec["target"],
                predictors=tuple(spec.get("predictors", ())),
                mode=spec.get("mode", ImputationMode.MAR_PROPER.value),
                reference_arm_column=arm.get("column"),
                reference_arm_value=float(arm["value"]) if "value" in arm else None,
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Invalid imputer spec {spec}: {e}") from e

    def to_dict(self) -> dict:
        spec = {"mode": self.mode.value, "target": self.target, "predictors": list(self.predictors)}
        if self.reference_arm_column is not None:
            spec["reference_arm"] = {"column": self.reference_arm_column, "value": self.reference_arm_value}
        return spec


def _design(data: Dataset, predictors, rows):
    X = data.matrix(predictors, rows) if predictors else np.empty((int(np.count_nonzero(rows)), 0))
    return np.column_stack([np.ones(X.shape[0]), X])


def _posterior_draw(X, y, rng):
    """
    One draw of (beta*, sigma*) under the noninformative prior.

    sigma*^2 = RSS / chi2(n - p); beta* ~ N(beta_hat, sigma*^2 (X'X)^-1).
    """
    n, p = X.shape
    if n <= p + 2:
        raise InsufficientDataError(f"{n} complete cases are too few for {p} imputation coefficients")
    fit = least_squares(X, y)
    sigma2 = fit.rss / rng.chisquare(n - p)
    sigma = np.sqrt(sigma2)
    beta = fit.coefficients + sigma * (fit.covariance_root @ rng.standard_normal(p))
    return beta, sigma


def _impute_from(data, spec, fit_rows, rng):
    target_observed = data.observed(spec.target)
    missing_rows = np.flatnonzero(~target_observed)
    if missing_rows.size == 0:
        return data

    if not data.complete_rows(spec.predictors)[missing_rows].all():
        raise DataError(f"Predictors {list(spec.predictors)} must be observed wherever '{spec.target}' is missing")

    cases = fit_rows & target_observed & data.complete_rows(spec.predictors)
    X_fit = _design(data, spec.predictors, cases)
    y_fit = data.matrix([spec.target], cases)[:, 0]
    beta, sigma = _posterior_draw(X_fit, y_fit, rng)

    X_mis = _design(data, spec.predictors, missing_rows)
    drawn = X_mis @ beta + sigma * rng.standard_normal(missing_rows.size)
    return data.with_filled(spec.target, missing_rows, drawn)


def impute_mar_proper(data: Dataset, spec: ImputerSpec, rng) -> Dataset:
    """
    Proper normal-regression imputation under MAR.

    Args:
        data (Dataset): Incomplete dataset
        spec (ImputerSpec): Target and predictors
        rng (numpy.random.Generator): Stream for the chi-square and normal draws

    Returns:
        Dataset: Completed dataset; observed cells are untouched
    """
    return _impute_from(data, spec, np.ones(data.n_rows, dtype=bool), rng)


def impute_jump_to_reference(data: Dataset, spec: ImputerSpec, rng) -> Dataset:
    """
    Jump-to-reference imputation.

    Parameters are drawn from the regression fitted to the reference arm's
    complete cases; every missing target value is then drawn from that
    reference-arm law given its own predictors.
    """
    if spec.reference_arm_column is None:
        raise ConfigError("jump_to_reference needs a reference arm")
    arm = data.observed(spec.reference_arm_column)
    reference = np.zeros(data.n_rows, dtype=bool)
    reference[arm] = data.column(spec.reference_arm_column)[arm] == spec.reference_arm_value
    if not reference.any():
        raise InsufficientDataError(
            f"No rows with {spec.reference_arm_column} = {spec.reference_arm_value} in the reference arm"
        )
    return _impute_from(data, spec, reference, rng)


def handle_missing_values(data: Dataset, spec: ImputerSpec, rng) -> Dataset:
    """
    Impute the target column with the imputer's mode.

    Args:
        data (Dataset): Dataset to complete
        spec (ImputerSpec): Imputation model
        rng (numpy.random.Generator): Random stream for this imputation

    Returns:
        Dataset: Completed dataset
    """
    if spec.mode is ImputationMode.JUMP_TO_REFERENCE:
        return impute_jump_to_reference(data, spec, rng)
    return impute_mar_proper(data, spec, rng)
