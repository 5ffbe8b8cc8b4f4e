"""
Ordinary least squares with analytic variance, row filtering and interactions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg

import config
from core.dataset import Dataset
from core.exceptions import ConfigError, DataError, InsufficientDataError, SingularDesignError

logger = logging.getLogger(__name__)

INTERCEPT = "(intercept)"


@dataclass(frozen=True)
class RowFilter:
    """Keep only rows whose column equals value (e.g. sex = 1)."""

    column: str
    value: float

    def select(self, data: Dataset) -> np.ndarray:
        observed = data.observed(self.column)
        keep = np.zeros(data.n_rows, dtype=bool)
        keep[observed] = data.column(self.column)[observed] == self.value
        return keep


@dataclass(frozen=True)
class AnalyzerSpec:
    """
    The analyst's linear model. An intercept is always included.

    ``target`` names the covariate (or interaction "a:b") whose coefficient is theta.
    """

    outcome: str
    covariates: Tuple[str, ...]
    target: str
    interactions: Tuple[Tuple[str, str], ...] = ()
    row_filter: Optional[RowFilter] = None

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(self.covariates))
        object.__setattr__(self, "interactions", tuple(tuple(pair) for pair in self.interactions))

        if self.outcome in self.covariates:
            raise ConfigError(f"Outcome '{self.outcome}' cannot also be a covariate")
        allowed = set(self.covariates)
        if self.row_filter is not None:
            allowed.add(self.row_filter.column)
        for pair in self.interactions:
            if len(pair) != 2:
                raise ConfigError(f"Interaction {pair} must name exactly two columns")
            unknown = [c for c in pair if c not in allowed]
            if unknown:
                raise ConfigError(
                    f"Interaction {pair} references {unknown}, which are neither covariates nor the filter column"
                )
        if self.target not in self.design_names[1:]:
            raise ConfigError(f"Target '{self.target}' is not a term of the design {self.design_names}")

    @property
    def design_names(self):
        return [INTERCEPT, *self.covariates, *(f"{a}:{b}" for a, b in self.interactions)]

    @property
    def required_columns(self):
        names = [self.outcome, *self.covariates]
        for pair in self.interactions:
            names.extend(c for c in pair if c not in names)
        return names

    @classmethod
    def from_dict(cls, spec: dict) -> "AnalyzerSpec":
        """Build from the JSON form used in run and scenario configs."""
        try:
            row_filter = spec.get("filter")
            return cls(
                outcome=spec["outcome"],
                covariates=tuple(spec.get("covariates", ())),
                target=spec["target"],
                interactions=tuple(tuple(p) for p in spec.get("interactions", ())),
                row_filter=RowFilter(row_filter["column"], float(row_filter["value"])) if row_filter else None,
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Invalid analyzer spec {spec}: {e}") from e

    def to_dict(self) -> dict:
        spec = {
            "outcome": self.outcome,
            "covariates": list(self.covariates),
            "interactions": [list(p) for p in self.interactions],
            "target": self.target,
        }
        if self.row_filter is not None:
            spec["filter"] = {"column": self.row_filter.column, "value": self.row_filter.value}
        return spec


class LeastSquaresFit(NamedTuple):
    coefficients: np.ndarray
    covariance_root: np.ndarray
    rss: float
    n: int
    p: int

    @property
    def unscaled_covariance(self):
        """(X'X)^-1."""
        return self.covariance_root @ self.covariance_root.T

    @property
    def residual_variance(self):
        return self.rss / (self.n - self.p)


class OLSResult(NamedTuple):
    coefficients: np.ndarray
    covariance: np.ndarray
    residual_variance: float
    n_used: int
    names: list


def least_squares(X, y, tolerance=config.RANK_TOLERANCE) -> LeastSquaresFit:
    """
    Solve min ||y - X beta|| by column-pivoted QR.

    The design is declared singular when the smallest |R_kk| is at most
    ``tolerance`` times the largest.

    Args:
        X (numpy.ndarray): n x p design matrix
        y (numpy.ndarray): outcome vector of length n
        tolerance (float): relative pivot tolerance

    Returns:
        LeastSquaresFit: coefficients, a square root of (X'X)^-1 and the RSS

    Raises:
        InsufficientDataError: if n <= p
        SingularDesignError: if X is rank deficient
    """
    n, p = X.shape
    if n <= p:
        raise InsufficientDataError(f"{n} rows cannot identify {p} coefficients")

    q, r, perm = linalg.qr(X, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(r))
    if pivots[0] == 0.0 or pivots[-1] <= tolerance * pivots[0]:
        raise SingularDesignError(
            f"Design matrix is rank deficient (pivot ratio {pivots[-1] / max(pivots[0], 1e-300):.3g})"
        )

    r_inv = linalg.solve_triangular(r, np.eye(p))
    coefficients = np.empty(p)
    coefficients[perm] = r_inv @ (q.T @ y)
    covariance_root = np.empty((p, p))
    covariance_root[perm] = r_inv

    residuals = y - X @ coefficients
    return LeastSquaresFit(coefficients, covariance_root, float(residuals @ residuals), n, p)


def build_design(data: Dataset, spec: AnalyzerSpec):
    """
    Design matrix and outcome for the rows selected by the analyzer's filter.

    Raises:
        DataError: if a used cell is missing
    """
    rows = np.ones(data.n_rows, dtype=bool) if spec.row_filter is None else spec.row_filter.select(data)
    needed = spec.required_columns
    if not data.complete_rows(needed)[rows].all():
        raise DataError(f"Analysis needs complete data on {needed}")

    y = data.matrix([spec.outcome], rows)[:, 0]
    columns = [np.ones(int(rows.sum()))]
    if spec.covariates:
        covariates = data.matrix(spec.covariates, rows)
        columns.extend(covariates.T)
    for a, b in spec.interactions:
        pair = data.matrix([a, b], rows)
        columns.append(pair[:, 0] * pair[:, 1])
    return np.column_stack(columns), y


def fit_ols(data: Dataset, spec: AnalyzerSpec) -> OLSResult:
    """
    Fit the analysis model by OLS.

    Returns:
        OLSResult: coefficients, covariance sigma^2 (X'X)^-1 with
        sigma^2 = RSS/(n_used - p), residual variance and rows used
    """
    X, y = build_design(data, spec)
    if X.shape[0] == 0:
        raise InsufficientDataError("No rows left after applying the row filter")
    fit = least_squares(X, y)
    sigma2 = fit.residual_variance
    return OLSResult(fit.coefficients, sigma2 * fit.unscaled_covariance, sigma2, fit.n, spec.design_names)


def analyze(data: Dataset, spec: AnalyzerSpec):
    """
    Estimate theta and its analytic variance on one complete dataset.

    Returns:
        tuple: (theta_hat, theta_var)
    """
    result = fit_ols(data, spec)
    k = result.names.index(spec.target)
    return float(result.coefficients[k]), float(result.covariance[k, k])
