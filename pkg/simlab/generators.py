"""
Data generators for the regression and trial simulation studies.

Draws are made in a fixed order from the generator passed in, so one
substream always yields the same dataset.
"""
import numpy as np

from core.dataset import Dataset

REGRESSION_COLUMNS = ("sex", "age", "height", "weight", "loginsindex")
TRIAL_COLUMNS = ("X", "Z", "Y")


def _correlated_normals(rng, means, covariance):
    root = np.linalg.cholesky(np.asarray(covariance, dtype=float))
    return means + rng.standard_normal(means.shape) @ root.T


def _errors(params, rng, n):
    draws = rng.standard_normal(n)
    if params.errors_lognormal:
        return np.exp(params.lognormal_sd * draws)
    return draws


def generate_regression_data(params, rng) -> Dataset:
    """
    Simulate the insulin-index data and blank out weights.

    Args:
        params (RegressionScenarioParams): Data-model parameters
        rng (numpy.random.Generator): Source of randomness

    Returns:
        Dataset: sex, age, height, weight and loginsindex; only weight has
        missing cells
    """
    n = int(params.n)
    sex = (rng.random(n) < params.pi).astype(float)
    means = np.asarray(params.alpha0) + np.outer(sex, params.alpha1)
    age_height = _correlated_normals(rng, means, params.sigma)
    age, height = age_height[:, 0], age_height[:, 1]

    # eta multiplies both error scales for men only
    scale = np.where(sex == 1.0, params.eta, 1.0)
    weight = (
        params.iota0 + params.iota1 * sex + params.iota2 * age + params.iota3 * height
        + scale * params.lam * _errors(params, rng, n)
    )
    loginsindex = (
        params.beta0 + params.beta1 * sex + params.beta2 * age + params.theta * weight
        + scale * params.omega * _errors(params, rng, n)
    )

    # Weight is missing at random given sex
    p_observe = np.where(sex == 1.0, params.p_observe_men, params.p_observe_women)
    observed = rng.random(n) < p_observe

    values = np.column_stack([sex, age, height, weight, loginsindex])
    mask = np.ones_like(values, dtype=bool)
    mask[:, REGRESSION_COLUMNS.index("weight")] = observed
    return Dataset.from_arrays(REGRESSION_COLUMNS, values, mask)


def generate_trial_data(params, rng) -> Dataset:
    """
    Simulate a two-arm trial with a baseline X, arm indicator Z and outcome Y.

    The first n_per_arm rows form the control arm (Z = 0). Y is missing
    completely at random with probability p_missing.
    """
    arm = np.repeat([0.0, 1.0], int(params.n_per_arm))
    means = np.column_stack([
        np.full(arm.size, params.mean_x),
        params.mean_y + params.effect * arm,
    ])
    # Baseline and outcome are bivariate normal within each arm
    xy = _correlated_normals(rng, means, params.covariance)
    missing = rng.random(arm.size) < params.p_missing

    values = np.column_stack([xy[:, 0], arm, xy[:, 1]])
    mask = np.ones_like(values, dtype=bool)
    mask[:, TRIAL_COLUMNS.index("Y")] = ~missing
    return Dataset.from_arrays(TRIAL_COLUMNS, values, mask)
