import numpy as np
import pytest

import config
from analysis.ols import AnalyzerSpec
from core.dataset import Dataset
from core.streams import derive_stream
from imputation.missing_value_handler import ImputerSpec
from simlab.generators import generate_trial_data
from simlab.scenarios import TrialScenarioParams


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the long Monte Carlo coverage studies")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def trial_data():
    """One incomplete trial dataset (500 rows, about half of Y missing)."""
    return generate_trial_data(TrialScenarioParams(), derive_stream(2024, 0))


@pytest.fixture
def complete_trial_data():
    return generate_trial_data(TrialScenarioParams(p_missing=0.0), derive_stream(2024, 1))


@pytest.fixture
def trial_imputer():
    return ImputerSpec(target="Y", predictors=("X", "Z"))


@pytest.fixture
def trial_j2r_imputer():
    return ImputerSpec(target="Y", predictors=("X",), mode="jump_to_reference",
                       reference_arm_column="Z", reference_arm_value=0.0)


@pytest.fixture
def trial_analyzer():
    return AnalyzerSpec(outcome="Y", covariates=("X", "Z"), target="Z")


@pytest.fixture
def small_incomplete():
    """Ten rows, y = 1 + 2x + noise, y missing on rows 7-9."""
    rng = np.random.default_rng(7)
    x = np.arange(10, dtype=float)
    y = 1.0 + 2.0 * x + rng.normal(0.0, 0.5, size=10)
    mask = np.ones((10, 2), dtype=bool)
    mask[7:, 1] = False
    return Dataset.from_arrays(["x", "y"], np.column_stack([x, y]), mask)


@pytest.fixture(autouse=True)
def _logging_left_to_pytest(monkeypatch):
    """Keep main() from attaching file and stream handlers during tests."""
    monkeypatch.setattr(config, "_logging_configured", True)
