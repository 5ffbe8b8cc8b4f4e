import json
import math

import numpy as np
import pytest

from analysis.ols import AnalyzerSpec
from core.dataset import Dataset
from core.exceptions import ConfigError, DataError
from core.grid import EstimateGrid, Orientation
from extractors.csv_extractor import extract_dataset_from_csv
from extractors.grid_extractor import extract_grid_from_csv
from extractors.json_extractor import extract_config_from_json
from imputation.missing_value_handler import ImputerSpec
from loaders.csv_exporter import export_grid_to_csv, export_records_to_csv
from loaders.json_exporter import export_to_json
from loaders.sql_loader import load_summaries_to_sqlite
from utils import config_hash, to_jsonable
from validators.data_validator import SimpleValidator, validate_analysis_inputs


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# CSV datasets

def test_empty_cells_are_missing(tmp_path):
    data = extract_dataset_from_csv(_write(tmp_path / "d.csv", "x,y\n1,2\n2,\n3,4.5\n"))
    assert data.columns == ("x", "y")
    assert data.missing_count("y") == 1
    assert data.column("y")[2] == 4.5


@pytest.mark.parametrize("text", ["x,y\n1,NA\n2,3\n", "x,y\n1,abc\n", "", "x,y\n"])
def test_bad_csv_files_are_data_errors(tmp_path, text):
    with pytest.raises(DataError):
        extract_dataset_from_csv(_write(tmp_path / "d.csv", text))


def test_missing_csv_file(tmp_path):
    with pytest.raises(DataError):
        extract_dataset_from_csv(str(tmp_path / "absent.csv"))


# JSON configs

def test_json_config_errors(tmp_path):
    assert extract_config_from_json(_write(tmp_path / "ok.json", '{"m": 2}')) == {"m": 2}
    with pytest.raises(ConfigError):
        extract_config_from_json(str(tmp_path / "absent.json"))
    with pytest.raises(ConfigError):
        extract_config_from_json(_write(tmp_path / "bad.json", "{m: 2"))
    with pytest.raises(ConfigError):
        extract_config_from_json(_write(tmp_path / "list.json", "[1, 2]"))
    with pytest.raises(ConfigError):
        extract_config_from_json(str(tmp_path))


# Grid files

def test_grid_file_with_direct_rows(tmp_path):
    text = (
        "# orientation: imputation_outer\n"
        "group,rep,estimate,within_variance\n"
        "0,-1,1.5,0.25\n0,0,1.0,\n0,1,2.0,\n"
        "1,-1,2.5,0.5\n1,0,3.0,\n1,1,2.0,\n"
    )
    grid = extract_grid_from_csv(_write(tmp_path / "g.csv", text))
    assert grid.orientation is Orientation.IMPUTATION_OUTER
    np.testing.assert_array_equal(grid.estimates, [[1.0, 2.0], [3.0, 2.0]])
    np.testing.assert_array_equal(grid.direct_estimates, [1.5, 2.5])
    np.testing.assert_array_equal(grid.direct_variances, [0.25, 0.5])
    assert grid.within_variances is None


def test_grid_rows_may_come_in_any_order(tmp_path):
    text = "# orientation: bootstrap_outer\ngroup,rep,estimate\n1,1,4\n0,0,1\n1,0,2\n0,1,3\n"
    grid = extract_grid_from_csv(_write(tmp_path / "g.csv", text))
    np.testing.assert_array_equal(grid.estimates, [[1.0, 3.0], [2.0, 4.0]])


@pytest.mark.parametrize("text", [
    "group,rep,estimate\n0,0,1\n",
    "# orientation: bootstrap_outer\ngroup,estimate\n0,1\n",
    "# orientation: bootstrap_outer\ngroup,rep,estimate\n0,0,1\n0,0,2\n",
    "# orientation: bootstrap_outer\ngroup,rep,estimate\n0,0,1\n0,1,2\n1,0,3\n",
    "# orientation: bootstrap_outer\ngroup,rep,estimate\n0,0,abc\n",
    "# orientation: bootstrap_outer\ngroup,rep,estimate\n",
])
def test_malformed_grid_files(tmp_path, text):
    with pytest.raises(DataError):
        extract_grid_from_csv(_write(tmp_path / "g.csv", text))


def test_unknown_orientation_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        extract_grid_from_csv(_write(tmp_path / "g.csv", "# orientation: diagonal\ngroup,rep,estimate\n0,0,1\n"))


def test_exported_grid_reads_back(tmp_path):
    grid = EstimateGrid(
        np.array([[0.1, 0.2, 0.3], [1.0 / 3.0, 2.0, 3.0]]), Orientation.IMPUTATION_OUTER,
        direct_estimates=[0.15, 2.5], direct_variances=[0.01, 0.02],
    )
    path = export_grid_to_csv(grid, str(tmp_path / "out" / "grid.csv"))
    assert open(path, encoding="utf-8").readline() == "# orientation: imputation_outer\n"
    again = extract_grid_from_csv(path)
    np.testing.assert_array_equal(again.estimates, grid.estimates)
    np.testing.assert_array_equal(again.direct_estimates, grid.direct_estimates)
    np.testing.assert_array_equal(again.direct_variances, grid.direct_variances)


def test_exported_grid_values_read_back_exactly(tmp_path):
    values = np.random.default_rng(11).normal(size=(50, 20))
    grid = EstimateGrid(values, Orientation.BOOTSTRAP_OUTER)
    again = extract_grid_from_csv(export_grid_to_csv(grid, str(tmp_path / "grid.csv")))
    np.testing.assert_array_equal(again.estimates, values)


def test_dataset_values_read_back_exactly(tmp_path):
    values = np.random.default_rng(12).normal(size=(200, 2))
    text = "x,y\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in values)
    data = extract_dataset_from_csv(_write(tmp_path / "d.csv", text))
    np.testing.assert_array_equal(data.column("x"), values[:, 0])
    np.testing.assert_array_equal(data.column("y"), values[:, 1])


# Exporters and the database loader

def test_record_export_formatting(tmp_path):
    records = [{"method": "mi-rubin", "df": math.inf, "point": 0.1, "fallback_used": False}]
    path = export_records_to_csv(records, ["method", "point", "df", "fallback_used"], str(tmp_path / "r.csv"))
    with open(path, encoding="utf-8", newline="") as f:
        assert f.read() == "method,point,df,fallback_used\nmi-rubin,0.10000000000000001,inf,False\n"


def test_json_export_is_strict(tmp_path):
    path = export_to_json({"b": np.float64(math.inf), "a": np.int64(3), "c": [np.nan]}, str(tmp_path / "r.json"))
    text = open(path, encoding="utf-8").read()
    assert json.loads(text) == {"a": 3, "b": "inf", "c": ["nan"]}
    assert text.index('"a"') < text.index('"b"')


def test_sqlite_loader_appends(tmp_path):
    uri = f"sqlite:///{tmp_path / 'studies.db'}"
    rows = [{"label": "mi-rubin (M=10)", "coverage": 0.95}, {"label": "von-hippel (M=2, B=200)", "coverage": 0.94}]
    assert load_summaries_to_sqlite(rows, uri) == 2
    assert load_summaries_to_sqlite(rows, uri) == 4
    assert load_summaries_to_sqlite(rows[:1], uri, table_name="pilot") == 1
    with pytest.raises(ConfigError):
        load_summaries_to_sqlite([], uri)


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1.5, 2]}) == config_hash({"b": [1.5, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert to_jsonable((np.float64(-math.inf), np.bool_(True))) == ["-inf", True]


# Input validation

def _validation_data():
    values = np.array([[1.0, 0.0, 2.0], [2.0, 1.0, np.nan], [3.0, 0.0, 4.0], [np.nan, 1.0, 5.0]])
    return Dataset.from_arrays(["x", "z", "y"], values)


def test_validator_records_each_expectation():
    validator = SimpleValidator(_validation_data())
    assert validator.expect_column_to_exist("x")
    assert not validator.expect_column_to_exist("w")
    assert not validator.expect_column_values_to_be_observed("x")
    assert validator.expect_column_values_to_contain("z", 1.0)
    assert len(validator.validation_results) == 6
    assert not validator.validate()
    assert len(validator.failures()) == 2


def test_validate_analysis_inputs():
    data = _validation_data()
    imputer = ImputerSpec(target="y", predictors=("x",))
    validate_analysis_inputs(data, imputer, AnalyzerSpec(outcome="y", covariates=("z",), target="z"))

    with pytest.raises(DataError, match="'x'"):
        validate_analysis_inputs(data, imputer, AnalyzerSpec(outcome="y", covariates=("x", "z"), target="z"))
    with pytest.raises(ConfigError):
        validate_analysis_inputs(data, imputer, AnalyzerSpec(outcome="y", covariates=("w",), target="w"))
