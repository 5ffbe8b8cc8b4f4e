"""
Module for validating a dataset against the imputation and analysis models
before any resampling starts.
"""
import logging

import numpy as np

from core.dataset import Dataset
from core.exceptions import ConfigError, DataError

logger = logging.getLogger(__name__)


class SimpleValidator:
    """
    Expectation checks over a Dataset, in the style of Great Expectations.

    Each expect_* method records a result and returns whether it held;
    validate() summarizes and logs the failures.
    """

    def __init__(self, data: Dataset):
        self.data = data
        self.validation_results = []

    def expect_column_to_exist(self, column):
        """Check if a column exists in the dataset."""
        result = self.data.has_column(column)
        self._add_result(f"Column '{column}' exists", result)
        return result

    def expect_column_values_to_be_observed(self, column, rows=None):
        """Check that a column has no missing cells (optionally only on some rows)."""
        if not self.expect_column_to_exist(column):
            return False

        observed = self.data.observed(column)
        if rows is not None:
            observed = observed[rows]
        missing = int(np.sum(~observed))
        where = "" if rows is None else " on the selected rows"
        self._add_result(f"Column '{column}' is fully observed{where}", missing == 0,
                         details=f"{missing} missing values found" if missing else "")
        return missing == 0

    def expect_column_to_have_observed_values(self, column, min_count=1):
        """Check that a column has at least min_count observed cells."""
        if not self.expect_column_to_exist(column):
            return False

        count = int(np.sum(self.data.observed(column)))
        result = count >= min_count
        self._add_result(f"Column '{column}' has at least {min_count} observed values", result,
                         details=f"{count} observed" if not result else "")
        return result

    def expect_column_values_to_contain(self, column, value):
        """Check that some observed cell of a column equals value."""
        if not self.expect_column_to_exist(column):
            return False

        observed = self.data.observed(column)
        result = bool(np.any(self.data.column(column)[observed] == value))
        self._add_result(f"Column '{column}' contains the value {value}", result)
        return result

    def _add_result(self, expectation, success, details=""):
        """Add a validation result to the results list."""
        self.validation_results.append({
            'expectation': expectation,
            'success': success,
            'details': details
        })

    def failures(self):
        return [r for r in self.validation_results if not r['success']]

    def validate(self):
        """Get summary of validation results."""
        total = len(self.validation_results)
        failed = self.failures()

        logger.info(f"Validation complete: {total - len(failed)}/{total} expectations passed")
        for result in failed:
            details = f" - {result['details']}" if result['details'] else ""
            logger.warning(f"Failed: {result['expectation']}{details}")

        return not failed


def validate_analysis_inputs(data: Dataset, imputer, analyzer):
    """
    Check that a dataset can feed the imputation and analysis models.

    Args:
        data (Dataset): Incomplete data
        imputer (ImputerSpec): Imputation model
        analyzer (AnalyzerSpec): Analysis model

    Raises:
        ConfigError: if a referenced column does not exist
        DataError: if the data cannot support the models
    """
    logger.info("Starting input validation")

    referenced = list(dict.fromkeys([*imputer.required_columns, *analyzer.required_columns]))
    if analyzer.row_filter is not None:
        referenced.append(analyzer.row_filter.column)
    unknown = [c for c in referenced if not data.has_column(c)]
    if unknown:
        raise ConfigError(f"Columns {unknown} are referenced by the models but absent from the data "
                          f"(available: {list(data.columns)})")

    validator = SimpleValidator(data)
    validator.expect_column_to_have_observed_values(imputer.target)

    target_missing = ~data.observed(imputer.target)
    for column in imputer.predictors:
        validator.expect_column_values_to_be_observed(column, rows=target_missing)

    for column in analyzer.required_columns:
        if column != imputer.target:
            validator.expect_column_values_to_be_observed(column)

    if imputer.reference_arm_column is not None:
        validator.expect_column_values_to_be_observed(imputer.reference_arm_column)
        validator.expect_column_values_to_contain(imputer.reference_arm_column, imputer.reference_arm_value)
    if analyzer.row_filter is not None:
        validator.expect_column_values_to_be_observed(analyzer.row_filter.column)

    if not validator.validate():
        summary = "; ".join(r['expectation'] + (f" ({r['details']})" if r['details'] else "")
                            for r in validator.failures())
        raise DataError(f"Input data failed validation: {summary}")
