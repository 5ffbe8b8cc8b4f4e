"""
Exception hierarchy. The CLI maps each family to an exit status.
"""


class BootMIError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(BootMIError):
    """Invalid model, configuration or method/grid combination."""

    exit_code = 2


class OrientationError(ConfigError):
    """A grid was handed to a pooler built for the other engine."""


class DataError(BootMIError):
    """Input data cannot support the requested analysis."""

    exit_code = 3


class InsufficientDataError(DataError):
    """Too few rows, complete cases or subgroup members."""


class NumericalError(BootMIError):
    """A fit or a resampling cell failed numerically."""

    exit_code = 4


class SingularDesignError(NumericalError):
    """Design matrix is rank deficient under the pivot tolerance."""


class EngineCellError(NumericalError):
    """A single (group, rep) cell of a resampling engine failed."""

    def __init__(self, group, rep, cause):
        self.group = group
        self.rep = rep
        self.cause = cause
        super().__init__(f"cell (group={group}, rep={rep}) failed: {cause}")

    def __reduce__(self):
        # joblib workers pickle exceptions back to the parent
        return type(self), (self.group, self.rep, self.cause)


class StudyFailedError(NumericalError):
    """Too many simulation replicates failed."""
