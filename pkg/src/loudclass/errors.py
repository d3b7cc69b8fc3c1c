"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
data problems with 3, numeric failures with 4 (see ``loudclass.cli``).
"""


class LoudclassError(Exception):
    """Base class for every error this package raises deliberately."""


class ParameterError(LoudclassError, ValueError):
    """A model or function parameter violates its documented constraints."""


class DomainError(LoudclassError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class RangeError(LoudclassError, ValueError):
    """A query point falls outside the supported interval."""


class ShapeError(LoudclassError, ValueError):
    """Array or sequence dimensions do not line up."""


class ConfigurationError(LoudclassError, ValueError):
    """Invalid or incomplete configuration."""


class DataError(LoudclassError, ValueError):
    """Supplied data cannot be used as-is."""


class ParseError(DataError):
    """Malformed input file."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class SchemaError(DataError):
    """Input columns or keys do not match the documented schema."""


class DegenerateLabelError(DataError):
    """Labels collapse to a single class where at least two are required."""


class DegenerateFeatureError(DataError):
    """A feature column is constant where variance is required."""


class NumericError(LoudclassError, ArithmeticError):
    """A numeric routine failed to produce a usable result."""


class UndefinedMetricError(NumericError):
    """The requested metric is undefined for the given inputs."""
