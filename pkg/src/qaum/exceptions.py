"""Exception types.

The CLI maps each family onto its own exit code, so keep them disjoint.
"""


class QaumError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QaumError, ValueError):
    """Invalid sizes, counts, seeds or hyperparameters."""


class StructuralError(QaumError, ValueError):
    """Mismatched shapes, wire indices or circuit structure."""


class DataError(QaumError):
    """Unreadable or malformed input data."""


class ParseError(DataError):
    """A CSV row could not be parsed."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class DegenerateScaleError(DataError):
    """A feature column is constant and cannot be min-max scaled."""


class NumericError(QaumError, ArithmeticError):
    """Non-finite values appeared during optimisation."""
