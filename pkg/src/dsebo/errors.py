"""Exception types shared across the package."""


class DseboError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(DseboError, ValueError):
    """Invalid configuration: bad dimensions, unknown names, unwritable paths."""


class UsageError(DseboError, ValueError):
    """An operation was called with arguments violating its preconditions."""


class DataError(DseboError):
    """Non-finite objective values or otherwise unusable data.

    When raised from inside an optimization run, ``trace`` holds the partial
    trace recorded up to the failing evaluation.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NumericalError(DseboError, ArithmeticError):
    """Linear algebra failed even after jitter escalation."""
