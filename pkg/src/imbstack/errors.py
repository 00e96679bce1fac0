"""Exception hierarchy. The CLI maps these onto process exit codes."""


class ImbStackError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class ConfigError(ImbStackError, ValueError):
    """Invalid configuration, hyperparameter, or call precondition."""

    exit_code = 1


class DataError(ImbStackError, ValueError):
    """Malformed, degenerate, or inconsistent input data."""

    exit_code = 2


class UndefinedMetricError(ImbStackError, ValueError):
    """A metric whose value is mathematically undefined for the input."""

    exit_code = 2
