"""Exception hierarchy. The CLI maps each family onto an exit code."""


class PFCMError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3


class ConfigurationError(PFCMError, ValueError):
    """Invalid algorithm or experiment configuration."""

    exit_code = 1


class DataError(PFCMError, ValueError):
    """Unreadable or malformed data, or a data set that breaks its invariants."""

    exit_code = 2


class ContractViolation(DataError):
    """Arguments with inconsistent shapes or otherwise broken preconditions."""


class InjectionError(DataError):
    """A missingness request that cannot be satisfied."""


class DegenerateError(PFCMError, ArithmeticError):
    """A numerical degeneracy: an empty cluster, coincident centroids, ..."""

    exit_code = 3
