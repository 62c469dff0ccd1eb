"""Exception types shared across the package."""


class ParacalcError(Exception):
    """Base class for all package-specific errors."""


class UsageError(ParacalcError):
    """Caller broke an interface contract (grid mismatch, empty input, ...)."""


class ConfigurationError(ParacalcError):
    """Parameters are inconsistent with each other or with the grid."""


class UnsupportedParameterError(ConfigurationError):
    """A parameter value outside the supported range was requested."""


class OutOfStructureError(ParacalcError):
    """A word or basis element outside the graded structure was requested."""


class DegenerateInputError(ParacalcError):
    """Input carries no usable signal for the requested computation."""


class NotACharacterError(ParacalcError):
    """A point character does not take the value 1 on the empty word."""
