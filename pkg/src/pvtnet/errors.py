"""Exception hierarchy shared across the package."""


class PvtError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PvtError, ValueError):
    """A caller violated a documented precondition."""


class ConfigError(PvtError, ValueError):
    """Configuration file or parameter-set rejected at parse/validation."""


class NumericsError(PvtError, ArithmeticError):
    """A numerical routine failed to converge to the requested tolerance.

    Carries the best available estimate and the achieved error bound so
    callers can decide whether to degrade gracefully.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class BranchCutError(NumericsError):
    """Argument sits exactly on a branch cut; the principal value is ambiguous."""


class DegenerateConfigError(PvtError, ValueError):
    """A parameter combination puts zero probability mass where mass is required."""
