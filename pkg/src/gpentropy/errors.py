"""Exception types shared across the package."""


class GPEError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GPEError, ValueError):
    """Invalid user input: malformed series, out-of-range order, bad window."""


class InsufficientDataError(ValidationError):
    """Too few observations for the requested order, delay or window."""


class ResourceGuardError(GPEError):
    """A computation was refused because it would exceed a configured budget."""


class InternalConsistencyError(GPEError, AssertionError):
    """An exact identity that must hold did not; indicates a bug."""
