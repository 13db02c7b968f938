class LetqError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(LetqError, ValueError):
    """Parameters outside the range an operation supports."""


class CapacityError(LetqError):
    """Requested topology is wider than the configured limit."""


class UnsupportedFamilyError(LetqError):
    """Operation is only defined for another topology family."""


class UnsupportedRegimeError(LetqError):
    """No construction is known for the requested parameter combination."""


class InputError(LetqError):
    """Malformed user input such as an unknown vertex label."""
