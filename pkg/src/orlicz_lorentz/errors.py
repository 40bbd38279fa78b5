"""Exception types shared by the package."""


class OrliczLorentzError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OrliczLorentzError, ValueError):
    """An argument lies outside the domain of the operation."""


class RejectedInputError(OrliczLorentzError, ValueError):
    """Input data violates a documented precondition."""


class SizeError(OrliczLorentzError, ValueError):
    """A brute-force or optimisation routine was asked for too many cells."""


class ModeError(OrliczLorentzError, ValueError):
    """The requested evaluation mode is not valid for the given function."""


class InvariantError(OrliczLorentzError, AssertionError):
    """Two independent computations of the same quantity disagree."""
