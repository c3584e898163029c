"""Exception hierarchy shared by all modules."""


class KinkernelError(Exception):
    """Base class for errors raised by the package."""


class DomainError(KinkernelError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class SingularityError(DomainError):
    """A formula was evaluated exactly at one of its singular points."""


class ConvergenceError(KinkernelError, RuntimeError):
    """A quadrature did not reach its tolerance within the panel budget.

    Parameters
    ----------
    message : str
        Human readable description.
    partial : float, optional
        Best value obtained before giving up.
    error : float, optional
        Error estimate attached to ``partial``.
    """

    def __init__(self, message, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


class VerificationError(KinkernelError):
    """A numerical verification exceeded its declared tolerance."""
