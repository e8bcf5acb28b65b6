"""Exception hierarchy shared by every sampler in the package."""


class HawkesExactError(Exception):
    """Base class for all package errors."""


class ModelError(HawkesExactError, ValueError):
    """Invalid or unstable model parameters."""


class DomainError(HawkesExactError, ValueError):
    """Argument outside the domain of a moment generating function."""


class TiltInfeasible(HawkesExactError):
    """No finite root of a cumulant fixed-point equation at the requested tilt."""


class SupercriticalTilt(TiltInfeasible):
    """The tilted branching ratio is not below one."""


class NoRoot(HawkesExactError):
    """The walk c.g.f. has no positive zero inside the feasible range."""

    def __init__(self, message, boundary=None):
        super().__init__(message)
        self.boundary = boundary


class DegenerateEta(HawkesExactError):
    """A tilt of exactly zero where a strictly positive one is needed."""


class HardCapExceeded(HawkesExactError, RuntimeError):
    """A defensive iteration cap was hit (never expected in normal use)."""


class EnvelopeUnavailable(HawkesExactError):
    """No thinning envelope is available for the excitation kernel."""


class IncompleteLedger(HawkesExactError, IndexError):
    """A ledger query reaches past the range that has been generated."""
