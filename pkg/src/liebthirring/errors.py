"""Exception hierarchy shared by all modules."""


class LiebThirringError(Exception):
    """Base class for computational errors raised by this package."""


class DomainError(LiebThirringError, ValueError):
    """An argument lies outside the domain of a formula."""


class EmptySpectrumError(LiebThirringError, ValueError):
    """The requested cutoff lies below the first nonzero eigenvalue."""


class OutOfRangeError(LiebThirringError, ValueError):
    """A truncated spectrum was asked about energies beyond its cutoff."""


class InconclusiveError(LiebThirringError):
    """The ratio minimiser was not bracketed and no tail limit is known."""


class MeasureMismatchError(LiebThirringError, ValueError):
    """A trial family and a constant use different measure conventions."""


class InsufficientSamplesError(LiebThirringError):
    """Monte Carlo standard error is too large relative to the estimate."""


class CertificationError(LiebThirringError):
    """A trial family violated the inequality it was checked against."""

    def __init__(self, message, reports=None):
        super().__init__(message)
        self.reports = reports or []
