"""Exception hierarchy shared by every semiflow module."""


class SemiflowError(Exception):
    """Base class for all errors raised by semiflow."""


class DomainEscape(SemiflowError):
    """A trajectory or series centre left the numerically safe disc.

    ``exit_time`` is the (bisected) time of the crossing and ``point`` the
    starting point of the offending trajectory, when known.
    """

    def __init__(self, message, exit_time=None, point=None):
        super().__init__(message)
        self.exit_time = exit_time
        self.point = point


class NoConvergence(SemiflowError):
    """An iterative procedure stopped before reaching its tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class UnknownCatalogEntry(SemiflowError, KeyError):
    pass


class ConfigError(SemiflowError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """Composition with a non-centred inner series may carry tail error."""
