"""Exception and warning types shared across the package."""


class BetheCorrError(Exception):
    """Base class for all package errors."""


class CoincidingArguments(BetheCorrError, ValueError):
    """Two arguments sit on a pole of a rational function."""


class CapExceeded(BetheCorrError, ValueError):
    """An enumeration or recursion size cap was exceeded."""


class NotSquare(BetheCorrError, ValueError):
    pass


class DomainError(BetheCorrError, ValueError):
    pass


class CardinalityMismatch(BetheCorrError, ValueError):
    pass


class MaxIterations(BetheCorrError, RuntimeError):
    """Newton iteration ran out of steps; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class IllConditioned(BetheCorrError, RuntimeError):
    pass


class NotOnShell(BetheCorrError, ValueError):
    pass


class NotAString(BetheCorrError, ValueError):
    pass


class PoleAtS(BetheCorrError, ValueError):
    pass


class PoleAtGamma(BetheCorrError, ValueError):
    pass


class NonTerminating(BetheCorrError, ValueError):
    pass


class IndexOutOfRange(BetheCorrError, IndexError):
    pass


class NotConverged(BetheCorrError, RuntimeError):
    pass


class BranchWarning(UserWarning):
    """A logarithm argument landed on the negative real axis."""


class RegimeWarning(UserWarning):
    """Parameters lie outside the regime where an oracle's tolerances are claimed."""
