"""Exception types raised across the package."""

from __future__ import annotations


class LmapsError(Exception):
    """Base class for all package errors."""


class PoleAtOne(LmapsError, ValueError):
    """Evaluation requested at the pole s = 1 of a principal L-function."""


class NotPrimitive(LmapsError, ValueError):
    pass


class NonConvergent(LmapsError, ArithmeticError):
    pass


class BoundaryTooClose(LmapsError, ArithmeticError):
    """A contour passes too close to a zero (or pole) after all perturbations."""


class BranchPointEncountered(LmapsError):
    """A curve trace ran into a zero of the derivative.

    ``partial`` holds the vertices traced so far and ``location`` the
    approximate branch point.
    """

    def __init__(self, message, partial=None, location=None):
        super().__init__(message)
        self.partial = partial
        self.location = location


class SeedNotOnCurve(LmapsError, ValueError):
    pass


class WindowTooSmall(LmapsError, ValueError):
    pass


class IncompleteStrip(LmapsError, ValueError):
    pass
