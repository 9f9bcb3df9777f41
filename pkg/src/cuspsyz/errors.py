"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to:
0 ok, 2 input error, 3 unsupported geometry, 4 falsification or
contradiction, 5 resource budget.
"""

from __future__ import annotations


class CuspsyzError(Exception):
    exit_code = 1


class MalformedInputError(CuspsyzError, ValueError):
    exit_code = 2


class DuplicatePointError(MalformedInputError):
    exit_code = 2


class NotOnCurveError(MalformedInputError):
    exit_code = 2


class InvalidMapError(MalformedInputError):
    """A map P^2 -> P^2 with a rational base point."""

    exit_code = 2


class PreconditionError(MalformedInputError):
    exit_code = 2


class UnsupportedCurveError(CuspsyzError):
    """Singularities worse than A2, or a curve the pipeline cannot handle."""

    exit_code = 3

    def __init__(self, message: str, points=()):
        super().__init__(message)
        self.points = list(points)


class ContradictionError(CuspsyzError):
    """Input data contradicts a proven statement (so the input assumptions are wrong)."""

    exit_code = 4


class FalsificationError(CuspsyzError):
    """A search failed to produce an object whose existence is a theorem."""

    exit_code = 4


class ResourceBudgetError(CuspsyzError):
    exit_code = 5

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ConstructionFailedError(ResourceBudgetError):
    """Randomized construction exhausted its retries."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message, partial=None)
        self.diagnostics = diagnostics or []


class InternalError(CuspsyzError):
    exit_code = 1
