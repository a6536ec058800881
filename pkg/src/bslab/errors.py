"""Exception and warning types raised across the package."""

from __future__ import annotations


class BSLabError(Exception):
    """Base class for every error raised by bslab."""


class NotHermitian(BSLabError, ValueError):
    pass


class NoConvergence(BSLabError, RuntimeError):
    pass


class SingularOperator(BSLabError, ValueError):
    pass


class DimensionMismatch(BSLabError, ValueError):
    pass


class NotPositive(BSLabError, ValueError):
    pass


class TraceNotOne(BSLabError, ValueError):
    pass


class NotFullRank(BSLabError, ValueError):
    pass


class NotApplicable(BSLabError):
    """A theorem hypothesis fails.

    ``magnitude`` is the quantity compared against ``threshold`` (the
    hypothesis requires ``magnitude < threshold``).
    """

    def __init__(self, theorem: str, magnitude: float, threshold: float):
        self.theorem = theorem
        self.magnitude = magnitude
        self.threshold = threshold
        super().__init__(
            f"{theorem} hypothesis violated: {magnitude:.6g} >= {threshold:.6g}"
        )


class ConfigError(BSLabError, ValueError):
    pass


class ConditioningWarning(UserWarning):
    """Reference state is close to singular; values are exact but fragile."""
