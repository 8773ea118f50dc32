"""Shared geometry, result, and error types used across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Steff2dError",
    "NumericDomainError",
    "ConvergenceError",
    "Rect",
    "IdentityResidual",
]


class Steff2dError(Exception):
    """Base class for numeric failures raised by this package."""


class NumericDomainError(Steff2dError):
    """A function evaluation produced NaN/inf inside the requested domain."""


class ConvergenceError(Steff2dError):
    """A refinement loop hit its limit before reaching the target tolerance."""


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle [a, b] x [c, d] with a < b and c < d."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"rectangle corners must be finite, got {vals}")
        if not (self.a < self.b and self.c < self.d):
            raise ValueError(f"degenerate rectangle [{self.a},{self.b}]x[{self.c},{self.d}]")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def height(self) -> float:
        return self.d - self.c

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def shrink(self, margin: float) -> "Rect":
        """Rectangle with every side moved inward by ``margin``."""
        if margin == 0.0:
            return self
        if margin < 0:
            raise ValueError("margin must be nonnegative")
        if 2 * margin >= min(self.width, self.height):
            raise ValueError(f"margin {margin} collapses rectangle {self}")
        return Rect(self.a + margin, self.b - margin, self.c + margin, self.d - margin)

    def xs(self, n: int) -> np.ndarray:
        """n+1 equispaced abscissae from a to b."""
        return np.linspace(self.a, self.b, n + 1)

    def ys(self, n: int) -> np.ndarray:
        return np.linspace(self.c, self.d, n + 1)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


@dataclass(frozen=True)
class IdentityResidual:
    """Two-sided identity evaluation with absolute/relative residuals.

    ``passed`` is true when either the absolute or the relative residual
    is within ``tolerance``; the relative residual is measured against
    max(1, |lhs|).
    """

    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    tolerance: float
    passed: bool

    @classmethod
    def from_pair(cls, lhs: float, rhs: float, tolerance: float) -> "IdentityResidual":
        abs_res = abs(lhs - rhs)
        rel_res = abs_res / max(1.0, abs(lhs))
        return cls(
            lhs=float(lhs),
            rhs=float(rhs),
            abs_residual=float(abs_res),
            rel_residual=float(rel_res),
            tolerance=float(tolerance),
            passed=bool(abs_res <= tolerance or rel_res <= tolerance),
        )

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
