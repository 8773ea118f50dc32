"""Archimedean copula construction and validation of the copula axioms.

A generator is a continuous, strictly decreasing, convex map phi on
(0, 1] with phi(1) = 0; the induced coupling is

    A(x, y) = phi_inv(min(phi(x) + phi(y), phi(0+)))

with the pseudo-inverse convention that arguments at or beyond phi(0+)
map to 0.  Inversion is done by bisection on [0, 1], which works for any
valid generator expression; closed-form inverses serve as test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .core import NumericDomainError
from .expr import BivariateFn, UnivariateFn, as_univariate

__all__ = [
    "InvalidGeneratorError",
    "Generator",
    "CopulaReport",
    "archimedean",
    "validate_copula",
]

_BISECTION_TOL = 1e-14
_BISECTION_STEPS = 60


class InvalidGeneratorError(ValueError):
    """The proposed generator violates a generator invariant."""


@dataclass
class Generator:
    """Validated copula generator with its sampled shape diagnostics."""

    phi: UnivariateFn
    phi_at_zero: float
    strictly_decreasing: bool
    convex: bool
    value_at_one: float

    @classmethod
    def from_expression(cls, phi, samples: int = 257, tol: float = 1e-9) -> "Generator":
        """Validate phi on a sampled grid: strictly decreasing, convex
        (second differences >= -tol), and phi(1) = 0 within 1e-12."""
        phi = as_univariate(phi)
        v1 = float(phi(1.0))
        if not (math.isfinite(v1) and abs(v1) <= 1e-12):
            raise InvalidGeneratorError(f"generator must satisfy phi(1) = 0, got {v1}")
        grid = np.linspace(1e-6, 1.0, samples)
        vals = phi(grid)
        if not np.all(np.isfinite(vals)):
            raise InvalidGeneratorError("generator is not finite on (0, 1]")
        diffs = np.diff(vals)
        decreasing = bool(np.all(diffs < 0.0))
        convex = bool(np.all(np.diff(vals, 2) >= -tol))
        if not decreasing:
            raise InvalidGeneratorError("generator is not strictly decreasing on (0, 1]")
        if not convex:
            raise InvalidGeneratorError("generator is not convex on (0, 1]")
        v0 = float(phi(0.0))
        if math.isnan(v0):
            v0 = float(phi(1e-300))
        if not math.isfinite(v0) or v0 > 1e15:
            v0 = math.inf
        return cls(
            phi=phi,
            phi_at_zero=v0,
            strictly_decreasing=decreasing,
            convex=convex,
            value_at_one=v1,
        )

    def inverse(self, s):
        """Pseudo-inverse by bisection: phi_inv(s) for s >= 0, clamped to 0
        once s reaches phi(0+)."""
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s).astype(float)
        lo = np.zeros_like(s)
        hi = np.ones_like(s)
        with np.errstate(all="ignore"):
            for _ in range(_BISECTION_STEPS):
                mid = 0.5 * (lo + hi)
                vm = np.asarray(self.phi(mid), dtype=float)
                # phi decreasing: value above target -> root is to the right
                above = vm > s
                lo = np.where(above, mid, lo)
                hi = np.where(above, hi, mid)
                if float(np.max(hi - lo)) <= _BISECTION_TOL:
                    break
        out = 0.5 * (lo + hi)
        out[s <= 0.0] = 1.0
        if math.isfinite(self.phi_at_zero):
            out[s >= self.phi_at_zero] = 0.0
        else:
            out[np.isinf(s)] = 0.0
        if scalar:
            return float(out[0])
        return out


def archimedean(gen) -> BivariateFn:
    """Coupling A(x, y) = phi_inv(phi(x) + phi(y)) from a generator.

    Accepts a Generator, a univariate expression string, or a callable;
    generator invariants are validated before construction.
    """
    if not isinstance(gen, Generator):
        gen = Generator.from_expression(gen)
    phi = gen.phi

    def fn(x, y):
        with np.errstate(all="ignore"):
            s = np.asarray(phi(np.asarray(x, dtype=float)), dtype=float) + np.asarray(
                phi(np.asarray(y, dtype=float)), dtype=float
            )
        return gen.inverse(s)

    label = getattr(phi, "name", None) or "phi"
    out = BivariateFn.from_callable(fn, name=f"archimedean({label})")
    out.generator = gen
    return out


@dataclass(frozen=True)
class CopulaReport:
    """Boundary and 2d-monotonicity diagnostics for a candidate copula."""

    boundary_max_error: float
    boundary_witness_condition: str
    boundary_witness_point: tuple
    min_cell_measure: float
    grid: int
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "boundary_max_error": self.boundary_max_error,
            "boundary_witness_condition": self.boundary_witness_condition,
            "boundary_witness_point": list(self.boundary_witness_point),
            "min_cell_measure": self.min_cell_measure,
            "grid": self.grid,
            "tol": self.tol,
            "pass": self.passed,
        }


def validate_copula(C, grid: int = 64, tol: float = 1e-9) -> CopulaReport:
    """Check the boundary conditions and 2-increasing property on a grid.

    Boundary conditions: C(x,0) = 0, C(0,y) = 0, C(x,1) = x, C(1,y) = y
    at grid+1 points each; 2d-monotonicity via the cell measures of a
    grid x grid lattice on the unit square.
    """
    from .expr import as_bivariate

    C = as_bivariate(C)
    ts = np.linspace(0.0, 1.0, grid + 1)
    zeros = np.zeros_like(ts)
    ones = np.ones_like(ts)
    conditions = {
        "C(x,0)=0": np.abs(C(ts, zeros)),
        "C(0,y)=0": np.abs(C(zeros, ts)),
        "C(x,1)=x": np.abs(C(ts, ones) - ts),
        "C(1,y)=y": np.abs(C(ones, ts) - ts),
    }
    worst_cond, worst_idx, worst_err = "", 0, -1.0
    for cond, errs in conditions.items():
        if not np.all(np.isfinite(errs)):
            raise NumericDomainError(f"candidate copula undefined on boundary ({cond})")
        i = int(np.argmax(errs))
        if float(errs[i]) > worst_err:
            worst_cond, worst_idx, worst_err = cond, i, float(errs[i])
    if "x," in worst_cond:
        witness = (float(ts[worst_idx]), 0.0 if "0" in worst_cond else 1.0)
    else:
        witness = (0.0 if "0" in worst_cond else 1.0, float(ts[worst_idx]))

    V = C(ts[:, None], ts[None, :])
    if not np.all(np.isfinite(V)):
        raise NumericDomainError("candidate copula undefined on the unit square")
    cells = V[:-1, :-1] - V[:-1, 1:] - V[1:, :-1] + V[1:, 1:]
    min_cell = float(cells.min())
    return CopulaReport(
        boundary_max_error=worst_err,
        boundary_witness_condition=worst_cond,
        boundary_witness_point=witness,
        min_cell_measure=min_cell,
        grid=grid,
        tol=tol,
        passed=bool(worst_err <= tol and min_cell >= -tol),
    )
