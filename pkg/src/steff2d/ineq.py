"""Integral identity and inequality checkers for bivariate weights.

Covers the two integration-by-parts identities (young1/young2), the
integral sign inequalities for 2d-monotone decreasing / increasing /
alternating multipliers (thm3/thm4/remark3), the trigonometric-kernel
sign checks, the Stieltjes integration-by-parts identity, the
double-sum-versus-double-integral identity with fractional-part weights,
and the mixed-partial consistency check (lemma1).

Every theorem checker runs in diagnostic mode: hypothesis flags are
computed independently and reported, and the inequality is evaluated
whether or not the hypotheses hold, so a failed inequality under failed
hypotheses is not a bug signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import IdentityResidual, Rect
from .expr import Bin, Call, Var, as_bivariate, as_univariate
from .monotone import (
    ALTERNATING_2D,
    INDEFINITE,
    MODULAR,
    MONOTONE_2D,
    AcFunction,
    MonotonicityReport,
    certify,
)
from .quad import (
    DEFAULT_SPEC,
    QuadratureSpec,
    cumulative,
    integrate1d,
    integrate2d,
    stieltjes2d,
)

__all__ = [
    "YoungResult",
    "young_residual",
    "TheoremReport",
    "steffensen_integral",
    "FourierCheck",
    "fourier_check",
    "BypartsResult",
    "byparts_residual",
    "sum_vs_integral",
    "Lemma1Report",
    "lemma1_check",
]


def _require_symbolic(f, who: str):
    f = as_bivariate(f)
    if not f.has_symbolic_partials:
        raise ValueError(f"{who} requires an expression-backed function with symbolic partials")
    return f


# ---------------------------------------------------------------------------
# Young-type integration-by-parts identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class YoungResult:
    """Residual of an integration-by-parts identity plus its four terms.

    rhs = corner_term + edge_x_term + edge_y_term + mixed_term; the edge
    terms carry their signs (negative for the young1 layout, positive for
    young2).
    """

    variant: str
    residual: IdentityResidual
    corner_term: float
    edge_x_term: float
    edge_y_term: float
    mixed_term: float

    def to_dict(self) -> dict:
        out = {"variant": self.variant}
        out.update(self.residual.to_dict())
        out.update(
            {
                "corner_term": self.corner_term,
                "edge_x_term": self.edge_x_term,
                "edge_y_term": self.edge_y_term,
                "mixed_term": self.mixed_term,
            }
        )
        return out


def young_residual(variant: str, f, w, rect: Rect,
                   spec: Optional[QuadratureSpec] = None,
                   tolerance: float = 1e-6) -> YoungResult:
    """Check one of the two bivariate integration-by-parts identities.

    young1:  int f w = f(b,d) W(b,d) - int f_x(x,d) W(x,d) dx
             - int W(b,y) f_y(b,y) dy + int int W f_xy,
             with W the primitive from the lower-left corner.
    young2:  the mirrored form with the upper-right primitive, corner
             value at (a,c), and plus signs on the edge terms.
    """
    if variant not in ("Y1", "Y2", "young1", "young2"):
        raise ValueError("variant must be 'Y1'/'young1' or 'Y2'/'young2'")
    variant = "Y1" if variant in ("Y1", "young1") else "Y2"
    spec = spec or DEFAULT_SPEC
    f = _require_symbolic(f, "young_residual")
    w = as_bivariate(w)
    fx = f.symbolic_partial("x")
    fy = f.symbolic_partial("y")
    fxy = f.mixed_partial()
    a, b, c, d = rect.as_tuple()

    lhs = integrate2d(lambda x, y: f(x, y) * w(x, y), rect, spec).value

    if variant == "Y1":
        W = cumulative(w, rect, "lower", spec)
        corner = float(f(b, d)) * W(b, d)
        edge_x = -integrate1d(lambda t: fx(t, d) * W(t, d), a, b, spec).value
        edge_y = -integrate1d(lambda t: W(b, t) * fy(b, t), c, d, spec).value
    else:
        W = cumulative(w, rect, "upper", spec)
        corner = float(f(a, c)) * W(a, c)
        edge_x = integrate1d(lambda t: W(t, c) * fx(t, c), a, b, spec).value
        edge_y = integrate1d(lambda t: W(a, t) * fy(a, t), c, d, spec).value
    mixed = integrate2d(lambda x, y: W(x, y) * fxy(x, y), rect, spec).value
    rhs = corner + edge_x + edge_y + mixed
    return YoungResult(
        variant=variant,
        residual=IdentityResidual.from_pair(lhs, rhs, tolerance),
        corner_term=float(corner),
        edge_x_term=float(edge_x),
        edge_y_term=float(edge_y),
        mixed_term=float(mixed),
    )


# ---------------------------------------------------------------------------
# Sign inequalities for monotone / alternating multipliers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one integral sign inequality with hypothesis diagnostics.

    For thm3/thm4 the inequality is lhs >= bound - tol with lhs the
    integral of f*w; for remark3 both sides are reported negated (the
    natural orientation of the alternating variant) and the inequality is
    lhs <= bound + tol.
    """

    theorem: str
    lhs: float
    bound: float
    tol: float
    inequality_holds: bool
    monotonicity: MonotonicityReport
    f_nonnegative: bool
    edge_hypothesis: bool
    primitive_min: float
    primitive_max: float
    primitive_ok: bool
    hypotheses_hold: bool

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "lhs": self.lhs,
            "bound": self.bound,
            "tol": self.tol,
            "inequality_holds": self.inequality_holds,
            "monotonicity": self.monotonicity.to_dict(),
            "f_nonnegative": self.f_nonnegative,
            "edge_hypothesis": self.edge_hypothesis,
            "primitive_min": self.primitive_min,
            "primitive_max": self.primitive_max,
            "primitive_ok": self.primitive_ok,
            "hypotheses_hold": self.hypotheses_hold,
        }


def _edge_increasing(f, er: Rect, grid: int, tol: float) -> tuple[bool, bool]:
    """Lattice check that x -> f(x, d) and y -> f(b, y) are nondecreasing."""
    top = f(er.xs(grid), er.d)
    right = f(er.b, er.ys(grid))
    return (
        bool(np.all(np.diff(top) >= -tol)),
        bool(np.all(np.diff(right) >= -tol)),
    )


def steffensen_integral(theorem: str, f, w, rect: Rect, grid: int = 32,
                        spec: Optional[QuadratureSpec] = None,
                        margin: float = 0.0, tol: float = 1e-9) -> TheoremReport:
    """Evaluate one of the three integral sign inequalities.

    thm3:    f 2d-monotone with decreasing top/right edges, primitive
             W >= 0 from the lower-left corner; then int f w >= f(b,d) W(b,d).
    thm4:    f nonnegative 2d-monotone with increasing bottom/left edges,
             upper primitive >= 0; then int f w >= f(a,c) W~(a,c).
    remark3: f 2d-alternating with increasing top/right edges, W <= 0;
             reported in the negated orientation
             int f(-w) <= f(b,d) (-W(b,d)) + tol.
    """
    if theorem not in ("thm3", "thm4", "remark3"):
        raise ValueError("theorem must be 'thm3', 'thm4', or 'remark3'")
    spec = spec or DEFAULT_SPEC
    f = as_bivariate(f)
    w = as_bivariate(w)
    r = rect.shrink(margin) if margin else rect
    a, b, c, d = r.as_tuple()

    report = certify(f, r, grid=grid, tol=tol)
    lhs_fw = integrate2d(lambda x, y: f(x, y) * w(x, y), r, spec).value

    if theorem == "thm4":
        P = cumulative(w, r, "upper", spec)
        extr = P.lattice_extrema(grid)
        primitive_ok = extr.minimum >= -tol
        corner = float(f(a, c)) * P(a, c)
        lhs, bound = lhs_fw, corner
        holds = lhs >= bound - tol
        mono_ok = report.min_measure >= -tol
        edge_ok = report.edge_bottom_increasing and report.edge_left_increasing
        hyp = mono_ok and edge_ok and primitive_ok and report.nonnegative
    else:
        P = cumulative(w, r, "lower", spec)
        extr = P.lattice_extrema(grid)
        corner = float(f(b, d)) * P(b, d)
        if theorem == "thm3":
            primitive_ok = extr.minimum >= -tol
            lhs, bound = lhs_fw, corner
            holds = lhs >= bound - tol
            mono_ok = report.min_measure >= -tol
            edge_ok = report.edge_top_decreasing and report.edge_right_decreasing
            hyp = mono_ok and edge_ok and primitive_ok
        else:
            primitive_ok = extr.maximum <= tol
            lhs, bound = -lhs_fw, -corner
            holds = lhs <= bound + tol
            alt_ok = report.max_measure <= tol
            top_inc, right_inc = _edge_increasing(f, report.eval_rect, grid, tol)
            edge_ok = top_inc and right_inc
            hyp = alt_ok and edge_ok and primitive_ok

    return TheoremReport(
        theorem=theorem,
        lhs=float(lhs),
        bound=float(bound),
        tol=tol,
        inequality_holds=bool(holds),
        monotonicity=report,
        f_nonnegative=report.nonnegative,
        edge_hypothesis=bool(edge_ok),
        primitive_min=extr.minimum,
        primitive_max=extr.maximum,
        primitive_ok=bool(primitive_ok),
        hypotheses_hold=bool(hyp),
    )


# ---------------------------------------------------------------------------
# Trigonometric-kernel sign checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierCheck:
    """Value and expected sign of one trigonometric-kernel integral."""

    kernel: str
    m: int
    n: int
    value: float
    error_estimate: float
    expected_sign: str  # "nonnegative" | "unconstrained"
    sign_ok: bool
    profile_monotone: Optional[bool]
    profile_convex: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "m": self.m,
            "n": self.n,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "expected_sign": self.expected_sign,
            "sign_ok": self.sign_ok,
            "profile_monotone": self.profile_monotone,
            "profile_convex": self.profile_convex,
        }


def _profile_shape(F, lo: float, hi: float) -> tuple[bool, bool]:
    ts = np.linspace(lo, hi, 513)
    vals = F(ts)
    scale = 1e-9 * max(1.0, float(np.max(np.abs(vals))))
    diffs = np.diff(vals)
    monotone = bool(np.all(diffs >= -scale) or np.all(diffs <= scale))
    convex = bool(np.all(np.diff(vals, 2) >= -scale))
    return monotone, convex


def fourier_check(kernel: str, f, m: int = 1, n: int = 1,
                  spec: Optional[QuadratureSpec] = None,
                  sign_tol: float = 1e-8) -> FourierCheck:
    """Integrate f against a sin/cos kernel and compare against its sign claim.

    Kernels: "sinsin2d" integrates f(s+t) sin(ms) sin(nt) over [0, 2pi]^2
    for univariate f on [0, 4pi] (sign claim: nonnegative for monotone
    convex f); "coscos2d" integrates a bivariate convex f against
    cos(mx) cos(ny) (nonnegative); "cos1d" and "sin1d" are the classical
    one-variable integrals over [0, 2pi] indexed by n (cos: nonnegative
    for convex f; sin: unconstrained).
    """
    if kernel not in ("sinsin2d", "coscos2d", "cos1d", "sin1d"):
        raise ValueError(f"unknown kernel {kernel!r}")
    if m < 1 or n < 1:
        raise ValueError("kernel indices m, n must be positive integers")
    spec = spec or DEFAULT_SPEC
    two_pi = 2.0 * math.pi
    osc_cells = max(spec.cells, 2 * max(m, n))
    spec_osc = QuadratureSpec(
        cells=osc_cells, points=spec.points, max_refine=spec.max_refine,
        tol=spec.tol, max_cells=spec.max_cells,
    )

    profile_monotone = profile_convex = None
    if kernel == "sinsin2d":
        F = as_univariate(f)
        profile_monotone, profile_convex = _profile_shape(F, 0.0, 4.0 * math.pi)
        value, err = integrate2d(
            lambda x, y: F(x + y) * np.sin(m * x) * np.sin(n * y),
            Rect(0.0, two_pi, 0.0, two_pi), spec_osc,
        )
        expected = "nonnegative"
    elif kernel == "coscos2d":
        G = as_bivariate(f)
        value, err = integrate2d(
            lambda x, y: G(x, y) * np.cos(m * x) * np.cos(n * y),
            Rect(0.0, two_pi, 0.0, two_pi), spec_osc,
        )
        expected = "nonnegative"
    else:
        F = as_univariate(f)
        profile_monotone, profile_convex = _profile_shape(F, 0.0, two_pi)
        osc = np.cos if kernel == "cos1d" else np.sin
        value, err = integrate1d(lambda t: F(t) * osc(n * t), 0.0, two_pi, spec_osc)
        expected = "nonnegative" if kernel == "cos1d" else "unconstrained"

    sign_ok = True if expected == "unconstrained" else bool(value >= -sign_tol)
    return FourierCheck(
        kernel=kernel,
        m=m,
        n=n,
        value=float(value),
        error_estimate=float(err),
        expected_sign=expected,
        sign_ok=sign_ok,
        profile_monotone=profile_monotone,
        profile_convex=profile_convex,
    )


# ---------------------------------------------------------------------------
# Stieltjes integration by parts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BypartsResult:
    """Residual of the Stieltjes integration-by-parts identity.

    The left side interprets the g-measure through the mixed density of
    g's absolutely continuous representation; the identity is confirmed
    numerically when g vanishes on the lower-left edges, which
    ``edge_vanishing`` reports.
    """

    residual: IdentityResidual
    corner_term: float
    edge_x_term: float
    edge_y_term: float
    stieltjes_term: float
    edge_vanishing: bool

    def to_dict(self) -> dict:
        out = self.residual.to_dict()
        out.update(
            {
                "corner_term": self.corner_term,
                "edge_x_term": self.edge_x_term,
                "edge_y_term": self.edge_y_term,
                "stieltjes_term": self.stieltjes_term,
                "edge_vanishing": self.edge_vanishing,
            }
        )
        return out


def byparts_residual(f, g: AcFunction, rect: Rect,
                     spec: Optional[QuadratureSpec] = None,
                     tolerance: float = 1e-6, partition: int = 64,
                     doublings: int = 3, edge_tol: float = 1e-9) -> BypartsResult:
    """Check int f dg = f(b,d) g(b,d) - int f_x(.,d) g(.,d) - int f_y(b,.) g(b,.)
    + int g df, with int f dg computed as the integral of f times g's
    mixed density."""
    spec = spec or DEFAULT_SPEC
    f = _require_symbolic(f, "byparts_residual")
    if not isinstance(g, AcFunction):
        raise TypeError("g must be built via from_ac so its mixed density is known")
    fx = f.symbolic_partial("x")
    fy = f.symbolic_partial("y")
    a, b, c, d = rect.as_tuple()

    if g.density is not None:
        lhs = integrate2d(lambda x, y: f(x, y) * g.density(x, y), rect, spec).value
    else:
        lhs = 0.0
    corner = float(f(b, d)) * float(g(b, d))
    edge_x = -integrate1d(lambda t: fx(t, d) * g(t, d), a, b, spec).value
    edge_y = -integrate1d(lambda t: fy(b, t) * g(b, t), c, d, spec).value
    stj = stieltjes2d(g, f, rect, partition=partition, tol=spec.tol, doublings=doublings)
    rhs = corner + edge_x + edge_y + stj.value

    xs, ys = rect.xs(64), rect.ys(64)
    left_edge = np.max(np.abs(g(np.full_like(ys, a), ys)))
    bottom_edge = np.max(np.abs(g(xs, np.full_like(xs, c))))
    return BypartsResult(
        residual=IdentityResidual.from_pair(lhs, rhs, tolerance),
        corner_term=float(corner),
        edge_x_term=float(edge_x),
        edge_y_term=float(edge_y),
        stieltjes_term=float(stj.value),
        edge_vanishing=bool(max(left_edge, bottom_edge) <= edge_tol),
    )


# ---------------------------------------------------------------------------
# Double sums versus double integrals with fractional-part weights
# ---------------------------------------------------------------------------

def sum_vs_integral(f, rect: Rect, spec: Optional[QuadratureSpec] = None,
                    tolerance: float = 1e-6) -> IdentityResidual:
    """Check sum_{a<m<=b} sum_{c<n<=d} f(m,n) against the four-term integral
    form with fractional-part weights, on a rectangle with integer corners.

    The quadrature aligns cell boundaries with every interior integer so
    each cell sees a smooth piece of the sawtooth weights.
    """
    spec = spec or DEFAULT_SPEC
    f = _require_symbolic(f, "sum_vs_integral")
    a, b, c, d = rect.as_tuple()
    for v in (a, b, c, d):
        if v != int(v):
            raise ValueError("rectangle corners must be integers")
    fx = f.symbolic_partial("x")
    fy = f.symbolic_partial("y")
    fxy = f.mixed_partial()

    ms = np.arange(int(a) + 1, int(b) + 1, dtype=float)
    ns = np.arange(int(c) + 1, int(d) + 1, dtype=float)
    lhs = float(np.asarray(f(ms[:, None], ns[None, :])).sum())

    frac_x = Bin("-", Var("x"), Call("floor", (Var("x"),)))
    frac_y = Bin("-", Var("y"), Call("floor", (Var("y"),)))
    sx = as_bivariate(frac_x)
    sy = as_bivariate(frac_y)

    breaks_x = tuple(float(k) for k in range(int(a) + 1, int(b)))
    breaks_y = tuple(float(k) for k in range(int(c) + 1, int(d)))
    spec_b = spec.with_breaks(breaks_x, breaks_y)

    t0 = integrate2d(f, rect, spec_b).value
    t1 = integrate2d(lambda x, y: fx(x, y) * sx(x, y), rect, spec_b).value
    t2 = integrate2d(lambda x, y: fy(x, y) * sy(x, y), rect, spec_b).value
    t3 = integrate2d(lambda x, y: fxy(x, y) * sx(x, y) * sy(x, y), rect, spec_b).value
    rhs = t0 + t1 + t2 + t3
    return IdentityResidual.from_pair(lhs, rhs, tolerance)


# ---------------------------------------------------------------------------
# Mixed-partial consistency (the calculus criterion for 2d-monotonicity)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lemma1Report:
    """Verdict-versus-mixed-partial consistency at lattice resolution."""

    verdict: str
    mixed_min: float
    mixed_max: float
    mixed_sign: str  # "nonnegative" | "nonpositive" | "zero" | "indefinite"
    consistent: bool
    grid: int
    tol: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "mixed_min": self.mixed_min,
            "mixed_max": self.mixed_max,
            "mixed_sign": self.mixed_sign,
            "consistent": self.consistent,
            "grid": self.grid,
            "tol": self.tol,
        }


def lemma1_check(f, rect: Rect, grid: int = 32, tol: float = 1e-9) -> Lemma1Report:
    """Compare the grid verdict with the sign of the symbolic mixed partial.

    For continuously differentiable f with a continuous mixed partial,
    2d-monotonicity is equivalent to a nonnegative mixed partial, so the
    two classifications must agree on smooth inputs.
    """
    f = _require_symbolic(f, "lemma1_check")
    report = certify(f, rect, grid=grid, tol=tol)
    fxy = f.mixed_partial()
    er = report.eval_rect
    xs, ys = er.xs(grid)[1:-1], er.ys(grid)[1:-1]
    M = np.asarray(fxy(xs[:, None], ys[None, :]))
    mixed_min, mixed_max = float(M.min()), float(M.max())
    nonneg = mixed_min >= -tol
    nonpos = mixed_max <= tol
    if nonneg and nonpos:
        sign = "zero"
    elif nonneg:
        sign = "nonnegative"
    elif nonpos:
        sign = "nonpositive"
    else:
        sign = "indefinite"
    consistent = {
        MONOTONE_2D: "nonnegative",
        ALTERNATING_2D: "nonpositive",
        MODULAR: "zero",
        INDEFINITE: "indefinite",
    }[report.verdict] == sign
    return Lemma1Report(
        verdict=report.verdict,
        mixed_min=mixed_min,
        mixed_max=mixed_max,
        mixed_sign=sign,
        consistent=bool(consistent),
        grid=grid,
        tol=tol,
    )
