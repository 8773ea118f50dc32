"""Quadrature engines: 2D Riemann integration, cumulative primitives,
Riemann-Stieltjes sums against 2d-monotone integrators, and mollifiers.

The Riemann integrators use composite tensor-product Gauss-Legendre rules
(fixed order per cell) refined by adaptive dyadic bisection: a cell is
frozen once the difference between its value and the sum over its four
children drops below its area share of the global tolerance.  Cumulative
primitives are stored as per-cell Legendre coefficient tensors whose
antiderivatives are evaluated exactly, which makes W(x, y) cheap at
arbitrary points and exactly zero on its base edges.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .core import ConvergenceError, IdentityResidual, NumericDomainError, Rect
from .expr import BivariateFn, as_bivariate

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "integrate1d",
    "integrate2d",
    "Antiderivative1D",
    "CumulativePrimitive",
    "cumulative",
    "StieltjesResult",
    "stieltjes2d",
    "stieltjes_vs_riemann",
    "Mollifier",
    "bump_normalization",
    "make_mollifier",
    "mollify",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Parameters shared by the quadrature routines.

    cells       cells per axis at the coarsest level
    points      Gauss-Legendre points per cell per axis
    max_refine  refinement (bisection) sweeps before giving up
    tol         target tolerance for the global estimate
    breaks_x/y  interior abscissae the cell boundaries must align with
                (used for integrands with floor-type discontinuities)
    max_cells   safety cap on the number of simultaneously active cells
    """

    cells: int = 4
    points: int = 8
    max_refine: int = 14
    tol: float = 1e-8
    breaks_x: tuple = ()
    breaks_y: tuple = ()
    max_cells: int = 1 << 18

    def __post_init__(self):
        if self.cells < 1 or self.points < 1 or self.max_refine < 0:
            raise ValueError("cells and points must be >= 1, max_refine >= 0")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    def with_breaks(self, breaks_x=(), breaks_y=()) -> "QuadratureSpec":
        return replace(self, breaks_x=tuple(breaks_x), breaks_y=tuple(breaks_y))


DEFAULT_SPEC = QuadratureSpec()


class QuadResult(NamedTuple):
    value: float
    error_estimate: float


@lru_cache(maxsize=None)
def _gauss(points: int):
    g, w = np.polynomial.legendre.leggauss(points)
    return g, w


@lru_cache(maxsize=None)
def _legendre_matrix(points: int) -> np.ndarray:
    # M[n, i] maps Gauss-Legendre samples to Legendre coefficients,
    # exact for the degree points-1 interpolant.
    g, w = _gauss(points)
    P = np.polynomial.legendre.legvander(g, points - 1).T  # (points, points)
    scale = (2.0 * np.arange(points) + 1.0) / 2.0
    return scale[:, None] * w[None, :] * P


def _q_values(xi: np.ndarray, points: int) -> np.ndarray:
    """Antiderivatives Q_n(xi) = int_{-1}^{xi} P_n, for n < points."""
    V = np.polynomial.legendre.legvander(xi, points)  # columns P_0 .. P_points
    Q = np.empty(xi.shape + (points,))
    Q[..., 0] = xi + 1.0
    for n in range(1, points):
        Q[..., n] = (V[..., n + 1] - V[..., n - 1]) / (2 * n + 1)
    return Q


def _boundaries(lo: float, hi: float, cells: int, breaks: Sequence[float]) -> np.ndarray:
    base = np.linspace(lo, hi, cells + 1)
    inner = [b for b in breaks if lo < b < hi]
    if inner:
        base = np.unique(np.concatenate([base, np.asarray(inner, dtype=float)]))
    return base


def _halve(boundaries: np.ndarray) -> np.ndarray:
    mids = 0.5 * (boundaries[:-1] + boundaries[1:])
    return np.unique(np.concatenate([boundaries, mids]))


def _check_finite(values: np.ndarray, what: str):
    if not np.all(np.isfinite(values)):
        raise NumericDomainError(f"{what} produced a non-finite value inside the domain")


# ---------------------------------------------------------------------------
# Adaptive composite Gauss-Legendre integration
# ---------------------------------------------------------------------------

def _cell_values_1d(fn: Callable, lo: np.ndarray, hi: np.ndarray, points: int) -> np.ndarray:
    g, w = _gauss(points)
    mid = 0.5 * (lo + hi)
    rad = 0.5 * (hi - lo)
    X = mid[:, None] + rad[:, None] * g[None, :]
    with np.errstate(all="ignore"):
        F = np.asarray(fn(X), dtype=float)
    _check_finite(F, "integrand")
    return rad * (F @ w)


def integrate1d(fn, lo: float, hi: float, spec: Optional[QuadratureSpec] = None,
                breaks: Sequence[float] = ()) -> QuadResult:
    """Adaptive composite Gauss-Legendre integral over [lo, hi]."""
    spec = spec or DEFAULT_SPEC
    if not hi > lo:
        raise ValueError("integration interval must satisfy lo < hi")
    if isinstance(fn, str):
        from .expr import as_univariate

        fn = as_univariate(fn)
    b = _boundaries(lo, hi, spec.cells, tuple(breaks) or spec.breaks_x)
    los, his = b[:-1], b[1:]
    vals = _cell_values_1d(fn, los, his, spec.points)
    frozen = 0.0
    length = hi - lo
    for _ in range(spec.max_refine):
        mids = 0.5 * (los + his)
        clos = np.column_stack([los, mids]).ravel()
        chis = np.column_stack([mids, his]).ravel()
        cvals = _cell_values_1d(fn, clos, chis, spec.points)
        refined = cvals.reshape(-1, 2).sum(axis=1)
        diff = np.abs(vals - refined)
        err = float(diff.sum())
        share = (his - los) / length
        ok = diff <= 0.5 * spec.tol * share
        frozen += float(refined[ok].sum())
        keep = np.repeat(~ok, 2)
        los, his, vals = clos[keep], chis[keep], cvals[keep]
        total = frozen + float(vals.sum())
        if err <= spec.tol or los.size == 0:
            return QuadResult(total, err)
        if los.size > spec.max_cells:
            raise ConvergenceError("1d quadrature exceeded the active-cell cap")
    raise ConvergenceError(
        f"1d quadrature did not reach tol={spec.tol} within {spec.max_refine} refinements"
    )


def _cell_values_2d(fn: Callable, x0, x1, y0, y1, points: int) -> np.ndarray:
    g, w = _gauss(points)
    xm, xr = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    ym, yr = 0.5 * (y0 + y1), 0.5 * (y1 - y0)
    X = xm[:, None] + xr[:, None] * g[None, :]  # (N, p)
    Y = ym[:, None] + yr[:, None] * g[None, :]
    with np.errstate(all="ignore"):
        F = np.asarray(fn(X[:, :, None], Y[:, None, :]), dtype=float)
    _check_finite(F, "integrand")
    return xr * yr * np.einsum("a,nab,b->n", w, F, w)


def integrate2d(fn, rect: Rect, spec: Optional[QuadratureSpec] = None) -> QuadResult:
    """Tensor-product Gauss-Legendre integral over a rectangle.

    Cells are bisected in both directions until the inter-sweep change of
    the global estimate is within spec.tol; the reported error estimate
    is that last change (summed over refined cells, which is
    conservative).  Raises ConvergenceError past spec.max_refine sweeps.
    """
    spec = spec or DEFAULT_SPEC
    fn = as_bivariate(fn) if isinstance(fn, str) else fn
    bx = _boundaries(rect.a, rect.b, spec.cells, spec.breaks_x)
    by = _boundaries(rect.c, rect.d, spec.cells, spec.breaks_y)
    X0, Y0 = np.meshgrid(bx[:-1], by[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(bx[1:], by[1:], indexing="ij")
    x0, x1, y0, y1 = X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel()
    vals = _cell_values_2d(fn, x0, x1, y0, y1, spec.points)
    frozen = 0.0
    area = rect.area
    for _ in range(spec.max_refine):
        xm = 0.5 * (x0 + x1)
        ym = 0.5 * (y0 + y1)
        cx0 = np.column_stack([x0, xm, x0, xm]).ravel()
        cx1 = np.column_stack([xm, x1, xm, x1]).ravel()
        cy0 = np.column_stack([y0, y0, ym, ym]).ravel()
        cy1 = np.column_stack([ym, ym, y1, y1]).ravel()
        cvals = _cell_values_2d(fn, cx0, cx1, cy0, cy1, spec.points)
        refined = cvals.reshape(-1, 4).sum(axis=1)
        diff = np.abs(vals - refined)
        err = float(diff.sum())
        share = (x1 - x0) * (y1 - y0) / area
        ok = diff <= 0.5 * spec.tol * share
        frozen += float(refined[ok].sum())
        keep = np.repeat(~ok, 4)
        x0, x1, y0, y1 = cx0[keep], cx1[keep], cy0[keep], cy1[keep]
        vals = cvals[keep]
        total = frozen + float(vals.sum())
        if err <= spec.tol or x0.size == 0:
            return QuadResult(total, err)
        if x0.size > spec.max_cells:
            raise ConvergenceError("2d quadrature exceeded the active-cell cap")
    raise ConvergenceError(
        f"2d quadrature did not reach tol={spec.tol} within {spec.max_refine} refinements"
    )


# ---------------------------------------------------------------------------
# Cumulative primitives W and the upper counterpart
# ---------------------------------------------------------------------------

class _Antiderivative2D:
    """Per-cell Legendre representation of (x, y) -> int_a^x int_c^y w."""

    def __init__(self, fn: Callable, rect: Rect, spec: QuadratureSpec):
        self.rect = rect
        self.points = spec.points
        bx = _boundaries(rect.a, rect.b, spec.cells, spec.breaks_x)
        by = _boundaries(rect.c, rect.d, spec.cells, spec.breaks_y)
        probe_prev = None
        for level in range(spec.max_refine + 1):
            self._build(fn, bx, by)
            probe = self._probe()
            if probe_prev is not None and probe.shape == probe_prev.shape:
                if float(np.max(np.abs(probe - probe_prev))) <= spec.tol:
                    return
            probe_prev = probe
            if (bx.size - 1) * (by.size - 1) * 4 > spec.max_cells:
                break
            bx, by = _halve(bx), _halve(by)
        raise ConvergenceError(
            f"cumulative primitive did not converge to tol={spec.tol}"
        )

    def _build(self, fn: Callable, bx: np.ndarray, by: np.ndarray):
        p = self.points
        self.bx, self.by = bx, by
        hx, hy = np.diff(bx), np.diff(by)
        self.hx, self.hy = hx, hy
        g, _ = _gauss(p)
        X = 0.5 * (bx[:-1] + bx[1:])[:, None] + 0.5 * hx[:, None] * g[None, :]
        Y = 0.5 * (by[:-1] + by[1:])[:, None] + 0.5 * hy[:, None] * g[None, :]
        with np.errstate(all="ignore"):
            F = np.asarray(fn(X[:, :, None, None], Y[None, None, :, :]), dtype=float)
        _check_finite(F, "cumulative integrand")
        M = _legendre_matrix(p)
        A = np.einsum("na,iajb,mb->ijnm", M, F, M)
        self.A = A
        cellint = hx[:, None] * hy[None, :] * A[:, :, 0, 0]
        Cum = np.zeros((bx.size, by.size))
        Cum[1:, 1:] = cellint.cumsum(axis=0).cumsum(axis=1)
        self.Cum = Cum
        Vx = np.zeros((hx.size, by.size, p))
        Vx[:, 1:, :] = (hy[None, :, None] * A[:, :, :, 0]).cumsum(axis=1)
        self.Vx = Vx
        Vy = np.zeros((bx.size, hy.size, p))
        Vy[1:, :, :] = (hx[:, None, None] * A[:, :, 0, :]).cumsum(axis=0)
        self.Vy = Vy
        self.total = float(Cum[-1, -1])

    def _probe(self) -> np.ndarray:
        xs = np.linspace(self.rect.a, self.rect.b, 9)
        ys = np.linspace(self.rect.c, self.rect.d, 9)
        Xg, Yg = np.meshgrid(xs, ys, indexing="ij")
        return self(Xg.ravel(), Yg.ravel())

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        out = np.empty(x.size)
        # chunked so the gathered coefficient tensors stay modest in size
        step = 1 << 16
        for k in range(0, x.size, step):
            out[k:k + step] = self._eval_chunk(x[k:k + step], y[k:k + step])
        return out

    def _eval_chunk(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        p = self.points
        ix = np.clip(np.searchsorted(self.bx, x, side="right") - 1, 0, self.hx.size - 1)
        iy = np.clip(np.searchsorted(self.by, y, side="right") - 1, 0, self.hy.size - 1)
        xi = np.clip((x - self.bx[ix]) * 2.0 / self.hx[ix] - 1.0, -1.0, 1.0)
        eta = np.clip((y - self.by[iy]) * 2.0 / self.hy[iy] - 1.0, -1.0, 1.0)
        Qx = _q_values(xi, p)
        Qy = _q_values(eta, p)
        Ag = self.A[ix, iy]
        corner = 0.25 * self.hx[ix] * self.hy[iy] * np.einsum("na,nab,nb->n", Qx, Ag, Qy)
        xstrip = 0.5 * self.hx[ix] * np.einsum("na,na->n", Qx, self.Vx[ix, iy])
        ystrip = 0.5 * self.hy[iy] * np.einsum("nb,nb->n", Qy, self.Vy[ix, iy])
        return self.Cum[ix, iy] + xstrip + ystrip + corner


@dataclass(frozen=True)
class LatticeExtrema:
    minimum: float
    argmin: tuple
    maximum: float
    argmax: tuple
    grid: int


class CumulativePrimitive:
    """Evaluable double primitive of an integrand over a rectangle.

    Orientation "lower" integrates over [a, x] x [c, y] (vanishing on the
    left/bottom edges); "upper" over [x, b] x [y, d] (vanishing on the
    right/top edges).  The upper orientation is realized as the lower
    primitive of the point-reflected integrand, so both orientations
    vanish exactly on their base edges.
    """

    def __init__(self, w, rect: Rect, orientation: str = "lower",
                 spec: Optional[QuadratureSpec] = None):
        if orientation not in ("lower", "upper"):
            raise ValueError("orientation must be 'lower' or 'upper'")
        spec = spec or DEFAULT_SPEC
        w = as_bivariate(w) if not callable(w) or isinstance(w, str) else w
        self.rect = rect
        self.orientation = orientation
        self.integrand = w
        if orientation == "lower":
            self._core = _Antiderivative2D(w, rect, spec)
        else:
            a, b, c, d = rect.as_tuple()

            def reflected(u, v):
                return w(a + (b - u), c + (d - v))

            self._core = _Antiderivative2D(reflected, rect, spec)

    @property
    def total(self) -> float:
        return self._core.total

    def __call__(self, x, y):
        xs = np.asarray(x, dtype=float)
        ys = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(xs.shape, ys.shape)
        xb = np.broadcast_to(xs, shape).ravel()
        yb = np.broadcast_to(ys, shape).ravel()
        if self.orientation == "upper":
            a, b, c, d = self.rect.as_tuple()
            xb = a + (b - xb)
            yb = c + (d - yb)
        out = self._core(xb, yb)
        if shape == ():
            return float(out[0])
        return out.reshape(shape)

    def lattice_extrema(self, grid: int = 32) -> LatticeExtrema:
        xs = self.rect.xs(grid)
        ys = self.rect.ys(grid)
        Xg, Yg = np.meshgrid(xs, ys, indexing="ij")
        vals = self(Xg, Yg)
        imin = np.unravel_index(np.argmin(vals), vals.shape)
        imax = np.unravel_index(np.argmax(vals), vals.shape)
        return LatticeExtrema(
            minimum=float(vals[imin]),
            argmin=(float(xs[imin[0]]), float(ys[imin[1]])),
            maximum=float(vals[imax]),
            argmax=(float(xs[imax[0]]), float(ys[imax[1]])),
            grid=grid,
        )


def cumulative(w, rect: Rect, orientation: str = "lower",
               spec: Optional[QuadratureSpec] = None) -> CumulativePrimitive:
    """Cached double primitive of w from the lower-left or upper-right corner."""
    return CumulativePrimitive(as_bivariate(w), rect, orientation, spec)


# ---------------------------------------------------------------------------
# 1D antiderivative (same machinery, used by the AC constructor)
# ---------------------------------------------------------------------------

class Antiderivative1D:
    """Evaluable x -> int_lo^x g for an integrable univariate g."""

    def __init__(self, fn, lo: float, hi: float, spec: Optional[QuadratureSpec] = None,
                 breaks: Sequence[float] = ()):
        from .expr import as_univariate

        spec = spec or DEFAULT_SPEC
        g = as_univariate(fn) if not callable(fn) or isinstance(fn, str) else fn
        self.lo, self.hi = lo, hi
        self.points = spec.points
        b = _boundaries(lo, hi, spec.cells, tuple(breaks) or spec.breaks_x)
        probe_prev = None
        for _ in range(spec.max_refine + 1):
            self._build(g, b)
            probe = self(np.linspace(lo, hi, 17))
            if probe_prev is not None:
                if float(np.max(np.abs(probe - probe_prev))) <= spec.tol:
                    return
            probe_prev = probe
            b = _halve(b)
            if b.size > spec.max_cells:
                break
        raise ConvergenceError("1d antiderivative did not converge")

    def _build(self, g, b: np.ndarray):
        p = self.points
        self.b = b
        h = np.diff(b)
        self.h = h
        nodes, _ = _gauss(p)
        X = 0.5 * (b[:-1] + b[1:])[:, None] + 0.5 * h[:, None] * nodes[None, :]
        with np.errstate(all="ignore"):
            F = np.asarray(g(X), dtype=float)
        _check_finite(F, "antiderivative integrand")
        M = _legendre_matrix(p)
        A = F @ M.T  # (cells, p): coefficient n of each cell
        self.A = A
        cellint = h * A[:, 0]
        self.Cum = np.concatenate([[0.0], cellint.cumsum()])
        self.total = float(self.Cum[-1])

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        shape = xs.shape
        x = xs.ravel()
        i = np.clip(np.searchsorted(self.b, x, side="right") - 1, 0, self.h.size - 1)
        xi = np.clip((x - self.b[i]) * 2.0 / self.h[i] - 1.0, -1.0, 1.0)
        Q = _q_values(xi, self.points)
        out = self.Cum[i] + 0.5 * self.h[i] * np.einsum("na,na->n", Q, self.A[i])
        if shape == ():
            return float(out[0])
        return out.reshape(shape)


# ---------------------------------------------------------------------------
# Riemann-Stieltjes sums against a bivariate integrator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StieltjesResult:
    """Midpoint-tagged Riemann-Stieltjes sum plus the step-function bound.

    ``bound`` is the rectangle measure of the integrator times the sup of
    |h| on the tag lattice; it bounds |value| only when the integrator is
    2d-monotone, which ``integrator_monotone`` reports.
    """

    value: float
    bound: float
    error_estimate: float
    converged: bool
    integrator_monotone: bool
    partition: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "bound": self.bound,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
            "integrator_monotone": self.integrator_monotone,
            "partition": self.partition,
        }


def stieltjes2d(h, f, rect: Rect, partition: int = 64, tol: float = 1e-8,
                doublings: int = 4, mono_tol: float = 1e-9) -> StieltjesResult:
    """Integrate h against the rectangle measure of f.

    value = sum over cells of h(midpoint) * cell measure of f on a
    partition x partition grid, with the partition doubled until two
    successive values agree to tol or the doubling limit is reached.
    """
    if partition < 1:
        raise ValueError("partition must be >= 1")
    h = as_bivariate(h)
    f = as_bivariate(f)
    n = partition
    prev = None
    err = float("inf")
    converged = False
    for _ in range(doublings + 1):
        xs, ys = rect.xs(n), rect.ys(n)
        V = f(xs[:, None], ys[None, :])
        _check_finite(V, "integrator")
        cells = V[:-1, :-1] - V[:-1, 1:] - V[1:, :-1] + V[1:, 1:]
        xm = 0.5 * (xs[:-1] + xs[1:])
        ym = 0.5 * (ys[:-1] + ys[1:])
        H = h(xm[:, None], ym[None, :])
        _check_finite(H, "integrand")
        value = float((H * cells).sum())
        if prev is not None:
            err = abs(value - prev)
            if err <= tol:
                converged = True
                break
        prev = value
        n *= 2
    else:
        n //= 2
    measure = float(V[0, 0] - V[0, -1] - V[-1, 0] + V[-1, -1])
    bound = measure * float(np.max(np.abs(H)))
    monotone = bool(cells.min() >= -mono_tol)
    if not monotone:
        warnings.warn(
            "integrator is not 2d-monotone on the partition; the step-function "
            "bound is not asserted",
            stacklevel=2,
        )
    return StieltjesResult(
        value=value,
        bound=bound,
        error_estimate=float(err),
        converged=converged,
        integrator_monotone=monotone,
        partition=n,
    )


def stieltjes_vs_riemann(h, f, rect: Rect, spec: Optional[QuadratureSpec] = None,
                         partition: int = 64, tolerance: float = 1e-6) -> IdentityResidual:
    """Residual between the Stieltjes sum and the mixed-density Riemann integral.

    Requires f to carry a symbolic mixed partial (expression-backed).
    """
    f = as_bivariate(f)
    h = as_bivariate(h)
    fxy = f.mixed_partial()
    if fxy is None:
        raise ValueError("integrator must be expression-backed to supply its mixed partial")
    s = stieltjes2d(h, f, rect, partition=partition, tol=(spec or DEFAULT_SPEC).tol)
    r = integrate2d(lambda x, y: h(x, y) * fxy(x, y), rect, spec)
    return IdentityResidual.from_pair(s.value, r.value, tolerance)


# ---------------------------------------------------------------------------
# Mollifier (Dirac sequence) machinery
# ---------------------------------------------------------------------------

def _bump_raw(x, y):
    # exp(1/(r^2-1)) inside the open unit disk, 0 outside
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = x * x + y * y
    out = np.zeros(np.broadcast(x, y).shape)
    inside = s < 1.0
    out[inside] = np.exp(1.0 / (np.broadcast_to(s, out.shape)[inside] - 1.0))
    return out


_BUMP_NORMALIZATION: Optional[float] = None


def bump_normalization() -> float:
    """Normalizing constant of the unit bump, computed once by quadrature."""
    global _BUMP_NORMALIZATION
    if _BUMP_NORMALIZATION is None:
        spec = QuadratureSpec(cells=4, tol=1e-10, max_refine=20)
        _BUMP_NORMALIZATION = integrate2d(_bump_raw, Rect(-1, 1, -1, 1), spec).value
    return _BUMP_NORMALIZATION


@dataclass(frozen=True)
class Mollifier:
    """Normalized bump rho_n(x, y) = n^2 rho(nx, ny), supported on radius 1/n."""

    n: int
    c: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("mollifier index must be >= 1")

    @property
    def radius(self) -> float:
        return 1.0 / self.n

    def __call__(self, x, y):
        n = self.n
        return (n * n / self.c) * _bump_raw(n * np.asarray(x, dtype=float),
                                            n * np.asarray(y, dtype=float))

    @property
    def support(self) -> Rect:
        r = self.radius
        return Rect(-r, r, -r, r)


def make_mollifier(n: int) -> Mollifier:
    return Mollifier(n=n, c=bump_normalization())


def _conv_nodes(moll: Mollifier, points: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Tensor Gauss grid over the support, sized so the discrete mass is 1
    # to ~1e-8; zero-weight nodes outside the disk are pruned.
    g, w = _gauss(points)
    r = moll.radius
    for cells in (8, 12, 16, 24, 32, 40):
        b = np.linspace(-r, r, cells + 1)
        h = np.diff(b)
        X = 0.5 * (b[:-1] + b[1:])[:, None] + 0.5 * h[:, None] * g[None, :]
        wx = (0.5 * h[:, None] * w[None, :]).ravel()
        nodes = X.ravel()
        S, T = np.meshgrid(nodes, nodes, indexing="ij")
        WW = np.outer(wx, wx)
        rho = moll(S, T)
        wconv = (WW * rho).ravel()
        mass = float(wconv.sum())
        if abs(mass - 1.0) <= 1e-8:
            break
    nz = wconv != 0.0
    return S.ravel()[nz], T.ravel()[nz], wconv[nz]


def mollify(f, rect: Rect, n: int, spec: Optional[QuadratureSpec] = None) -> BivariateFn:
    """Convolution of f with the index-n mollifier, as a new BivariateFn.

    f is extended beyond the rectangle by clamping coordinates to it.
    """
    spec = spec or DEFAULT_SPEC
    f = as_bivariate(f)
    moll = make_mollifier(n)
    S, T, wconv = _conv_nodes(moll, spec.points)
    a, b, c, d = rect.as_tuple()
    m = S.size
    chunk = max(1, 4_000_000 // m)

    def conv(x, y):
        xs = np.asarray(x, dtype=float)
        ys = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(xs.shape, ys.shape)
        xf = np.broadcast_to(xs, shape).ravel()
        yf = np.broadcast_to(ys, shape).ravel()
        out = np.empty(xf.size)
        for k in range(0, xf.size, chunk):
            xe = np.clip(xf[k:k + chunk, None] - S[None, :], a, b)
            ye = np.clip(yf[k:k + chunk, None] - T[None, :], c, d)
            out[k:k + chunk] = np.asarray(f(xe, ye), dtype=float) @ wconv
        return out.reshape(shape)

    label = f.expression or "f"
    return BivariateFn.from_callable(conv, name=f"mollify({label}, n={n})")
