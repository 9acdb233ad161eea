"""N-function (Young function) calculus.

An N-function is a convex G : [0, inf) -> [0, inf) with G(0) = 0, G(t)/t -> 0
at zero and G(t)/t -> infinity at infinity.  This module builds the analytic
families used throughout the package (pure powers, powers with a logarithmic
correction, sums of powers, tabulated data), estimates their growth indices,
and tabulates the derived objects: the complementary (convex-conjugate)
function, the inverse, the fractional Sobolev conjugate, and power
compositions of it.

All evaluators are vectorised over numpy arrays.  Derived functions are
stored as strictly monotone tables interpolated with a monotonicity
preserving cubic (PCHIP) in log-log coordinates, with power-law extension
beyond the tabulated range; this preserves the monotonicity/convexity
invariants that the test suite asserts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

logger = logging.getLogger(__name__)

# Growth indices are estimated on this fixed log grid (12 decades, 4096
# points): the ratio t g'(t)/g(t) is monotone or nearly so for the built-in
# families, so endpoint refinement beyond this density is unnecessary.
INDEX_GRID = np.logspace(-6.0, 6.0, 4096)

# Default abscissa range for derived-function tables.  Wide enough that the
# property sweeps (arguments up to ~1e8) stay on interpolated knots.
TABLE_LOG10_RANGE = (-12.0, 12.0)
TABLE_KNOTS = 4096

BISECT_REL_TOL = 1e-12   # bracket tolerance for all monotone solves
MAX_DOUBLINGS = 200      # bracket expansion budget before giving up


class InvalidNFunctionError(ValueError):
    """Input does not define a usable N-function."""


class BracketExpansionError(RuntimeError):
    """A monotone solve failed to bracket its target after MAX_DOUBLINGS."""


class SobolevConjugateError(ValueError):
    """The integrability test for the Sobolev conjugate failed.

    `failed_tail` is "origin" when the defining integral diverges at zero
    and "infinity" when the required divergence at infinity is absent.
    """

    def __init__(self, message: str, failed_tail: str):
        super().__init__(message)
        self.failed_tail = failed_tail


def _as_array(t):
    return np.asarray(t, dtype=float)


def solve_increasing(fn, target, lo=1e-12, hi=1.0, rel_tol=BISECT_REL_TOL):
    """Solve fn(x) = target for a nondecreasing fn, vectorised over target.

    Brackets are expanded geometrically (factor 2, at most MAX_DOUBLINGS
    times per side) and then bisected at the geometric midpoint until the
    bracket is below rel_tol relatively.  target == 0 maps to 0.
    """
    target = _as_array(target)
    scalar = target.ndim == 0
    target = np.atleast_1d(target)
    lo = np.full(target.shape, float(lo))
    hi = np.full(target.shape, float(hi))
    positive = target > 0.0

    for _ in range(MAX_DOUBLINGS):
        short = positive & (fn(hi) < target)
        if not short.any():
            break
        hi[short] *= 2.0
    else:
        raise BracketExpansionError(
            "upper bracket expansion exhausted (target beyond function range)")
    for _ in range(MAX_DOUBLINGS):
        over = positive & (fn(lo) > target)
        if not over.any():
            break
        lo[over] *= 0.5
    else:
        raise BracketExpansionError("lower bracket expansion exhausted")

    for _ in range(200):
        if np.all(hi - lo <= rel_tol * hi):
            break
        mid = np.sqrt(lo * hi)
        high_side = fn(mid) >= target
        hi = np.where(high_side, mid, hi)
        lo = np.where(high_side, lo, mid)
    root = np.where(positive, 0.5 * (lo + hi), 0.0)
    return float(root[0]) if scalar else root


class LogLogTable:
    """Strictly increasing positive table, PCHIP-interpolated in log-log.

    Evaluation at 0 returns 0; beyond the knot range the table extends as a
    power law using the boundary log-log slopes (so monotonicity survives
    extrapolation, which cubic extension would not guarantee).  split_at
    lists abscissae where the tabulated function has a derivative kink: the
    interpolant is built piecewise there, so the C1 smoothing of a single
    PCHIP cannot smear error across the kink.
    """

    def __init__(self, abscissa: np.ndarray, values: np.ndarray,
                 split_at: Sequence[float] = ()):
        abscissa = _as_array(abscissa)
        values = _as_array(values)
        keep = (abscissa > 0.0) & (values > 0.0)
        abscissa, values = abscissa[keep], values[keep]
        if abscissa.size < 4:
            raise InvalidNFunctionError("table needs at least 4 positive knots")
        if np.any(np.diff(abscissa) <= 0.0) or np.any(np.diff(values) <= 0.0):
            raise InvalidNFunctionError("table must be strictly increasing")
        self.abscissa = abscissa
        self.values = values
        self._lx = np.log(abscissa)
        self._ly = np.log(values)
        cuts = []
        for point in sorted(set(float(s) for s in split_at if s > 0.0)):
            idx = int(np.searchsorted(abscissa, point))
            if 4 <= idx <= abscissa.size - 4:
                cuts.append(idx)
        bounds = [0] + cuts + [abscissa.size]
        self._edges = self._lx[np.array(cuts, dtype=int)] if cuts else np.empty(0)
        self._pieces = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            hi_inc = min(hi + 1, abscissa.size)  # share the cut knot
            piece = PchipInterpolator(self._lx[lo:hi_inc], self._ly[lo:hi_inc],
                                      extrapolate=True)
            self._pieces.append(piece)
        self._dpieces = [p.derivative() for p in self._pieces]
        self._slope_lo = float(self._dpieces[0](self._lx[0]))
        self._slope_hi = float(self._dpieces[-1](self._lx[-1]))

    def _piecewise(self, lx: np.ndarray, fns) -> np.ndarray:
        if len(fns) == 1:
            return fns[0](lx)
        out = np.empty_like(lx)
        seg = np.searchsorted(self._edges, lx, side="right")
        for i, fn in enumerate(fns):
            mask = seg == i
            if mask.any():
                out[mask] = fn(lx[mask])
        return out

    def __call__(self, x):
        x = _as_array(x)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        if np.any(x < 0.0):
            raise ValueError("table argument must be nonnegative")
        out = np.zeros_like(x)
        pos = x > 0.0
        lx = np.log(x[pos])
        ly = np.empty_like(lx)
        below = lx < self._lx[0]
        above = lx > self._lx[-1]
        inside = ~(below | above)
        ly[inside] = self._piecewise(lx[inside], self._pieces)
        ly[below] = self._ly[0] + self._slope_lo * (lx[below] - self._lx[0])
        ly[above] = self._ly[-1] + self._slope_hi * (lx[above] - self._lx[-1])
        out[pos] = np.exp(ly)
        return float(out[0]) if scalar else out

    def slope(self, x):
        """d(log value)/d(log abscissa), clamped to the boundary slopes."""
        x = _as_array(x)
        scalar = x.ndim == 0
        lx = np.log(np.atleast_1d(x).astype(float))
        inner = self._piecewise(np.clip(lx, self._lx[0], self._lx[-1]), self._dpieces)
        s = np.where(lx < self._lx[0], self._slope_lo,
                     np.where(lx > self._lx[-1], self._slope_hi, inner))
        return float(s[0]) if scalar else s

    def derivative(self, x):
        """dv/dx = (v/x) * dlogv/dlogx; defined for x > 0."""
        v = self(x)
        return v / _as_array(x) * self.slope(x)


def log_grid(lo_exp: float, hi_exp: float, n: int,
             breakpoints: Sequence[float] = (),
             cluster: int = 0) -> np.ndarray:
    """Log-spaced grid with optional extra knots inserted (e.g. kink points).

    cluster > 0 additionally packs geometrically graded knots into a tenth
    of a decade around each breakpoint (spacing shrinks smoothly toward the
    point), which keeps interpolants of kinked functions accurate where the
    regular spacing would be too coarse.
    """
    parts = [np.logspace(lo_exp, hi_exp, n)]
    for b in breakpoints:
        if not (10.0 ** lo_exp < b < 10.0 ** hi_exp):
            continue
        parts.append(np.asarray([b], float))
        if cluster > 0:
            e = np.log10(b)
            offsets = 0.05 * 0.87 ** np.arange(cluster)
            offsets = offsets[offsets > 1e-9]
            parts.append(10.0 ** (e - offsets))
            parts.append(10.0 ** (e + offsets))
    grid = np.unique(np.concatenate(parts)) if len(parts) > 1 else parts[0]
    return grid


# ---------------------------------------------------------------------------
# The central object
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NFunction:
    """A Young function with derivative data and growth indices.

    Fields follow the package-wide conventions: ``p_minus``/``p_plus`` are
    the growth indices (for pure powers both equal the exponent), and
    ``eval_domain`` is the abscissa interval on which numeric evaluation is
    trusted.  ``warnings`` records documented relaxations (for instance a
    lower index at or below 2, which the solver tolerates but flags).
    """

    family: str
    params: tuple
    fn: Callable[[np.ndarray], np.ndarray]
    deriv_fn: Callable[[np.ndarray], np.ndarray]
    deriv2_fn: Callable[[np.ndarray], np.ndarray]
    p_minus: float
    p_plus: float
    eval_domain: tuple = (1e-12, 1e12)
    breakpoints: tuple = ()
    warnings: tuple = ()
    inverse_fn: Optional[Callable] = None
    tail_primitive_fn: Optional[Callable] = None
    label: str = ""

    def __call__(self, t):
        return self.fn(_as_array(t))

    def deriv(self, t):
        return self.deriv_fn(_as_array(t))

    def deriv2(self, t):
        return self.deriv2_fn(_as_array(t))

    def inverse(self, tau):
        """Inverse of the function itself, closed-form where available."""
        if self.inverse_fn is not None:
            return self.inverse_fn(_as_array(tau))
        return solve_increasing(self.fn, tau)

    def integral_over_t(self, x):
        """Cumulative integral of fn(r)/r from 0 to x.

        This is the primitive behind the exact exterior-tail formulas of the
        nonlocal modulars: the tail of the kernel integral beyond distance d
        collapses to integral_over_t(c * d**-s) / s for a field of height c.
        """
        if self.tail_primitive_fn is not None:
            return self.tail_primitive_fn(_as_array(x))
        raise NotImplementedError("no tail primitive for this family")

    @property
    def delta2_constant(self) -> float:
        return 2.0 ** self.p_plus

    @property
    def name(self) -> str:
        return self.label or f"{self.family}{self.params}"

    def validate(self, grid: Optional[np.ndarray] = None) -> list:
        """Check the type invariants on a sample grid; return violations.

        Checks: value 0 at 0, monotone and convex values, derivative 0 at 0
        and nondecreasing, nonnegative second derivative, index bracketing of
        t*g/G, and the doubling bound G(2t) <= 2**p_plus * G(t).
        """
        if grid is None:
            lo, hi = self.eval_domain
            grid = log_grid(np.log10(lo) + 2, np.log10(hi) - 2, 512,
                            self.breakpoints)
        problems = []
        Gv = self(grid)
        gv = self.deriv(grid)
        gpv = self.deriv2(grid)
        if abs(float(self(0.0))) > 1e-300:
            problems.append("G(0) != 0")
        if abs(float(self.deriv(0.0))) > 1e-300:
            problems.append("g(0) != 0")
        if np.any(np.diff(Gv) < 0.0):
            problems.append("values not nondecreasing")
        # true second divided differences are >= 0 for convex data on any grid
        d1 = np.diff(Gv) / np.diff(grid)
        dd = np.diff(d1) / (grid[2:] - grid[:-2])
        scale = np.maximum(1.0, Gv[1:-1] / np.maximum(grid[1:-1], 1e-300) ** 2)
        if np.any(dd < -1e-10 * scale):
            problems.append("second divided differences negative (non-convex)")
        if np.any(np.diff(gv) < -1e-12 * np.maximum(1.0, np.abs(gv[1:]))):
            problems.append("derivative not nondecreasing")
        if np.any(gpv < -1e-12 * np.maximum(1.0, np.abs(gv / grid))):
            problems.append("second derivative negative on samples")
        ratio = grid * gv / Gv
        slack = 1e-8
        if np.any(ratio < self.p_minus * (1.0 - slack) - slack):
            problems.append("t*g/G drops below p_minus")
        if np.any(ratio > self.p_plus * (1.0 + slack) + slack):
            problems.append("t*g/G exceeds p_plus")
        doubling = self(2.0 * grid) - self.delta2_constant * Gv
        if np.any(doubling > 1e-9 * self.delta2_constant * Gv):
            problems.append("doubling condition violated")
        return problems


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def power_nfunction(p: float) -> NFunction:
    """G(t) = t**p / p for p >= 2 (the fractional p-Laplacian case)."""
    p = float(p)
    if p < 2.0:
        raise InvalidNFunctionError(f"power family needs p >= 2, got {p}")
    return NFunction(
        family="power", params=(p,),
        fn=lambda t: t ** p / p,
        deriv_fn=lambda t: t ** (p - 1.0),
        deriv2_fn=lambda t: (p - 1.0) * t ** (p - 2.0) if p != 2.0
        else np.ones_like(_as_array(t)),
        p_minus=p, p_plus=p,
        inverse_fn=lambda tau: (p * tau) ** (1.0 / p),
        tail_primitive_fn=lambda x: x ** p / p ** 2,
        label=f"power(p={p:g})",
    )


def power_sum_nfunction(p: float, q: float) -> NFunction:
    """G(t) = t**p / p + t**q / q with 2 <= p <= q (the (p,q) operator)."""
    p, q = float(p), float(q)
    if not (2.0 <= p <= q):
        raise InvalidNFunctionError(f"power-sum family needs 2 <= p <= q, got ({p}, {q})")

    def d2(t):
        t = _as_array(t)
        first = (p - 1.0) * t ** (p - 2.0) if p != 2.0 else np.ones_like(t)
        second = (q - 1.0) * t ** (q - 2.0) if q != 2.0 else np.ones_like(t)
        return first + second

    return NFunction(
        family="powersum", params=(p, q),
        fn=lambda t: t ** p / p + t ** q / q,
        deriv_fn=lambda t: t ** (p - 1.0) + t ** (q - 1.0),
        deriv2_fn=d2,
        p_minus=p, p_plus=q,
        tail_primitive_fn=lambda x: x ** p / p ** 2 + x ** q / q ** 2,
        label=f"powersum(p={p:g},q={q:g})",
    )


def power_log_nfunction(p: float) -> NFunction:
    """G(t) = t**p (|ln t| + 1) / p for p >= 2, exactly as printed.

    The absolute value kinks at t = 1: the derivative is obtained by
    symbolic differentiation split there, and its value at t = 1 is the
    right limit.  The derivative jumps upward across the kink, so G stays
    convex, but the pointwise ratio t g'(t)/g(t) dips to p(p-2)/(p-1) just
    left of the kink while t g(t)/G(t) climbs to p + 1 just right of it.
    The recorded indices are the closed-form envelope of both ratios, which
    is what the scaling and conjugate-sandwich inequalities actually need.
    """
    p = float(p)
    if p < 2.0:
        raise InvalidNFunctionError(f"power-log family needs p >= 2, got {p}")
    c_lo = 1.0 - 1.0 / p
    c_hi = 1.0 + 1.0 / p

    def G(t):
        t = _as_array(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = t ** p * (np.abs(np.log(np.where(t > 0, t, 1.0))) + 1.0) / p
        return np.where(t > 0, out, 0.0)

    def g(t):
        t = _as_array(t)
        safe = np.where(t > 0, t, 1.0)
        lo = safe ** (p - 1.0) * (c_lo - np.log(safe))
        hi = safe ** (p - 1.0) * (np.log(safe) + c_hi)
        return np.where(t > 0, np.where(t < 1.0, lo, hi), 0.0)

    def gprime(t):
        t = _as_array(t)
        safe = np.where(t > 0, t, 1.0)
        lo = safe ** (p - 2.0) * ((p - 1.0) * (c_lo - np.log(safe)) - 1.0)
        hi = safe ** (p - 2.0) * ((p - 1.0) * (np.log(safe) + c_hi) + 1.0)
        return np.where(t > 0, np.where(t < 1.0, lo, hi), 0.0)

    lam1 = c_hi / p ** 2  # cumulative of G(r)/r up to 1

    def tail_primitive(x):
        x = _as_array(x)
        safe = np.where(x > 0, x, 1.0)
        lo = safe ** p * (c_hi - np.log(safe)) / p ** 2
        xp = safe ** p
        hi = lam1 + (xp * np.log(safe) / p + (xp - 1.0) * (1.0 / p - 1.0 / p ** 2)) / p
        return np.where(x > 0, np.where(x <= 1.0, lo, hi), 0.0)

    p_minus = p * (p - 2.0) / (p - 1.0)
    notes = []
    if p_minus <= 2.0:
        notes.append(
            f"lower growth index {p_minus:g} <= 2: outside the strict index "
            "bound; admitted with degraded guarantees")
    if p == 2.0:
        notes.append("derivative decreases on (exp(-1/2), 1): not convex there")
    return NFunction(
        family="powerlog", params=(p,),
        fn=G, deriv_fn=g, deriv2_fn=gprime,
        p_minus=p_minus, p_plus=p + 1.0,
        breakpoints=(1.0,),
        warnings=tuple(notes),
        tail_primitive_fn=tail_primitive,
        label=f"powerlog(p={p:g})",
    )


def tabulated_nfunction(abscissa, values, label: str = "tabulated") -> NFunction:
    """N-function from a two-column table (t, G(t)) with strictly increasing t.

    The derivative comes from the log-log interpolant; non-convex input is
    rejected.  Indices are taken from the derivative-ratio extrema on the
    trusted domain, widened by the value-ratio extrema so the scaling
    inequalities hold with the recorded constants.
    """
    abscissa = _as_array(abscissa)
    values = _as_array(values)
    if abscissa.ndim != 1 or abscissa.shape != values.shape:
        raise InvalidNFunctionError("tabulated input must be two equal 1-d columns")
    table = LogLogTable(abscissa, values)
    t = table.abscissa
    v = table.values
    d1 = np.diff(v) / np.diff(t)
    dd = np.diff(d1) / (t[2:] - t[:-2])
    if np.any(dd < -1e-10 * np.maximum(1.0, v[1:-1] / t[1:-1] ** 2)):
        raise InvalidNFunctionError("tabulated data is not convex")

    def deriv2(x):
        x = _as_array(x)
        eps = 1e-4
        return (table.derivative(x * (1 + eps)) - table.derivative(x * (1 - eps))) / (2 * eps * x)

    # cumulative of G(r)/r: head from the local power fit, then per-segment
    # Gauss-Legendre in the log variable
    integrand = lambda r: table(r) / r
    head = table(t[0]) / max(table.slope(t[0]), 1e-6)
    cumulative = head + np.concatenate([[0.0], np.cumsum(_gauss_segments(integrand, t))])
    tail_table = LogLogTable(t, cumulative)

    grid = log_grid(np.log10(t[0]), np.log10(t[-1]), 1024)
    slope = table.slope(grid)                    # = t g / G
    curve = grid * deriv2(grid) / table.derivative(grid)
    p_minus = float(min(slope.min(), 1.0 + curve.min()))
    p_plus = float(max(slope.max(), 1.0 + curve.max()))
    return NFunction(
        family="tabulated", params=(),
        fn=table, deriv_fn=table.derivative, deriv2_fn=deriv2,
        p_minus=p_minus, p_plus=p_plus,
        eval_domain=(float(t[0]), float(t[-1])),
        tail_primitive_fn=tail_table,
        label=label,
    )


FAMILY_BUILDERS = {
    "power": lambda params: power_nfunction(params["p"]),
    "powerlog": lambda params: power_log_nfunction(params["p"]),
    "powersum": lambda params: power_sum_nfunction(params["p"], params["q"]),
}


def construct_nfunction(family: str, **params) -> NFunction:
    """Build a named family; the config front end routes through here."""
    family = family.lower()
    if family == "tabulated":
        return tabulated_nfunction(params["abscissa"], params["values"],
                                   params.get("label", "tabulated"))
    if family not in FAMILY_BUILDERS:
        raise InvalidNFunctionError(f"unknown N-function family {family!r}")
    return FAMILY_BUILDERS[family](params)


# ---------------------------------------------------------------------------
# Growth indices
# ---------------------------------------------------------------------------

def estimate_indices(nf: NFunction, grid: Optional[np.ndarray] = None,
                     min_decades: float = 12.0) -> tuple:
    """Estimate (p_minus, p_plus) as 1 + inf/sup of t g'(t)/g(t) on a grid.

    For smooth analytic families this reproduces the closed-form limits to
    about 1e-6 relative.  Families whose derivative jumps (the power-log
    family at t = 1) carry wider closed-form indices on the object itself;
    this estimator still reports the raw derivative-ratio extrema.
    """
    if grid is None:
        grid = INDEX_GRID
    span = np.log10(grid[-1] / grid[0])
    if span < min_decades:
        raise ValueError(f"index grid must span >= {min_decades} decades, got {span:.1f}")
    g = nf.deriv(grid)
    gp = nf.deriv2(grid)
    if np.any(~np.isfinite(g)) or np.any(g <= 0.0):
        raise InvalidNFunctionError("derivative vanishes or is non-finite at t > 0")
    ratio = grid * gp / g
    if np.any(~np.isfinite(ratio)):
        raise InvalidNFunctionError("index ratio non-finite on grid")
    return 1.0 + float(ratio.min()), 1.0 + float(ratio.max())


# ---------------------------------------------------------------------------
# Derived functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivedNFunction:
    """A function derived from an N-function, stored as a monotone table.

    kind is one of "complementary", "sobolev_conjugate", "inverse",
    "power_compose".  Evaluation interpolates the table (PCHIP in log-log);
    `exact` re-solves pointwise where an exact rule exists.
    """

    kind: str
    base: NFunction
    table: LogLogTable
    params: tuple = ()
    inverse_table: Optional[LogLogTable] = None
    exact_fn: Optional[Callable] = None
    refine_fn: Optional[Callable] = None
    label: str = ""

    def __call__(self, t):
        out = self.table(_as_array(t))
        if self.refine_fn is not None:
            out = self.refine_fn(_as_array(t), out)
        return out

    def deriv(self, t):
        return self.table.derivative(_as_array(t))

    def inverse(self, v):
        if self.inverse_table is not None:
            return self.inverse_table(_as_array(v))
        return solve_increasing(self.table, v)

    def exact(self, t):
        if self.exact_fn is None:
            raise NotImplementedError(f"no exact evaluator for kind {self.kind}")
        return self.exact_fn(_as_array(t))

    @property
    def knots(self):
        return self.table.abscissa, self.table.values

    @property
    def name(self):
        return self.label or f"{self.kind}[{self.base.name}]"


def _derivative_of(fn) -> Callable:
    if isinstance(fn, NFunction):
        return fn.deriv
    if isinstance(fn, DerivedNFunction):
        return fn.deriv
    raise TypeError("need an NFunction or DerivedNFunction")


def complementary(nf, grid: Optional[np.ndarray] = None) -> DerivedNFunction:
    """Tabulate the complementary function sup_tau (t*tau - G(tau)).

    The supremum at level t is attained where the derivative g crosses t;
    pointwise evaluation (`exact`) performs that monotone solve to 1e-12
    relative rather than a direct sup-search, exploiting monotonicity of g
    and avoiding flat-maximum ambiguity.  The table is parametrized by a
    tau-grid of the base (abscissa g(tau), value t*tau - G(tau)), which
    places every knot exactly on the conjugate and spans the full image of
    g.  A derivative jump of the base maps to an affine stretch of the
    conjugate; that stretch is filled with exact knots so interpolation
    stays accurate across it.
    """
    deriv = _derivative_of(nf)
    if grid is None:
        grid = log_grid(*TABLE_LOG10_RANGE, TABLE_KNOTS,
                        getattr(nf, "breakpoints", ()))
    abscissa = deriv(grid)
    values = abscissa * grid - nf(grid)
    # fill affine stretches of the conjugate across derivative jumps
    for b in getattr(nf, "breakpoints", ()):
        lo = float(deriv(b * (1.0 - 1e-9)))
        hi = float(deriv(b))
        if hi > lo > 0.0:
            span = np.logspace(np.log10(lo), np.log10(hi), 65)[1:-1]
            abscissa = np.concatenate([abscissa, span])
            values = np.concatenate([values, span * b - float(nf(b))])
    order = np.argsort(abscissa)
    abscissa, values = abscissa[order], values[order]
    # numerically differentiated bases can wiggle: keep only pairs that are
    # strictly increasing in both coordinates simultaneously
    keep = np.zeros(abscissa.size, dtype=bool)
    last_a = last_v = -np.inf
    for i in range(abscissa.size):
        if abscissa[i] > last_a and values[i] > last_v and values[i] > 0.0:
            keep[i] = True
            last_a, last_v = abscissa[i], values[i]
    splits = []
    for b in getattr(nf, "breakpoints", ()):
        splits.extend([float(deriv(b * (1.0 - 1e-9))), float(deriv(b))])

    def value_at(t):
        tau = solve_increasing(deriv, t)
        return t * tau - nf(tau)

    table = LogLogTable(abscissa[keep], values[keep], split_at=splits)
    base = nf if isinstance(nf, NFunction) else nf.base
    breaks = tuple(getattr(nf, "breakpoints", ()))
    has_second = isinstance(nf, NFunction)

    def polish(t, guess):
        # refine the maximizer of t*tau - G(tau) by damped Newton on
        # g(tau) = t, seeded with the table slope (= the maximizer); jump
        # stretches are covered by evaluating the breakpoints as candidates.
        t_arr = np.atleast_1d(np.asarray(t, float))
        tau = np.maximum(table.derivative(np.where(t_arr > 0, t_arr, 1.0)), 1e-300)
        if has_second:
            for _ in range(2):
                curv = nf.deriv2(tau)
                curv = np.where(curv > 0.0, curv, 1.0)
                step = (nf.deriv(tau) - t_arr) / curv
                tau = np.clip(tau - step, 0.5 * tau, 2.0 * tau)
        val = t_arr * tau - nf(tau)
        for b in breaks:
            val = np.maximum(val, t_arr * b - float(nf(b)))
        val = np.where(t_arr > 0.0, val, 0.0)
        return val if np.ndim(t) else float(val[0])

    return DerivedNFunction(
        kind="complementary", base=base,
        table=table,
        exact_fn=value_at,
        refine_fn=polish,
        label=f"conjugate[{getattr(nf, 'name', '?')}]",
    )


def inverse_nfunction(nf: NFunction, grid: Optional[np.ndarray] = None) -> DerivedNFunction:
    """Tabulated inverse (swapped axes of the value table)."""
    if grid is None:
        grid = log_grid(*TABLE_LOG10_RANGE, TABLE_KNOTS, nf.breakpoints)
    values = nf(grid)
    splits = [float(nf(b)) for b in nf.breakpoints]

    def newton_polish(tau, guess):
        # two damped Newton steps square the interpolation error away;
        # the multiplicative clamp keeps iterates positive near kinks
        t = np.atleast_1d(np.asarray(guess, float)).copy()
        tau = np.atleast_1d(np.asarray(tau, float))
        pos = (t > 0.0) & (tau > 0.0)
        for _ in range(2):
            slope = np.where(pos, nf.deriv(np.where(pos, t, 1.0)), 1.0)
            slope = np.where(slope > 0.0, slope, 1.0)
            step = (nf(np.where(pos, t, 1.0)) - tau) / slope
            t = np.where(pos, np.clip(t - step, 0.5 * t, 2.0 * t), t)
        return t if np.ndim(guess) else float(t[0])

    return DerivedNFunction(
        kind="inverse", base=nf,
        table=LogLogTable(values, grid, split_at=splits),
        exact_fn=(nf.inverse_fn if nf.inverse_fn is not None else None),
        refine_fn=newton_polish,
        label=f"inverse[{nf.name}]",
    )


def _gauss_segments(fn, knots: np.ndarray, order: int = 16) -> np.ndarray:
    """Integrals of fn over consecutive knot intervals in the log variable."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    llo = np.log(knots[:-1])
    lhi = np.log(knots[1:])
    half = 0.5 * (lhi - llo)
    centre = 0.5 * (lhi + llo)
    xi = centre[:, None] + half[:, None] * nodes[None, :]
    tau = np.exp(xi)
    return half * np.sum(weights[None, :] * fn(tau) * tau, axis=1)


def sobolev_conjugate(nf: NFunction, s: float, dim: int = 1,
                      n_knots: int = 1200) -> DerivedNFunction:
    """Build the Sobolev conjugate from the defining inverse-side integral.

    The inverse of the conjugate at t is the integral from 0 to t of
    G^{-1}(tau) * tau^{-(dim+s)/dim}.  Construction is refused when the
    integrand is non-integrable at the origin (estimated local power <= -1)
    or when the matching divergence test at infinity fails (estimated power
    < -1), with a diagnostic naming the failing tail.
    """
    if not (0.0 < s < 1.0):
        raise ValueError("fractional order s must lie in (0, 1)")
    kappa = (dim + s) / dim
    ginv = nf.inverse

    def log_slope(tau_a, tau_b):
        return (np.log(float(ginv(tau_b))) - np.log(float(ginv(tau_a)))) / np.log(tau_b / tau_a)

    head_power = log_slope(1e-9, 1e-8) - kappa
    if head_power <= -1.0 + 1e-12:
        raise SobolevConjugateError(
            f"integrand power near zero is {head_power:.4f} <= -1: "
            "the defining integral diverges at the origin", "origin")
    tail_power = log_slope(1e8, 1e9) - kappa
    if tail_power < -1.0 - 1e-12:
        raise SobolevConjugateError(
            f"integrand power at infinity is {tail_power:.4f} < -1: "
            "the required divergence at infinity is absent", "infinity")

    breaks = [float(nf(b)) for b in nf.breakpoints]
    knots = log_grid(-10.0, 10.0, n_knots, breaks)
    integrand = lambda tau: ginv(tau) * tau ** (-kappa)
    # head piece: integrand ~ C tau^a near zero, integrable since a > -1
    a = log_slope(knots[0] * 1e-2, knots[0]) - kappa
    head = integrand(knots[0]) * knots[0] / (a + 1.0)
    cumulative = head + np.concatenate([[0.0], np.cumsum(_gauss_segments(integrand, knots))])

    inverse_side = LogLogTable(knots, cumulative)   # this is (G_*)^{-1}
    forward = LogLogTable(cumulative, knots)        # G_* itself
    return DerivedNFunction(
        kind="sobolev_conjugate", base=nf, params=(s, dim),
        table=forward, inverse_table=inverse_side,
        label=f"sobolev_conjugate[{nf.name}; s={s:g}, N={dim}]",
    )


def compose_power(gstar: DerivedNFunction, exponent: float,
                  grid: Optional[np.ndarray] = None) -> DerivedNFunction:
    """Table of t -> gstar(t**exponent) for positive exponents.

    These compositions measure the coefficient data of the singular
    problem: exponent 1/(beta+1) <= 1 for the reaction weight and
    1/(1-alpha) >= 1 (alpha < 1 only) for the singular weight.
    """
    if not exponent > 0.0:
        raise ValueError(f"composition exponent must be positive, got {exponent}")
    if grid is None:
        grid = log_grid(*TABLE_LOG10_RANGE, 2048)
    values = gstar(grid ** exponent)
    keep = values > 0.0
    return DerivedNFunction(
        kind="power_compose", base=gstar.base, params=(exponent,),
        table=LogLogTable(grid[keep], values[keep]),
        label=f"compose[{gstar.name}; e={exponent:g}]",
    )


def reaction_weight_nfunction(gstar: DerivedNFunction, beta: float) -> DerivedNFunction:
    """N-function measuring the reaction coefficient: gstar(t**(1/(beta+1)))."""
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    return compose_power(gstar, 1.0 / (beta + 1.0))


def singular_weight_nfunction(gstar: DerivedNFunction, alpha: float) -> DerivedNFunction:
    """N-function measuring the singular coefficient for alpha < 1."""
    if alpha >= 1.0:
        raise ValueError("singular-weight composition is defined for alpha < 1 only")
    return compose_power(gstar, 1.0 / (1.0 - alpha))


def essentially_faster(H, G, k_values: Sequence[float] = (0.5, 1.0, 2.0, 10.0),
                       t_max: float = 1e8) -> bool:
    """True when H(k t) / G(t) decays toward zero along the top decades.

    Decision rule: for every sampled k the ratio at t_max must be below
    1e-3 times the ratio four decades earlier.  (A two-decade window cannot
    separate a single power of decay from none at the 1e-3 threshold, so
    the window is widened; borderline growth gaps stay conservatively
    False.)  Inconclusive growth returns False with a debug diagnostic.
    """
    if t_max < 1e8:
        raise ValueError("comparison needs t_max >= 1e8")
    for k in k_values:
        r_far = float(H(k * t_max)) / float(G(t_max))
        r_near = float(H(k * t_max / 1e4)) / float(G(t_max / 1e4))
        if not np.isfinite(r_far) or not np.isfinite(r_near):
            logger.debug("essentially_faster inconclusive: non-finite ratio at k=%g", k)
            return False
        if r_far >= 1e-3 * r_near:
            logger.debug("essentially_faster: ratio %g -> %g not decaying at k=%g",
                         r_near, r_far, k)
            return False
    return True
