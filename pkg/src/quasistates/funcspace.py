"""Serializable smooth functions on base spaces.

Functions are immutable expression trees. Leaves are monomials, constants,
bumps, plateaus (functions that are 1 on an inner ball and 0 outside an outer
one), radial profiles g(p_1 + ... + p_n), per-edge profiles on trees and
per-factor functions on products. Internal nodes are sums, products, scalings,
shifts, argument dilations and quotients.

Everything evaluates on batches (see `basespace.to_batch`), so a function is
called once per quadrature rule rather than once per node.

Two exact conversions back the exact integration engine:

* `to_poly` turns a polynomial expression into a {exponents: coefficient} map;
* `pieces_1d` turns a 1-D expression built from polynomials and C^2 spline
  bumps/plateaus into polynomial pieces between breakpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .basespace import (
    Simplex, TreeBatch, as_point, batch_len,
    contains, grid_points, to_batch,
)
from .errors import NotPolynomialError, OutsideSpaceError, StructureError

ORDERS = ("c2", "cinf")


class SmoothFunction:
    """Base class; subclasses implement `evaluate(batch) -> ndarray`."""

    def evaluate(self, x) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    def __add__(self, other):
        return Sum((self, _lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Sum((self, Scale(-1.0, _lift(other))))

    def __rsub__(self, other):
        return Sum((_lift(other), Scale(-1.0, self)))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Scale(float(other), self)
        return Product((self, other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Scale(float(other), self)
        return Product((other, self))

    def __neg__(self):
        return Scale(-1.0, self)


def _lift(x):
    return Constant(float(x)) if isinstance(x, (int, float)) else x


def _n(x) -> int:
    return batch_len(x)


# -- leaves -------------------------------------------------------------------

@dataclass(frozen=True)
class Constant(SmoothFunction):
    value: float

    def evaluate(self, x):
        return np.full(_n(x), float(self.value))


@dataclass(frozen=True)
class Monomial(SmoothFunction):
    exps: tuple
    coef: float = 1.0

    def __post_init__(self):
        exps = tuple(int(a) for a in self.exps)
        if any(a < 0 for a in exps):
            raise ValueError("monomial exponents must be nonnegative")
        object.__setattr__(self, "exps", exps)

    def evaluate(self, x):
        x = _vector_batch(x, len(self.exps))
        out = np.full(len(x), float(self.coef))
        for i, a in enumerate(self.exps):
            if a:
                out = out * x[:, i] ** a
        return out


def _vector_batch(x, dim=None):
    if isinstance(x, (TreeBatch, tuple)):
        raise StructureError("this term needs points with real coordinates")
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if dim is not None and x.shape[1] != dim:
        raise StructureError(f"term expects {dim} coordinates, got {x.shape[1]}")
    return x


def _spline_bump(d, r):
    q = np.clip(1.0 - (d / r) ** 2, 0.0, None)
    return q ** 3


def _smooth_bump(d, r):
    out = np.zeros_like(d)
    inside = d < r
    s = (d[inside] / r) ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s))
    return out


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)


def _smooth_transition(t):
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Bump(SmoothFunction):
    """Equals 1 at `center`, 0 outside the closed `radius` ball, values in [0, 1].

    order "c2" is the spline (1 - (d/r)^2)^3, "cinf" is exp(1 - 1/(1 - (d/r)^2)).
    """
    center: tuple
    radius: float
    order: str = "c2"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")

    def evaluate(self, x):
        x = _vector_batch(x, len(self.center))
        d = np.linalg.norm(x - np.asarray(self.center), axis=1)
        if self.order == "c2":
            return _spline_bump(d, self.radius)
        return _smooth_bump(d, self.radius)


@dataclass(frozen=True)
class Plateau(SmoothFunction):
    """1 on the closed `inner` ball, 0 outside the `outer` ball."""
    center: tuple
    inner: float
    outer: float
    order: str = "c2"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not 0 <= self.inner < self.outer:
            raise ValueError("plateau needs 0 <= inner < outer")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")

    def evaluate(self, x):
        x = _vector_batch(x, len(self.center))
        d = np.linalg.norm(x - np.asarray(self.center), axis=1)
        t = (self.outer - d) / (self.outer - self.inner)
        return _smoothstep(t) if self.order == "c2" else _smooth_transition(t)


@dataclass(frozen=True)
class RadialProfile(SmoothFunction):
    """profile(p_1 + ... + p_n); depends on the point only through its coordinate sum."""
    profile: SmoothFunction

    def evaluate(self, x):
        x = _vector_batch(x)
        return self.profile.evaluate(x.sum(axis=1)[:, None])


@dataclass(frozen=True)
class EdgeProfile(SmoothFunction):
    """profile(offset) on tree edge `edge`, 0 on every other edge.

    At a vertex the value is the profile's value at the matching end of `edge`
    if the vertex is one of its endpoints, else 0.
    """
    edge: int
    profile: SmoothFunction

    def evaluate(self, x):
        if not isinstance(x, TreeBatch):
            raise StructureError("edge profiles evaluate on tree points only")
        tree = x.tree
        e = tree.edges[self.edge]
        out = np.zeros(len(x))
        on = x.edge == self.edge
        if on.any():
            out[on] = self.profile.evaluate(x.offset[on][:, None])
        iu, iv = tree.vertex_index[e.u], tree.vertex_index[e.v]
        at_u = ~on & (x.vertex == iu)
        at_v = ~on & (x.vertex == iv)
        if at_u.any():
            out[at_u] = self.profile.evaluate(np.zeros((1, 1)))[0]
        if at_v.any():
            out[at_v] = self.profile.evaluate(np.full((1, 1), e.length))[0]
        return out


@dataclass(frozen=True)
class Factor(SmoothFunction):
    """f applied to factor `index` of a product point."""
    index: int
    f: SmoothFunction

    def evaluate(self, x):
        if not isinstance(x, tuple):
            raise StructureError("factor terms evaluate on product points only")
        return self.f.evaluate(x[self.index])


# -- internal nodes ----------------------------------------------------------

@dataclass(frozen=True)
class Sum(SmoothFunction):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(_lift(t) for t in self.terms))

    def evaluate(self, x):
        out = np.zeros(_n(x))
        for t in self.terms:
            out = out + t.evaluate(x)
        return out


@dataclass(frozen=True)
class Product(SmoothFunction):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(_lift(t) for t in self.terms))

    def evaluate(self, x):
        out = np.ones(_n(x))
        for t in self.terms:
            out = out * t.evaluate(x)
        return out


@dataclass(frozen=True)
class Scale(SmoothFunction):
    factor: float
    f: SmoothFunction

    def evaluate(self, x):
        return self.factor * self.f.evaluate(x)


@dataclass(frozen=True)
class Shift(SmoothFunction):
    offset: float
    f: SmoothFunction

    def evaluate(self, x):
        return self.f.evaluate(x) + self.offset


@dataclass(frozen=True)
class Dilate(SmoothFunction):
    """f(factor * x) on real-coordinate points."""
    factor: float
    f: SmoothFunction

    def evaluate(self, x):
        return self.f.evaluate(self.factor * _vector_batch(x))


@dataclass(frozen=True)
class Ratio(SmoothFunction):
    """num / den; callers guarantee den > 0 where it is evaluated."""
    num: SmoothFunction
    den: SmoothFunction

    def evaluate(self, x):
        return self.num.evaluate(x) / self.den.evaluate(x)


# -- evaluation --------------------------------------------------------------

def evaluate(f: SmoothFunction, p, space=None) -> float:
    """Value of f at a single point.

    With `space` given the point is validated (tolerance 0) and may use any of
    the accepted point spellings (vertex names on trees, nested tuples on
    products).
    """
    if space is None:
        return float(f.evaluate(np.atleast_2d(np.asarray(p, dtype=float)))[0])
    q = as_point(space, p)
    if not contains(space, q, 0.0):
        raise OutsideSpaceError(f"point {p!r} is outside {space!r}")
    return float(f.evaluate(to_batch(space, [q]))[0])


@dataclass(frozen=True)
class SupNorm:
    value: float
    modulus: float  # true sup <= value + modulus (nan if unknown)
    resolution: int


def sup_norm(f: SmoothFunction, space, resolution: int = 65, report: bool = False):
    """Grid estimate of sup |f| over `space`.

    Grids are nested in `resolution`, so the estimate is nondecreasing in it.
    With report=True also returns a modulus term bounding the gap to the true
    supremum when f is a polynomial on a simplex.
    """
    pts = grid_points(space, resolution)
    value = float(np.max(np.abs(f.evaluate(pts))))
    if not report:
        return value
    modulus = float("nan")
    if isinstance(space, Simplex):
        try:
            poly = to_poly(f, space.dim)
        except (NotPolynomialError, StructureError):
            poly = None
        if poly is not None:
            s = space.scale
            grad = np.zeros(space.dim)
            for a, c in poly.items():
                deg = sum(a)
                if deg:
                    grad += abs(c) * np.asarray(a) * s ** (deg - 1)
            modulus = float(np.linalg.norm(grad) * space.pitch(resolution) * math.sqrt(space.dim))
    return SupNorm(value, modulus, resolution)


# -- support bounds ----------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class EdgeInterval:
    edge: int
    lo: float
    hi: float


class _Full:
    def __repr__(self):
        return "FULL"


FULL = _Full()


def support_bound(f: SmoothFunction):
    """Finite union of balls / edge intervals containing supp f, or FULL."""
    if isinstance(f, Constant):
        return [] if f.value == 0 else FULL
    if isinstance(f, Monomial):
        return [] if f.coef == 0 else FULL
    if isinstance(f, Bump):
        return [Ball(f.center, f.radius)]
    if isinstance(f, Plateau):
        return [Ball(f.center, f.outer)]
    if isinstance(f, RadialProfile):
        return [] if support_bound(f.profile) == [] else FULL
    if isinstance(f, EdgeProfile):
        inner = support_bound(f.profile)
        if inner is FULL:
            return [EdgeInterval(f.edge, -math.inf, math.inf)]
        return [EdgeInterval(f.edge, b.center[0] - b.radius, b.center[0] + b.radius) for b in inner]
    if isinstance(f, Factor):
        return [] if support_bound(f.f) == [] else FULL
    if isinstance(f, Scale):
        return [] if f.factor == 0 else support_bound(f.f)
    if isinstance(f, Shift):
        return support_bound(f.f) if f.offset == 0 else FULL
    if isinstance(f, Dilate):
        inner = support_bound(f.f)
        if inner is FULL:
            return FULL
        a = abs(f.factor)
        return [Ball(tuple(c / f.factor for c in b.center), b.radius / a) for b in inner]
    if isinstance(f, Ratio):
        return support_bound(f.num)
    if isinstance(f, Sum):
        out = []
        for t in f.terms:
            s = support_bound(t)
            if s is FULL:
                return FULL
            out.extend(s)
        return out
    if isinstance(f, Product):
        bounds = [support_bound(t) for t in f.terms]
        if any(b == [] for b in bounds):
            return []
        finite = [b for b in bounds if b is not FULL]
        if not finite:
            return FULL
        out = finite[0]
        for b in finite[1:]:
            out = _intersect(out, b)
        return out
    raise TypeError(f"unknown term {f!r}")


def _intersect(a, b):
    out = []
    for x in a:
        for y in b:
            if isinstance(x, Ball) and isinstance(y, Ball):
                d = np.linalg.norm(np.subtract(x.center, y.center))
                if d < x.radius + y.radius:
                    out.append(x if x.radius <= y.radius else y)
            elif isinstance(x, EdgeInterval) and isinstance(y, EdgeInterval):
                if x.edge == y.edge and max(x.lo, y.lo) < min(x.hi, y.hi):
                    out.append(EdgeInterval(x.edge, max(x.lo, y.lo), min(x.hi, y.hi)))
            else:
                raise StructureError("cannot intersect ball and edge supports")
    return out


# -- exact polynomial forms --------------------------------------------------

def _padd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + v
    return out


def _pmul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0.0) + va * vb
    return out


def to_poly(f: SmoothFunction, nvars: int) -> dict:
    """{exponent tuple: coefficient} for a polynomial expression in nvars variables."""
    zero = (0,) * nvars
    if isinstance(f, Constant):
        return {zero: float(f.value)}
    if isinstance(f, Monomial):
        if len(f.exps) != nvars:
            raise StructureError(f"monomial has {len(f.exps)} exponents, space has {nvars}")
        return {f.exps: float(f.coef)}
    if isinstance(f, Sum):
        out = {}
        for t in f.terms:
            out = _padd(out, to_poly(t, nvars))
        return out
    if isinstance(f, Product):
        out = {zero: 1.0}
        for t in f.terms:
            out = _pmul(out, to_poly(t, nvars))
        return out
    if isinstance(f, Scale):
        return {k: f.factor * v for k, v in to_poly(f.f, nvars).items()}
    if isinstance(f, Shift):
        return _padd(to_poly(f.f, nvars), {zero: float(f.offset)})
    if isinstance(f, Dilate):
        return {k: v * f.factor ** sum(k) for k, v in to_poly(f.f, nvars).items()}
    if isinstance(f, RadialProfile):
        prof = to_poly(f.profile, 1)
        linear = {tuple(int(i == j) for j in range(nvars)): 1.0 for i in range(nvars)}
        out = {}
        for (k,), c in prof.items():
            term = {zero: c}
            for _ in range(k):
                term = _pmul(term, linear)
            out = _padd(out, term)
        return out
    raise NotPolynomialError(f"{type(f).__name__} is not a polynomial term")


def pieces_1d(f: SmoothFunction, a: float, b: float) -> list:
    """Split [a, b] at breakpoints; return (lo, hi, x0, P) with f(x) = P(x - x0) on (lo, hi)."""
    cuts = sorted({a, b} | {c for c in _breaks(f) if a < c < b})
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        x0 = 0.5 * (lo + hi)
        out.append((lo, hi, x0, _poly1d(f, Polynomial([x0, 1.0]), x0)))
    return out


def _breaks(f) -> set:
    if isinstance(f, (Constant, Monomial)):
        return set()
    if isinstance(f, Bump):
        if f.order != "c2" or len(f.center) != 1:
            raise NotPolynomialError("only 1-D spline bumps are piecewise polynomial")
        c = f.center[0]
        return {c - f.radius, c + f.radius}
    if isinstance(f, Plateau):
        if f.order != "c2" or len(f.center) != 1:
            raise NotPolynomialError("only 1-D spline plateaus are piecewise polynomial")
        c = f.center[0]
        return {c - f.outer, c - f.inner, c, c + f.inner, c + f.outer}
    if isinstance(f, RadialProfile):
        return _breaks(f.profile)
    if isinstance(f, (Sum, Product)):
        out = set()
        for t in f.terms:
            out |= _breaks(t)
        return out
    if isinstance(f, (Scale, Shift)):
        return _breaks(f.f)
    if isinstance(f, Dilate):
        return {c / f.factor for c in _breaks(f.f)}
    raise NotPolynomialError(f"{type(f).__name__} is not piecewise polynomial")


def _poly1d(f, X: Polynomial, mid: float) -> Polynomial:
    """Polynomial (in the local variable of X) equal to f(X) near the argument value mid."""
    if isinstance(f, Constant):
        return Polynomial([float(f.value)])
    if isinstance(f, Monomial):
        if len(f.exps) != 1:
            raise StructureError("1-D expression expected")
        return float(f.coef) * X ** f.exps[0]
    if isinstance(f, Bump):
        c, r = f.center[0], f.radius
        if abs(mid - c) >= r:
            return Polynomial([0.0])
        return (1.0 - ((X - c) / r) ** 2) ** 3
    if isinstance(f, Plateau):
        c = f.center[0]
        d = abs(mid - c)
        if d <= f.inner:
            return Polynomial([1.0])
        if d >= f.outer:
            return Polynomial([0.0])
        sign = 1.0 if mid >= c else -1.0
        t = (f.outer - sign * (X - c)) / (f.outer - f.inner)
        return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)
    if isinstance(f, RadialProfile):
        return _poly1d(f.profile, X, mid)
    if isinstance(f, Sum):
        out = Polynomial([0.0])
        for t in f.terms:
            out = out + _poly1d(t, X, mid)
        return out
    if isinstance(f, Product):
        out = Polynomial([1.0])
        for t in f.terms:
            out = out * _poly1d(t, X, mid)
        return out
    if isinstance(f, Scale):
        return f.factor * _poly1d(f.f, X, mid)
    if isinstance(f, Shift):
        return _poly1d(f.f, X, mid) + f.offset
    if isinstance(f, Dilate):
        return _poly1d(f.f, f.factor * X, f.factor * mid)
    raise NotPolynomialError(f"{type(f).__name__} is not piecewise polynomial")


def integrate_1d_exact(f: SmoothFunction, a: float, b: float, weight: SmoothFunction | None = None) -> float:
    """Exact integral of f (times weight) over [a, b] for piecewise-polynomial 1-D terms."""
    if b <= a:
        return 0.0
    g = f if weight is None else Product((f, weight))
    total = 0.0
    for lo, hi, x0, P in pieces_1d(g, a, b):
        Q = P.integ()
        total += Q(hi - x0) - Q(lo - x0)
    return float(total)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def integrate_1d(f: SmoothFunction, a: float, b: float, weight: SmoothFunction | None = None) -> float:
    """Exact when possible, else composite 20-point Gauss-Legendre on 64 panels per piece."""
    try:
        return integrate_1d_exact(f, a, b, weight)
    except NotPolynomialError:
        pass
    if b <= a:
        return 0.0
    try:
        cuts = sorted({a, b} | {c for c in _breaks_loose(f) | _breaks_loose(weight) if a < c < b})
    except NotPolynomialError:
        cuts = [a, b]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        edges = np.linspace(lo, hi, 65)
        mids, halves = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
        x = (mids[:, None] + halves[:, None] * _GL_NODES[None, :]).ravel()
        w = (halves[:, None] * _GL_WEIGHTS[None, :]).ravel()
        v = f.evaluate(x[:, None])
        if weight is not None:
            v = v * weight.evaluate(x[:, None])
        total += float(w @ v)
    return total


def _breaks_loose(f) -> set:
    """Breakpoints including C-infinity bumps (for panel placement only)."""
    if f is None:
        return set()
    if isinstance(f, (Bump, Plateau)) and len(f.center) == 1:
        c = f.center[0]
        if isinstance(f, Bump):
            return {c - f.radius, c + f.radius}
        return {c - f.outer, c - f.inner, c, c + f.inner, c + f.outer}
    if isinstance(f, (Sum, Product)):
        out = set()
        for t in f.terms:
            out |= _breaks_loose(t)
        return out
    if isinstance(f, (Scale, Shift, RadialProfile)):
        return _breaks_loose(f.f if not isinstance(f, RadialProfile) else f.profile)
    if isinstance(f, Dilate):
        return {c / f.factor for c in _breaks_loose(f.f)}
    if isinstance(f, Ratio):
        return _breaks_loose(f.num) | _breaks_loose(f.den)
    return set()


def radial_part(f: SmoothFunction):
    """A 1-D g with f(p) = g(sum(p)), or None if f is not visibly radial."""
    if isinstance(f, Constant):
        return f
    if isinstance(f, RadialProfile):
        return f.profile
    if isinstance(f, (Sum, Product)):
        parts = [radial_part(t) for t in f.terms]
        if any(p is None for p in parts):
            return None
        return type(f)(tuple(parts))
    if isinstance(f, Scale):
        g = radial_part(f.f)
        return None if g is None else Scale(f.factor, g)
    if isinstance(f, Shift):
        g = radial_part(f.f)
        return None if g is None else Shift(f.offset, g)
    if isinstance(f, Dilate):
        g = radial_part(f.f)
        return None if g is None else Dilate(f.factor, g)
    return None


def separate(f: SmoothFunction, nfactors: int) -> list:
    """Expand a product-space function into sum of coef * prod_k g_k(x_k).

    Returns a list of (coef, tuple of per-factor functions or None for 1).
    """
    ones = (None,) * nfactors
    if isinstance(f, Constant):
        return [(float(f.value), ones)]
    if isinstance(f, Factor):
        parts = list(ones)
        parts[f.index] = f.f
        return [(1.0, tuple(parts))]
    if isinstance(f, Sum):
        return [t for term in f.terms for t in separate(term, nfactors)]
    if isinstance(f, Scale):
        return [(f.factor * c, g) for c, g in separate(f.f, nfactors)]
    if isinstance(f, Shift):
        return separate(f.f, nfactors) + [(float(f.offset), ones)]
    if isinstance(f, Product):
        out = [(1.0, ones)]
        for t in f.terms:
            nxt = []
            for c1, g1 in out:
                for c2, g2 in separate(t, nfactors):
                    nxt.append((c1 * c2, tuple(_mul_opt(a, b) for a, b in zip(g1, g2))))
            out = nxt
        return out
    raise StructureError(f"{type(f).__name__} does not separate over product factors")


def _mul_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return Product((a, b))


def restrict_to_edge(f: SmoothFunction, edge: int) -> SmoothFunction:
    """The 1-D function t -> f(edge, t) on the interior of a tree edge."""
    if isinstance(f, Constant):
        return f
    if isinstance(f, EdgeProfile):
        return f.profile if f.edge == edge else Constant(0.0)
    if isinstance(f, (Sum, Product)):
        return type(f)(tuple(restrict_to_edge(t, edge) for t in f.terms))
    if isinstance(f, Scale):
        return Scale(f.factor, restrict_to_edge(f.f, edge))
    if isinstance(f, Shift):
        return Shift(f.offset, restrict_to_edge(f.f, edge))
    if isinstance(f, Ratio):
        return Ratio(restrict_to_edge(f.num, edge), restrict_to_edge(f.den, edge))
    raise StructureError(f"{type(f).__name__} is not a tree term")
