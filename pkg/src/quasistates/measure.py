"""Integration against pushforward volumes and quasi-state measures.

The pushforward of the symplectic volume of CP^n (normalized to total volume
1) under the standard moment map is uniform on the unit simplex, i.e.
n! times Lebesgue measure. A `PushforwardMeasure` on a simplex is therefore a
uniform measure of a given total mass; on a tree it is the edge density; on a
product it is the product measure.

Three engines:

    exact   Dirichlet monomial formula, exact radial reduction, exact 1-D
            piecewise polynomials, Fubini on products
    quad    deterministic simplex rules (conical product or Grundmann-Moller)
    mc      seeded Monte Carlo with a standard error
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .basespace import (
    MeasuredTree, ProductSpace, Simplex, as_point, contains, take, to_batch,
    tree_batch,
)
from .errors import NotPolynomialError, OutsideSpaceError, StructureError
from .funcspace import (
    Constant, Monomial, SmoothFunction, integrate_1d_exact,
    radial_part, restrict_to_edge, separate, to_poly,
)
from .quadrature import (
    conical_rule, gauss_legendre_panels, grundmann_moller_rule,
    product_weights,
)


@dataclass(frozen=True)
class PushforwardMeasure:
    space: object
    mass: float = 1.0
    factors: tuple = ()

    @property
    def total_mass(self) -> float:
        if isinstance(self.space, ProductSpace):
            return float(np.prod([m.total_mass for m in self.factors]))
        return float(self.mass)


def pushforward(space, mass: Optional[float] = None) -> PushforwardMeasure:
    """Default volume on `space`: mass 1 on simplices, the tree's own density, products of these."""
    if isinstance(space, Simplex):
        return PushforwardMeasure(space, 1.0 if mass is None else float(mass))
    if isinstance(space, MeasuredTree):
        if mass is not None and not math.isclose(mass, space.total_mass):
            raise ValueError("a tree measure's mass is fixed by its edge densities")
        return PushforwardMeasure(space, space.total_mass)
    if isinstance(space, ProductSpace):
        return PushforwardMeasure(space, 1.0, tuple(pushforward(f) for f in space.factors))
    raise StructureError(f"unknown space {space!r}")


@dataclass(frozen=True)
class QuasiStateMeasure:
    """A Dirac mass at a point, or a product of factor measures."""
    space: object
    point: object = None
    mass: float = 1.0
    factors: tuple = ()

    @property
    def kind(self) -> str:
        return "product" if self.factors else "dirac"

    @property
    def total_mass(self) -> float:
        if self.factors:
            return float(np.prod([s.total_mass for s in self.factors]))
        return float(self.mass)


def dirac(space, point, mass: float = 1.0) -> QuasiStateMeasure:
    return QuasiStateMeasure(space, as_point(space, point), float(mass))


def product_sigma(space: ProductSpace, factors) -> QuasiStateMeasure:
    factors = tuple(factors)
    if len(factors) != len(space.factors):
        raise StructureError("one factor measure per product factor")
    return QuasiStateMeasure(space, tuple(s.point for s in factors), 1.0, factors)


# -- exact -------------------------------------------------------------------

def dirichlet_monomial(exps, n: int) -> Fraction:
    """Integral of prod p_i^a_i over the unit simplex in R^n: prod(a_i!) / (n + sum a)!."""
    num = 1
    for a in exps:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(n + sum(exps)))


def integrate_exact(m: PushforwardMeasure, f: SmoothFunction) -> float:
    space = m.space
    if isinstance(space, Simplex):
        n, s = space.dim, space.scale
        try:
            poly = to_poly(f, n)
        except NotPolynomialError:
            poly = None
        if poly is not None:
            total = 0.0
            for a, c in poly.items():
                if c:
                    # uniform density mass * n! / s^n on the scaled simplex
                    w = dirichlet_monomial(a, n) * math.factorial(n)
                    total += c * float(w) * s ** sum(a)
            return m.mass * total
        g = radial_part(f)
        if g is not None:
            # coordinate sum of a uniform point on the s-simplex has density n t^(n-1) / s^n
            return m.mass * integrate_1d_exact(g, 0.0, s, Monomial((n - 1,), n / s ** n))
        if n == 1:
            return m.mass * integrate_1d_exact(f, 0.0, s) / s
        raise NotPolynomialError("exact engine handles polynomials, radial piecewise polynomials and 1-D pieces")
    if isinstance(space, MeasuredTree):
        total = 0.0
        for i, e in enumerate(space.edges):
            g = restrict_to_edge(f, i)
            density = Constant(e.density) if e.constant_density else e.density
            total += integrate_1d_exact(g, 0.0, e.length, density)
        return total
    if isinstance(space, ProductSpace):
        total = 0.0
        for coef, parts in separate(f, len(space.factors)):
            if coef == 0:
                continue
            val = coef
            for fm, g in zip(m.factors, parts):
                val *= fm.total_mass if g is None else integrate_exact(fm, g)
            total += val
        return total
    raise StructureError(f"unknown space {space!r}")


# -- quadrature --------------------------------------------------------------

def quadrature_rule(m: PushforwardMeasure, order: int = 8, panels: int = 1, rule: str = "conical"):
    """(batch, weights) with weights summing to the measure's total mass."""
    space = m.space
    if isinstance(space, Simplex):
        if rule == "conical":
            X, W = conical_rule(space.dim, space.scale, order, panels)
        elif rule == "gm":
            X, W = grundmann_moller_rule(space.dim, space.scale, order)
        else:
            raise ValueError(f"unknown rule {rule!r}")
        return X, W * (m.mass / space.volume)
    if isinstance(space, MeasuredTree):
        edges, offsets, weights = [], [], []
        for i, e in enumerate(space.edges):
            x, w = gauss_legendre_panels(0.0, e.length, order, panels)
            edges.append(np.full(len(x), i))
            offsets.append(x)
            weights.append(w * space.density_at(i, x))
        batch = tree_batch(space, np.concatenate(edges), np.concatenate(offsets))
        return batch, np.concatenate(weights)
    if isinstance(space, ProductSpace):
        rules = [quadrature_rule(fm, order, panels, rule) for fm in m.factors]
        idx, W = product_weights([w for _, w in rules])
        return tuple(take(b, i) for (b, _), i in zip(rules, idx)), W
    raise StructureError(f"unknown space {space!r}")


def integrate_quadrature(m: PushforwardMeasure, f: SmoothFunction, order: int = 8,
                         panels: int = 1, rule: str = "conical") -> float:
    if order < 1:
        raise ValueError("quadrature order must be positive")
    X, W = quadrature_rule(m, order, panels, rule)
    return float(W @ f.evaluate(X))


# -- Monte Carlo -------------------------------------------------------------

def sample(m: PushforwardMeasure, size: int, rng: np.random.Generator):
    """Draw points and importance weights (mean of weights*f estimates the integral)."""
    space = m.space
    if isinstance(space, Simplex):
        # exponential spacings: normalized i.i.d. exponentials are uniform on the simplex
        E = rng.standard_exponential((size, space.dim + 1))
        X = space.scale * E[:, 1:] / E.sum(axis=1, keepdims=True)
        return X, np.full(size, m.mass)
    if isinstance(space, MeasuredTree):
        masses = space.edge_masses
        total = masses.sum()
        edge = rng.choice(len(masses), size=size, p=masses / total)
        lengths = np.array([e.length for e in space.edges])
        offset = rng.random(size) * lengths[edge]
        w = np.empty(size)
        for i in range(len(masses)):
            sel = edge == i
            if sel.any():
                w[sel] = total * space.density_at(i, offset[sel]) * lengths[i] / masses[i]
        return tree_batch(space, edge, offset), w
    if isinstance(space, ProductSpace):
        parts = [sample(fm, size, rng) for fm in m.factors]
        W = np.ones(size)
        for _, w in parts:
            W = W * w
        return tuple(b for b, _ in parts), W
    raise StructureError(f"unknown space {space!r}")


def integrate_monte_carlo(m: PushforwardMeasure, f: SmoothFunction, samples: int = 100_000,
                          seed: int = 0, shards: int = 1):
    """(estimate, standard_error); bit-stable for fixed (seed, shards)."""
    if samples < 2:
        raise ValueError("need at least two samples")
    streams = np.random.SeedSequence(seed).spawn(shards)
    sizes = [samples // shards + (k < samples % shards) for k in range(shards)]
    values = []
    for ss, size in zip(streams, sizes):
        if size:
            X, w = sample(m, size, np.random.default_rng(ss))
            values.append(w * f.evaluate(X))
    v = np.concatenate(values)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


# -- sigma -------------------------------------------------------------------

def integrate_sigma(sigma: QuasiStateMeasure, f: SmoothFunction) -> float:
    space = sigma.space
    if not contains(space, sigma.point, 1e-12):
        raise OutsideSpaceError(f"Dirac point {sigma.point!r} lies outside {space!r}")
    value = float(f.evaluate(to_batch(space, [sigma.point]))[0])
    return sigma.total_mass * value


# -- dispatch ----------------------------------------------------------------

ENGINES = ("auto", "exact", "quad", "mc")


def integrate(m: PushforwardMeasure, f: SmoothFunction, engine: str = "auto", *,
              order: int = 8, panels: int = 1, rule: str = "conical",
              samples: int = 100_000, seed: int = 0, shards: int = 1) -> float:
    if engine == "exact":
        return integrate_exact(m, f)
    if engine == "auto":
        try:
            return integrate_exact(m, f)
        except (NotPolynomialError, StructureError):
            return integrate_quadrature(m, f, order, panels, rule)
    if engine == "quad":
        return integrate_quadrature(m, f, order, panels, rule)
    if engine == "mc":
        return integrate_monte_carlo(m, f, samples, seed, shards)[0]
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
