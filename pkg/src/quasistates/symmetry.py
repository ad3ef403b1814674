"""Vertex-permuting affine symmetries of the simplex and displaceability certificates.

Permuting the n+1 homogeneous coordinates of CP^n is a unitary, hence
Hamiltonian, map that sends torus orbits to torus orbits. On the moment
simplex it acts by permuting the extended coordinates (p_0, p_1, ..., p_n),
p_0 = scale - sum(p). A symmetry that moves a point (or moves a region off its
own closure) certifies that the corresponding fiber (or preimage) is
displaceable.

Certificates are one-sided: finding none says only that no symmetry works.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
import sympy

from .basespace import Simplex, as_point, contains
from .errors import DomainError, OutsideSpaceError
from .funcspace import Ball


@dataclass(frozen=True)
class AffineSymmetry:
    """Permutation `perm` of {0..n}: vertex i goes to vertex perm[i]."""
    perm: tuple
    scale: float = 1.0

    @property
    def n(self) -> int:
        return len(self.perm) - 1

    @cached_property
    def inverse_perm(self) -> tuple:
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return tuple(inv)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        ext = np.concatenate([self.scale - x.sum(axis=1, keepdims=True), x], axis=1)
        out = np.empty_like(ext)
        out[:, list(self.perm)] = ext
        out = out[:, 1:]
        return out[0] if single else out

    __call__ = apply

    @cached_property
    def affine(self):
        """(A, b) with g(p) = A p + b."""
        n = self.n
        b = self.apply(np.zeros(n))
        A = np.column_stack([self.apply(np.eye(n)[k]) - b for k in range(n)]) if n else np.zeros((0, 0))
        return A, b

    @cached_property
    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.affine[0], 2))

    def exact_affine(self):
        """(A, b) as sympy matrices with rational entries."""
        n, s = self.n, sympy.nsimplify(self.scale, rational=True)
        A = sympy.zeros(n, n)
        b = sympy.zeros(n, 1)
        for j in range(1, n + 1):
            src = self.inverse_perm[j]
            if src == 0:
                b[j - 1] = s
                for k in range(n):
                    A[j - 1, k] = -1
            else:
                A[j - 1, src - 1] = 1
        return A, b

    def compose(self, other: "AffineSymmetry") -> "AffineSymmetry":
        """self after other."""
        return AffineSymmetry(tuple(self.perm[other.perm[i]] for i in range(len(self.perm))), self.scale)

    def vertex_images(self) -> np.ndarray:
        verts = np.vstack([np.zeros(self.n), self.scale * np.eye(self.n)])
        return self.apply(verts)

    def cycles(self) -> str:
        """Cycle notation, e.g. "(1 2)"; "()" for the identity."""
        seen, out = set(), []
        for i in range(len(self.perm)):
            if i in seen or self.perm[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.perm[j]
            out.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(out) or "()"

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))


@dataclass(frozen=True)
class DisplaceabilityCertificate:
    symmetry: AffineSymmetry
    separation: float
    region: Optional[tuple] = None  # balls, for region certificates
    point: Optional[tuple] = None   # for point certificates

    def image(self):
        if self.point is not None:
            return tuple(self.symmetry.apply(self.point))
        return tuple(Ball(tuple(self.symmetry.apply(b.center)), self.symmetry.operator_norm * b.radius)
                     for b in self.region)


def symmetry_group(space: Simplex) -> list:
    """Adjacent transpositions (i i+1), generating the symmetric group on n+1 symbols."""
    n = space.dim
    out = []
    for i in range(n):
        perm = list(range(n + 1))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        out.append(AffineSymmetry(tuple(perm), space.scale))
    return out


def enumerate_group(space: Simplex) -> list:
    """Closure of the generators, sorted lexicographically by permutation (n <= 7)."""
    if space.dim > 7:
        raise DomainError("full enumeration is limited to n <= 7")
    gens = symmetry_group(space)
    identity = AffineSymmetry(tuple(range(space.dim + 1)), space.scale)
    seen = {identity.perm: identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = h.compose(g)
                if k.perm not in seen:
                    seen[k.perm] = k
                    nxt.append(k)
        frontier = nxt
    return [seen[p] for p in sorted(seen)]


def _lex_elements(space: Simplex) -> Iterable[AffineSymmetry]:
    for perm in itertools.permutations(range(space.dim + 1)):
        g = AffineSymmetry(perm, space.scale)
        if not g.is_identity:
            yield g


def displace_point(space: Simplex, p, tol: Optional[float] = None) -> Optional[DisplaceabilityCertificate]:
    """Lexicographically first symmetry moving p by more than tol, or None if p is fixed.

    Transpositions generate the group, so a point fixed by every transposition
    is fixed by everything; that case returns None without a full search.
    """
    q = as_point(space, p)
    if not contains(space, q, 0.0):
        raise OutsideSpaceError(f"point {p!r} is outside {space!r}")
    tol = 1e-12 * space.scale if tol is None else tol
    ext = space.extended(np.asarray(q))
    if np.ptp(ext) <= tol:
        return None
    x = np.asarray(q)
    for g in _lex_elements(space):
        sep = float(np.linalg.norm(g.apply(x) - x))
        if sep > tol:
            return DisplaceabilityCertificate(g, sep, point=q)
    return None


def region_separation(g: AffineSymmetry, balls) -> float:
    """Lower bound on the gap between g(union of balls) and the closed union.

    g(B(c, r)) lies in B(g(c), |A| r) with |A| the spectral norm.
    """
    norm = g.operator_norm
    best = np.inf
    for bi in balls:
        gc = g.apply(np.asarray(bi.center))
        for bj in balls:
            d = np.linalg.norm(gc - np.asarray(bj.center)) - norm * bi.radius - bj.radius
            best = min(best, d)
    return float(best)


def displace_region(space: Simplex, region, margin: float = 1e-12) -> Optional[DisplaceabilityCertificate]:
    """First symmetry (lexicographic) moving the union of balls off its closure, or None."""
    balls = tuple(b if isinstance(b, Ball) else Ball(*b) for b in region)
    if not balls:
        raise DomainError("empty region")
    if not any(space.distance(b.center) < b.radius or contains(space, b.center, 0.0) for b in balls):
        raise DomainError("region does not meet the simplex")
    for g in _lex_elements(space):
        sep = region_separation(g, balls)
        if sep > margin:
            return DisplaceabilityCertificate(g, sep, region=balls)
    return None


def verify_certificate(space: Simplex, cert: DisplaceabilityCertificate, margin: float = 1e-12) -> bool:
    if cert.point is not None:
        return float(np.linalg.norm(cert.symmetry.apply(cert.point) - np.asarray(cert.point))) > margin
    return region_separation(cert.symmetry, cert.region) > margin


@dataclass(frozen=True)
class FixedLocus:
    """Affine solution set of g(p) = p for all generators."""
    point: tuple          # a particular solution, exact rationals
    dimension: int        # dimension of the solution set

    @property
    def as_floats(self) -> tuple:
        return tuple(float(c) for c in self.point)


def fixed_locus(space: Simplex) -> FixedLocus:
    """Solve the stacked linear systems (A_g - I) p = -b_g exactly."""
    n = space.dim
    rows, rhs = [], []
    for g in symmetry_group(space):
        A, b = g.exact_affine()
        rows.append(A - sympy.eye(n))
        rhs.append(-b)
    M = sympy.Matrix.vstack(*rows)
    v = sympy.Matrix.vstack(*rhs)
    syms = sympy.symbols(f"p1:{n + 1}")
    sol = sympy.linsolve((M, v), *syms)
    if not sol:
        raise DomainError("generators have no common fixed point")
    (tup,) = tuple(sol)
    free = set().union(*(sympy.sympify(c).free_symbols for c in tup))
    particular = tuple(sympy.sympify(c).subs({s: 0 for s in free}) for c in tup)
    return FixedLocus(particular, n - M.rank())
