"""Parameter spaces: scaled simplices, measured trees and their products.

A simplex of dimension n and scale s is the moment polytope
{p : p_i >= 0, sum(p) <= s}; for s = 1 it is the image of the standard moment
map of CP^n. A measured tree stands in for the Reeb graph of a Morse function
on the sphere, each edge carrying a length and an area density. Products model
monotone products of projective spaces and stabilizations.

Points are plain tuples of floats on simplices, `TreePoint` on trees and
tuples of factor points on products. Every evaluation in the package is
vectorized, so each space also knows how to pack a list of points into a
batch (an (N, n) array, a `TreeBatch`, or a tuple of factor batches).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence, Union

import numpy as np

from .errors import (
    CycleError, DisconnectedError, DomainError, OutsideSpaceError,
    StructureError, ZeroMassError,
)


@dataclass(frozen=True)
class Simplex:
    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"simplex dimension must be a positive integer, got {self.dim!r}")
        if not self.scale > 0:
            raise DomainError(f"simplex scale must be positive, got {self.scale!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def vertices(self) -> np.ndarray:
        """Rows 0, s*e_1, ..., s*e_n."""
        return np.vstack([np.zeros(self.dim), self.scale * np.eye(self.dim)])

    @property
    def volume(self) -> float:
        return self.scale ** self.dim / math.factorial(self.dim)

    def barycenter(self) -> tuple:
        return (self.scale / (self.dim + 1),) * self.dim

    def extended(self, x) -> np.ndarray:
        """Prepend p_0 = scale - sum(p), giving n+1 barycentric-like coordinates."""
        x = np.asarray(x, dtype=float)
        p0 = self.scale - x.sum(axis=-1, keepdims=True)
        return np.concatenate([p0, x], axis=-1)

    def project(self, x) -> np.ndarray:
        """Euclidean projection onto the simplex."""
        x = np.asarray(x, dtype=float)
        y = np.clip(x, 0.0, None)
        if y.sum() <= self.scale:
            return y
        # projection onto {y >= 0, sum(y) = scale}
        u = np.sort(x)[::-1]
        css = np.cumsum(u) - self.scale
        idx = np.arange(1, len(u) + 1)
        rho = np.nonzero(u - css / idx > 0)[0][-1]
        theta = css[rho] / (rho + 1)
        return np.clip(x - theta, 0.0, None)

    def distance(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.project(x)))

    def lattice(self, m: int) -> np.ndarray:
        """All points scale*k/m with k a nonnegative integer vector, sum(k) <= m."""
        rows = [k for k in itertools.product(range(m + 1), repeat=self.dim) if sum(k) <= m] \
            if (m + 1) ** self.dim <= 2_000_000 else list(_compositions(self.dim, m))
        return self.scale * np.asarray(rows, dtype=float).reshape(-1, self.dim) / m

    def grid(self, resolution: int) -> np.ndarray:
        """Nested (dyadic) lattice plus the barycenter.

        The lattice for resolution r has 2**floor(log2(r - 1)) subdivisions per
        edge, so the grid for a larger resolution always contains the grid for a
        smaller one.
        """
        m = _dyadic(resolution)
        return np.vstack([self.lattice(m), np.asarray([self.barycenter()])])

    def pitch(self, resolution: int) -> float:
        return self.scale / _dyadic(resolution)


def _dyadic(resolution: int) -> int:
    if resolution < 2:
        raise DomainError("grid resolution must be at least 2")
    return 1 << int(math.floor(math.log2(resolution - 1)))


def _compositions(n, m):
    if n == 1:
        for k in range(m + 1):
            yield (k,)
        return
    for k in range(m + 1):
        for rest in _compositions(n - 1, m - k):
            yield (k,) + rest


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    length: float
    density: Any = 1.0  # float, or a 1-D SmoothFunction of the offset from u

    @property
    def constant_density(self) -> bool:
        return isinstance(self.density, (int, float))


@dataclass(frozen=True)
class TreePoint:
    """A point at `offset` along edge `edge`, measured from the edge's u end."""
    edge: int
    offset: float


@dataclass(frozen=True)
class TreeBatch:
    tree: "MeasuredTree"
    edge: np.ndarray
    offset: np.ndarray
    vertex: np.ndarray  # vertex index or -1 for interior points

    def __len__(self):
        return len(self.edge)


@dataclass(frozen=True, eq=False)
class MeasuredTree:
    vertices: tuple
    edges: tuple

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_masses(self) -> np.ndarray:
        return np.array([self.cumulative_mass(i, e.length) for i, e in enumerate(self.edges)])

    @property
    def total_mass(self) -> float:
        return float(self.edge_masses.sum())

    @cached_property
    def incidence(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            inc[e.u].append(i)
            inc[e.v].append(i)
        return inc

    def density_at(self, i: int, t) -> np.ndarray:
        e = self.edges[i]
        t = np.asarray(t, dtype=float)
        if e.constant_density:
            return np.full(t.shape, float(e.density))
        return e.density.evaluate(t.reshape(-1, 1)).reshape(t.shape)

    def cumulative_mass(self, i: int, t: float) -> float:
        """Mass of edge i between its u end and offset t."""
        e = self.edges[i]
        t = min(max(float(t), 0.0), e.length)
        if e.constant_density:
            return float(e.density) * t
        from .funcspace import integrate_1d
        return integrate_1d(e.density, 0.0, t)

    def offset_for_mass(self, i: int, c: float, side: str = "low") -> float:
        """Offset t with cumulative_mass(i, t) = c.

        With side="low" the smallest such t, with side="high" the largest (they
        differ on stretches of zero density).
        """
        e = self.edges[i]
        total = self.cumulative_mass(i, e.length)
        if c <= 0 and side == "low":
            return 0.0
        if c >= total and side == "high":
            return e.length
        lo, hi = 0.0, e.length
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            cm = self.cumulative_mass(i, mid)
            if (cm < c) if side == "low" else (cm <= c):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, e.length):
                break
        return hi if side == "low" else lo

    def vertex_point(self, name) -> TreePoint:
        if name not in self.vertex_index:
            raise OutsideSpaceError(f"no vertex named {name!r}")
        i = self.incidence[name][0]
        e = self.edges[i]
        return TreePoint(i, 0.0 if e.u == name else e.length)

    def vertex_of(self, p: TreePoint, tol: float = 0.0):
        e = self.edges[p.edge]
        if abs(p.offset) <= tol:
            return e.u
        if abs(p.offset - e.length) <= tol:
            return e.v
        return None

    def other_end(self, i: int, v):
        e = self.edges[i]
        return e.v if e.u == v else e.u

    def edge_grid(self, resolution: int) -> list:
        pts = []
        for i, e in enumerate(self.edges):
            for t in np.linspace(0.0, e.length, resolution):
                pts.append(TreePoint(i, float(t)))
        return pts


@dataclass(frozen=True)
class ProductSpace:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise DomainError("a product needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))


BaseSpace = Union[Simplex, MeasuredTree, ProductSpace]


def make_simplex(n: int, scale: float = 1.0) -> Simplex:
    return Simplex(n, scale)


def barycenter(space: Simplex) -> tuple:
    return space.barycenter()


def tree_from_edges(items: Sequence) -> MeasuredTree:
    """Build and validate a measured tree.

    `items` is a sequence of dicts with keys u, v, len and optional density
    (number or 1-D function of the offset), or of tuples (u, v, len[, density]).
    """
    edges = []
    for item in items:
        if isinstance(item, dict):
            u, v, length = item["u"], item["v"], item["len"]
            density = item.get("density", 1.0)
        else:
            u, v, length, *rest = item
            density = rest[0] if rest else 1.0
        if not length > 0:
            raise DomainError(f"edge {u}-{v} has nonpositive length {length}")
        if isinstance(density, (int, float)) and density < 0:
            raise DomainError(f"edge {u}-{v} has negative density")
        if u == v:
            raise CycleError(f"self-loop at {u!r}")
        edges.append(Edge(u, v, float(length), float(density) if isinstance(density, (int, float)) else density))
    if not edges:
        raise DomainError("a tree needs at least one edge")
    vertices = []
    for e in edges:
        for w in (e.u, e.v):
            if w not in vertices:
                vertices.append(w)
    # union-find: a repeated component join is a cycle
    parent = {w: w for w in vertices}

    def find(w):
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    for e in edges:
        a, b = find(e.u), find(e.v)
        if a == b:
            raise CycleError(f"edge {e.u}-{e.v} closes a cycle")
        parent[a] = b
    if len({find(w) for w in vertices}) > 1:
        raise DisconnectedError("edge graph is not connected")
    tree = MeasuredTree(tuple(vertices), tuple(edges))
    if not tree.total_mass > 0:
        raise ZeroMassError("tree has zero total measure")
    if np.any(tree.edge_masses < -1e-15):
        raise DomainError("edge density integrates to a negative mass")
    return tree


# -- points and batches -------------------------------------------------------

def as_point(space, p):
    """Normalize user input into the canonical point type for `space`."""
    if isinstance(space, Simplex):
        if isinstance(p, TreePoint) or np.ndim(p) != 1 or len(p) != space.dim:
            raise StructureError(f"expected a point with {space.dim} coordinates, got {p!r}")
        return tuple(float(x) for x in p)
    if isinstance(space, MeasuredTree):
        if isinstance(p, TreePoint):
            return p
        if isinstance(p, str):
            return space.vertex_point(p)
        if isinstance(p, (tuple, list)) and len(p) == 2:
            return TreePoint(int(p[0]), float(p[1]))
        raise StructureError(f"expected a tree point, got {p!r}")
    if isinstance(space, ProductSpace):
        if not isinstance(p, (tuple, list)) or len(p) != len(space.factors):
            raise StructureError(f"expected {len(space.factors)} factor points, got {p!r}")
        return tuple(as_point(f, q) for f, q in zip(space.factors, p))
    raise StructureError(f"unknown space {space!r}")


def contains(space, p, tol: float = 0.0) -> bool:
    p = as_point(space, p)
    if isinstance(space, Simplex):
        x = np.asarray(p)
        return bool(np.all(x >= -tol) and x.sum() <= space.scale + tol)
    if isinstance(space, MeasuredTree):
        if not 0 <= p.edge < len(space.edges):
            return False
        return -tol <= p.offset <= space.edges[p.edge].length + tol
    return all(contains(f, q, tol) for f, q in zip(space.factors, p))


def to_batch(space, points):
    """Pack canonical points into the vectorized representation."""
    if isinstance(space, Simplex):
        return np.asarray(points, dtype=float).reshape(-1, space.dim)
    if isinstance(space, MeasuredTree):
        pts = list(points)
        edge = np.array([q.edge for q in pts], dtype=int)
        offset = np.array([q.offset for q in pts], dtype=float)
        return tree_batch(space, edge, offset)
    pts = list(points)
    return tuple(to_batch(f, [q[k] for q in pts]) for k, f in enumerate(space.factors))


def tree_batch(tree: MeasuredTree, edge, offset, tol: float = 1e-12) -> TreeBatch:
    edge = np.asarray(edge, dtype=int)
    offset = np.asarray(offset, dtype=float)
    lengths = np.array([e.length for e in tree.edges])
    us = np.array([tree.vertex_index[e.u] for e in tree.edges])
    vs = np.array([tree.vertex_index[e.v] for e in tree.edges])
    vertex = np.full(edge.shape, -1)
    at_u = np.abs(offset) <= tol
    at_v = np.abs(offset - lengths[edge]) <= tol * np.maximum(1.0, lengths[edge])
    vertex[at_v] = vs[edge[at_v]]
    vertex[at_u] = us[edge[at_u]]
    return TreeBatch(tree, edge, offset, vertex)


def batch_len(batch) -> int:
    if isinstance(batch, tuple):
        return batch_len(batch[0])
    return len(batch)


def grid_points(space, resolution: int):
    """A batch of grid points covering `space` (nested in resolution)."""
    if isinstance(space, Simplex):
        return space.grid(resolution)
    if isinstance(space, MeasuredTree):
        m = _dyadic(resolution)
        return to_batch(space, space.edge_grid(m + 1))
    parts = [grid_points(f, resolution) for f in space.factors]
    sizes = [batch_len(b) for b in parts]
    idx = np.indices(sizes).reshape(len(sizes), -1)
    return tuple(take(b, i) for b, i in zip(parts, idx))


def take(batch, idx):
    """Select rows of a batch."""
    if isinstance(batch, tuple):
        return tuple(take(b, idx) for b in batch)
    if isinstance(batch, TreeBatch):
        return TreeBatch(batch.tree, batch.edge[idx], batch.offset[idx], batch.vertex[idx])
    return batch[idx]
