"""Median of a measured tree.

A median is a point m such that every component of T minus m carries at most
half of the total mass. The median set is a point or a path (a stretch of
zero density separating two balanced halves); in the second case we return the
midpoint of the path and flag the result as non-unique.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .basespace import MeasuredTree, TreePoint


@dataclass(frozen=True)
class MedianResult:
    point: TreePoint
    vertex: Optional[str]
    unique: bool
    set_length: float = 0.0


def branch_masses(tree: MeasuredTree) -> dict:
    """{(v, edge): mass of the component of T - v containing that edge}."""
    root = tree.vertices[0]
    masses = tree.edge_masses
    total = float(masses.sum())
    parent = {root: None}
    order = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for i in tree.incidence[v]:
            w = tree.other_end(i, v)
            if w not in parent:
                parent[w] = (v, i)
                order.append(w)
                stack.append(w)
    sub = {v: 0.0 for v in tree.vertices}
    for v in reversed(order):
        if parent[v] is not None:
            u, i = parent[v]
            sub[u] += sub[v] + masses[i]
    out = {}
    for v in tree.vertices:
        if parent[v] is None:
            continue
        u, i = parent[v]
        out[(u, i)] = masses[i] + sub[v]
        out[(v, i)] = total - sub[v]
    return out


def _mass_from(tree, i, v, c, side="low"):
    """Offset on edge i at which the mass measured from endpoint v equals c."""
    e = tree.edges[i]
    if v == e.u:
        return tree.offset_for_mass(i, c, side)
    m = float(tree.edge_masses[i])
    flip = "high" if side == "low" else "low"
    return tree.offset_for_mass(i, m - c, flip)


def tree_median(tree: MeasuredTree, tol: float = 1e-12) -> MedianResult:
    total = tree.total_mass
    half = 0.5 * total
    mtol = tol * total
    branches = branch_masses(tree)
    masses = tree.edge_masses

    # walk toward the heavy side
    v = tree.vertices[0]
    point = None
    for _ in range(len(tree.vertices) + 1):
        heavy = [(i, branches[(v, i)]) for i in tree.incidence[v] if branches[(v, i)] > half + mtol]
        if not heavy:
            point = tree.vertex_point(v)
            break
        (i, B), = heavy
        target = B - half
        if target < masses[i] - mtol:
            point = TreePoint(i, _mass_from(tree, i, v, target))
            break
        v = tree.other_end(i, v)
    assert point is not None, "median walk did not terminate"

    # every median lies where the mass from u equals branch(u -> v) - half
    intervals = []
    for i, e in enumerate(tree.edges):
        target = branches[(e.u, i)] - half
        if -mtol <= target <= masses[i] + mtol:
            lo = tree.offset_for_mass(i, target - mtol, "low")
            hi = tree.offset_for_mass(i, target + mtol, "high")
            if hi - lo > 1e-9 * e.length:
                intervals.append((i, lo, hi))
    length = sum(hi - lo for _, lo, hi in intervals)
    if not intervals:
        return MedianResult(point, tree.vertex_of(point, 1e-12 * max(1.0, tree.edges[point.edge].length)), True)
    mid = _path_midpoint(tree, intervals)
    if mid is None:
        mid = point
    return MedianResult(mid, tree.vertex_of(mid, 1e-12), False, length)


def _path_midpoint(tree, intervals) -> Optional[TreePoint]:
    def node(i, t):
        e = tree.edges[i]
        if t <= 1e-12 * e.length:
            return ("v", e.u)
        if t >= e.length * (1 - 1e-12):
            return ("v", e.v)
        return ("p", i, t)

    adj = {}
    segs = []
    for k, (i, lo, hi) in enumerate(intervals):
        a, b = node(i, lo), node(i, hi)
        segs.append((i, lo, hi, a, b))
        adj.setdefault(a, []).append(k)
        adj.setdefault(b, []).append(k)
    if any(len(v) > 2 for v in adj.values()):
        return None
    ends = [n for n, ks in adj.items() if len(ks) == 1]
    if len(ends) != 2:
        return None
    total = sum(hi - lo for _, lo, hi, _, _ in segs)
    goal = 0.5 * total
    cur, used, acc = ends[0], set(), 0.0
    while True:
        (k,) = [k for k in adj[cur] if k not in used]
        used.add(k)
        i, lo, hi, a, b = segs[k]
        seg = hi - lo
        forward = a == cur
        if acc + seg >= goal:
            d = goal - acc
            return TreePoint(i, lo + d if forward else hi - d)
        acc += seg
        cur = b if forward else a
