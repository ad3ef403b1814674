"""JSON formats for spaces, functions, points and sigma measures.

    {"kind": "simplex", "n": 2, "scale": 1.0}
    {"kind": "tree", "edges": [{"u": "a", "v": "b", "len": 1.0, "density": 1.0}]}
    {"kind": "product", "factors": [...]}

    {"kind": "monomial", "exps": [2, 1], "coef": 1.0}
    {"kind": "bump", "center": [0.333, 0.333], "r": 0.1}
    {"kind": "radial", "profile": {...}}
    {"kind": "sum", "terms": [...]}

plus const, product, scale, shift, dilate, plateau, ratio, edge and factor
terms (see `function_from_json`). Tree densities may be numbers or 1-D
function objects.
"""
from __future__ import annotations

import json
from pathlib import Path

from .basespace import (
    MeasuredTree, ProductSpace, Simplex, TreePoint, as_point, tree_from_edges,
)
from .errors import DomainError
from .funcspace import (
    Ball, Bump, Constant, Dilate, EdgeProfile, Factor, Monomial, Plateau,
    Product, RadialProfile, Ratio, Scale, Shift, SmoothFunction, Sum,
)
from .measure import QuasiStateMeasure, dirac, product_sigma


class FormatError(DomainError):
    pass


def _req(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise FormatError(f"{where}: expected an object, got {type(d).__name__}")
    if key not in d:
        raise FormatError(f"{where}: missing field {key!r}")
    return d[key]


# -- spaces --------------------------------------------------------------------

def space_from_json(d, where: str = "space"):
    kind = _req(d, "kind", where)
    if kind == "simplex":
        return Simplex(int(_req(d, "n", where)), float(d.get("scale", 1.0)))
    if kind == "tree":
        edges = []
        for k, e in enumerate(_req(d, "edges", where)):
            w = f"{where}.edges[{k}]"
            dens = e.get("density", 1.0) if isinstance(e, dict) else 1.0
            if isinstance(dens, dict):
                dens = function_from_json(dens, f"{w}.density")
            edges.append({"u": _req(e, "u", w), "v": _req(e, "v", w), "len": float(_req(e, "len", w)),
                          "density": dens})
        return tree_from_edges(edges)
    if kind == "product":
        return ProductSpace(tuple(space_from_json(f, f"{where}.factors[{k}]")
                                  for k, f in enumerate(_req(d, "factors", where))))
    raise FormatError(f"{where}: unknown space kind {kind!r}")


def space_to_json(space) -> dict:
    if isinstance(space, Simplex):
        return {"kind": "simplex", "n": space.dim, "scale": space.scale}
    if isinstance(space, MeasuredTree):
        return {"kind": "tree", "edges": [
            {"u": e.u, "v": e.v, "len": e.length,
             "density": e.density if e.constant_density else function_to_json(e.density)}
            for e in space.edges]}
    if isinstance(space, ProductSpace):
        return {"kind": "product", "factors": [space_to_json(f) for f in space.factors]}
    raise TypeError(f"cannot serialize {space!r}")


# -- functions ------------------------------------------------------------------

def function_from_json(d, where: str = "function") -> SmoothFunction:
    kind = _req(d, "kind", where)
    sub = lambda key: function_from_json(_req(d, key, where), f"{where}.{key}")  # noqa: E731
    terms = lambda: tuple(function_from_json(t, f"{where}.terms[{k}]")  # noqa: E731
                          for k, t in enumerate(_req(d, "terms", where)))
    try:
        if kind == "monomial":
            return Monomial(tuple(_req(d, "exps", where)), float(d.get("coef", 1.0)))
        if kind == "const":
            return Constant(float(_req(d, "value", where)))
        if kind == "bump":
            return Bump(tuple(_req(d, "center", where)), float(_req(d, "r", where)), d.get("order", "c2"))
        if kind == "plateau":
            return Plateau(tuple(_req(d, "center", where)), float(_req(d, "inner", where)),
                           float(_req(d, "outer", where)), d.get("order", "c2"))
        if kind == "radial":
            return RadialProfile(sub("profile"))
        if kind == "edge":
            return EdgeProfile(int(_req(d, "edge", where)), sub("profile"))
        if kind == "factor":
            return Factor(int(_req(d, "index", where)), sub("f"))
        if kind == "sum":
            return Sum(terms())
        if kind == "product":
            return Product(terms())
        if kind == "scale":
            return Scale(float(_req(d, "factor", where)), sub("f"))
        if kind == "shift":
            return Shift(float(_req(d, "offset", where)), sub("f"))
        if kind == "dilate":
            return Dilate(float(_req(d, "factor", where)), sub("f"))
        if kind == "ratio":
            return Ratio(sub("num"), sub("den"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{where}: {exc}") from exc
    raise FormatError(f"{where}: unknown function kind {kind!r}")


def function_to_json(f: SmoothFunction) -> dict:
    if isinstance(f, Monomial):
        return {"kind": "monomial", "exps": list(f.exps), "coef": f.coef}
    if isinstance(f, Constant):
        return {"kind": "const", "value": f.value}
    if isinstance(f, Bump):
        return {"kind": "bump", "center": list(f.center), "r": f.radius, "order": f.order}
    if isinstance(f, Plateau):
        return {"kind": "plateau", "center": list(f.center), "inner": f.inner, "outer": f.outer,
                "order": f.order}
    if isinstance(f, RadialProfile):
        return {"kind": "radial", "profile": function_to_json(f.profile)}
    if isinstance(f, EdgeProfile):
        return {"kind": "edge", "edge": f.edge, "profile": function_to_json(f.profile)}
    if isinstance(f, Factor):
        return {"kind": "factor", "index": f.index, "f": function_to_json(f.f)}
    if isinstance(f, (Sum, Product)):
        return {"kind": "sum" if isinstance(f, Sum) else "product",
                "terms": [function_to_json(t) for t in f.terms]}
    if isinstance(f, Scale):
        return {"kind": "scale", "factor": f.factor, "f": function_to_json(f.f)}
    if isinstance(f, Shift):
        return {"kind": "shift", "offset": f.offset, "f": function_to_json(f.f)}
    if isinstance(f, Dilate):
        return {"kind": "dilate", "factor": f.factor, "f": function_to_json(f.f)}
    if isinstance(f, Ratio):
        return {"kind": "ratio", "num": function_to_json(f.num), "den": function_to_json(f.den)}
    raise TypeError(f"cannot serialize {f!r}")


# -- points, balls and sigma ---------------------------------------------------------

def point_from_json(space, d):
    if isinstance(space, MeasuredTree):
        if isinstance(d, dict):
            if "vertex" in d:
                return space.vertex_point(d["vertex"])
            return TreePoint(int(_req(d, "edge", "point")), float(_req(d, "offset", "point")))
        return as_point(space, d)
    if isinstance(space, ProductSpace):
        return tuple(point_from_json(f, q) for f, q in zip(space.factors, d))
    return as_point(space, d)


def point_to_json(space, p):
    if isinstance(space, MeasuredTree):
        v = space.vertex_of(p)
        return {"vertex": v} if v is not None else {"edge": p.edge, "offset": p.offset}
    if isinstance(space, ProductSpace):
        return [point_to_json(f, q) for f, q in zip(space.factors, p)]
    return list(p)


def balls_from_json(items) -> list:
    return [Ball(tuple(_req(b, "center", f"balls[{k}]")), float(_req(b, "r", f"balls[{k}]")))
            for k, b in enumerate(items)]


def sigma_from_json(space, d) -> QuasiStateMeasure:
    kind = _req(d, "kind", "sigma")
    if kind == "dirac":
        return dirac(space, point_from_json(space, _req(d, "point", "sigma")), float(d.get("mass", 1.0)))
    if kind == "product":
        if not isinstance(space, ProductSpace):
            raise FormatError("sigma: product measure on a non-product space")
        return product_sigma(space, [sigma_from_json(f, s) for f, s in zip(space.factors, _req(d, "factors", "sigma"))])
    raise FormatError(f"sigma: unknown kind {kind!r}")


def load_json(path) -> object:
    """Parse a UTF-8 JSON file; json.JSONDecodeError carries line and column."""
    return json.loads(Path(path).read_text(encoding="utf-8"))
