"""Deterministic simplex rules.

Two families:

* conical product (collapsed coordinates) rules: tensor Gauss-Legendre on the
  cube pulled to the simplex by x_k = u_k * prod_{i<k} (1 - u_i); positive
  weights, optionally composite over a uniform panel grid in u;
* Grundmann-Moller rules of degree 2s+1 (signed weights, no composite form).

Rules are returned as (points, weights) on the scaled simplex with weights
summing to its Lebesgue volume.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


@lru_cache(maxsize=64)
def _conical_unit(n: int, q: int, panels: int):
    nodes, weights = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u1 = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w1 = (half[:, None] * weights[None, :]).ravel()
    grids = np.meshgrid(*([u1] * n), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.ones(len(U))
    for wk in np.meshgrid(*([w1] * n), indexing="ij"):
        W = W * wk.ravel()
    X = np.empty_like(U)
    rest = np.ones(len(U))
    for k in range(n):
        X[:, k] = U[:, k] * rest
        W = W * rest
        rest = rest * (1.0 - U[:, k])
    return X, W


def conical_rule(n: int, scale: float = 1.0, degree: int = 8, panels: int = 1):
    """Positive rule exact for polynomials of total degree <= degree when panels == 1.

    After collapsing, a degree-d polynomial times the Jacobian
    prod (1-u_i)^(n-i) has degree <= d + n - 1 in each u_k, so
    q = ceil((d + n) / 2) Gauss points per axis suffice; composite panels keep
    that exactness piecewise.
    """
    q = max(1, math.ceil((degree + n) / 2))
    X, W = _conical_unit(n, q, panels)
    return scale * X, W * scale ** n


@lru_cache(maxsize=64)
def _gm_unit(n: int, s: int):
    d = 2 * s + 1
    pts, wts = [], []
    for i in range(s + 1):
        w = (-1) ** i * 2.0 ** (-2 * s) * (d + n - 2 * i) ** d / (
            math.factorial(i) * math.factorial(d + n - i))
        for beta in _compositions(s - i, n + 1):
            bary = (2 * np.asarray(beta, dtype=float) + 1) / (d + n - 2 * i)
            pts.append(bary[1:])
            wts.append(w)
    return np.asarray(pts), np.asarray(wts)


def grundmann_moller_rule(n: int, scale: float = 1.0, degree: int = 7):
    """Grundmann-Moller rule of odd degree 2s+1 >= degree on the scaled simplex."""
    s = max(0, math.ceil((degree - 1) / 2))
    X, W = _gm_unit(n, s)
    return scale * X, W * scale ** n


def gauss_legendre_panels(a: float, b: float, degree: int = 8, panels: int = 1):
    q = max(1, math.ceil((degree + 1) / 2))
    nodes, weights = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def tensor_indices(sizes):
    return [idx.ravel() for idx in np.indices(sizes)]


def product_weights(weight_list):
    sizes = [len(w) for w in weight_list]
    idx = tensor_indices(sizes)
    W = np.ones(int(np.prod(sizes)))
    for w, i in zip(weight_list, idx):
        W = W * w[i]
    return idx, W


__all__ = [
    "conical_rule", "grundmann_moller_rule", "gauss_legendre_panels",
    "product_weights", "tensor_indices",
]
