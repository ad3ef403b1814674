"""Executable partition-of-unity argument for the evaluation formula.

Given f on the moment simplex and the special point p*:

1. flatten: f' = chi f(p*) + (1 - chi) f with chi == 1 on the gamma-ball and
   0 outside the 2 gamma-ball, so f' - f'(p*) vanishes near p*;
2. cover the simplex by balls U_0, ..., U_m of radius gamma/2 with p* in U_0
   and p* outside the closure of every other U_j;
3. split f' - f'(p*) with the normalized bumps of the cover; every piece away
   from p* is supported in a set moved off itself by a vertex permutation, so
   the quasimorphism equals its Calabi value there;
4. sum the Calabi values and compare with the direct formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .basespace import Simplex
from .errors import CoverError, DecompositionError, StructureError
from .funcspace import (
    Ball, Bump, Constant, Plateau, Product, Ratio, Scale, Shift, SmoothFunction,
    Sum, evaluate,
)
from .measure import quadrature_rule, sample
from .quadrature import gauss_legendre_panels
from .quasistate import QuasiStateModel, ToricHamiltonian, special_point, zeta
from .symmetry import DisplaceabilityCertificate, displace_region

DEFAULT_SWEEP = (0.2, 0.1, 0.05, 0.025)


@dataclass(frozen=True)
class FlattenResult:
    fprime: SmoothFunction
    epsilon_achieved: float
    gamma: float
    value_at_pstar: float


def _ball_grid(space: Simplex, center, radius: float, resolution: int) -> np.ndarray:
    n = space.dim
    per_axis = max(3, min(resolution, int(2e6 ** (1.0 / n))))
    axes = [np.linspace(c - radius, c + radius, per_axis) for c in center]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    inside = np.linalg.norm(pts - np.asarray(center), axis=1) <= radius
    inside &= np.all(pts >= 0, axis=1) & (pts.sum(axis=1) <= space.scale)
    return np.vstack([pts[inside], np.atleast_2d(center)])


def flatten(f: SmoothFunction, pstar, gamma: float, space: Optional[Simplex] = None,
            resolution: int = 401, order: str = "c2") -> FlattenResult:
    """Make f constant on the gamma-ball around pstar.

    epsilon_achieved is a grid estimate of sup |f - f(pstar)| over the
    2 gamma-ball, which bounds sup |f - f'|.
    """
    pstar = tuple(float(x) for x in pstar)
    value = evaluate(f, pstar)
    if isinstance(f, Constant):
        return FlattenResult(f, 0.0, gamma, value)
    chi = Plateau(pstar, gamma, 2 * gamma, order)
    fprime = Sum((Scale(value, chi), Product((Sum((Constant(1.0), Scale(-1.0, chi))), f))))
    space = space or Simplex(len(pstar), 1.0)
    pts = _ball_grid(space, pstar, 2 * gamma, resolution)
    eps = float(np.max(np.abs(f.evaluate(pts) - value)))
    return FlattenResult(fprime, eps, gamma, value)


@dataclass(frozen=True)
class CoverPlan:
    balls: tuple          # Ball; index 0 is centered at pstar
    pstar: tuple
    gamma: float
    pitch: float
    coverage_resolution: int
    min_bump_sum: float   # min over the coverage grid of the sum of cover bumps

    @property
    def radius(self) -> float:
        return 0.5 * self.gamma

    def bumps(self) -> list:
        return [Bump(b.center, b.radius) for b in self.balls]


def build_cover(space: Simplex, pstar, gamma: float, coverage_resolution: int = 257) -> CoverPlan:
    """Lattice cover by gamma/2-balls, U_0 at pstar, all others keeping pstar outside their closure.

    The lattice pitch is gamma / (4 sqrt(n)): every point at distance just over
    gamma/2 from pstar then has an admissible center within 3 gamma/8, so the
    spline bumps of the cover sum to at least (1 - 9/16)^3 on the simplex.
    """
    if not isinstance(space, Simplex):
        raise StructureError("covers are built on simplices")
    if not gamma > 0:
        raise CoverError("gamma must be positive")
    n, s = space.dim, space.scale
    pstar = np.asarray(pstar, dtype=float)
    r = 0.5 * gamma
    far = max(np.linalg.norm(v - pstar) for v in space.vertices)
    if r >= far:
        raise CoverError(
            f"gamma = {gamma} is too large: every gamma/2-ball centered in the simplex has "
            f"pstar in its closure (max vertex distance {far:.6g} <= gamma/2)")
    pitch = gamma / (4.0 * math.sqrt(n))
    lo = math.floor(-r / pitch)
    hi = math.ceil((s + r) / pitch)
    centers = []
    for k in np.ndindex(*([hi - lo + 1] * n)):
        c = (np.asarray(k) + lo) * pitch
        if np.linalg.norm(c - pstar) <= r * (1 + 1e-12):
            continue
        if space.distance(c) < r:
            centers.append(tuple(float(x) for x in c))
    centers.sort()
    balls = (Ball(tuple(pstar), r),) + tuple(Ball(c, r) for c in centers)
    plan = CoverPlan(balls, tuple(pstar), gamma, pitch, coverage_resolution, 0.0)
    grid = space.grid(coverage_resolution)
    total = _bump_total(plan, grid)
    min_sum = float(total.min())
    if min_sum <= 0:
        raise CoverError("lattice balls do not cover the simplex")
    return CoverPlan(balls, tuple(pstar), gamma, pitch, coverage_resolution, min_sum)


def _bump_matrix(plan: CoverPlan, X) -> np.ndarray:
    """B[j, k] = bump_j(X[k]), all balls at once; same arithmetic as Bump.evaluate."""
    X = np.asarray(X, dtype=float)
    C = np.array([b.center for b in plan.balls])
    r = plan.radius
    out = np.empty((len(C), len(X)))
    step = max(1, 4_000_000 // max(1, len(C) * X.shape[1]))
    for k in range(0, len(X), step):
        d = np.linalg.norm(X[None, k:k + step, :] - C[:, None, :], axis=2)
        out[:, k:k + step] = np.clip(1.0 - (d / r) ** 2, 0.0, None) ** 3
    return out


def _bump_total(plan: CoverPlan, X) -> np.ndarray:
    """Sum over balls of bump_j(X[k]), visiting only lattice neighbours of each point."""
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    r2 = plan.radius ** 2
    pitch = plan.pitch

    def bump(c):
        d2 = ((X - c) ** 2).sum(axis=1)
        return np.clip(1.0 - d2 / r2, 0.0, None) ** 3

    total = bump(np.asarray(plan.pstar))
    cells = np.rint(np.array([b.center for b in plan.balls[1:]]).reshape(-1, n) / pitch).astype(int)
    base = np.rint(X / pitch).astype(int)
    m = int(math.ceil(plan.radius / pitch)) + 1
    lo = min(cells.min(initial=0), base.min()) - m
    size = max(cells.max(initial=0), base.max()) + m - lo + 1
    occupied = np.zeros((size,) * n, dtype=bool)
    occupied[tuple((cells - lo).T)] = True
    for off in np.ndindex(*([2 * m + 1] * n)):
        idx = base + (np.asarray(off) - m)
        hit = occupied[tuple((idx - lo).T)]
        if not hit.any():
            continue
        d2 = ((X[hit] - idx[hit] * pitch) ** 2).sum(axis=1)
        total[hit] += np.clip(1.0 - d2 / r2, 0.0, None) ** 3
    return total


def partition_of_unity(plan: CoverPlan) -> list:
    bumps = plan.bumps()
    den = Sum(tuple(bumps))
    return [Ratio(b, den) for b in bumps]


def cap_region(ball: Ball, pstar, gamma: float) -> Optional[Ball]:
    """Smallest ball containing closure(ball) minus the open gamma-ball at pstar; None if empty.

    Points x with |x - c| <= rho and |x - p*| >= gamma satisfy
    (x - p*) . u >= a, a = (d^2 + gamma^2 - rho^2) / (2d), u = (c - p*)/d.
    """
    c, rho = np.asarray(ball.center), ball.radius
    v = c - np.asarray(pstar)
    d = float(np.linalg.norm(v))
    if d + rho <= gamma:
        return None
    u = v / d
    a = (d * d + gamma * gamma - rho * rho) / (2 * d)
    t = a - d
    if t <= 0:
        return Ball(tuple(c), rho)
    if t >= rho:
        return None
    center = np.asarray(pstar) + a * u
    return Ball(tuple(center), math.sqrt(rho * rho - t * t) * (1 + 1e-12))


@dataclass
class Piece:
    index: int
    function: SmoothFunction
    label: str                                  # "near-p*", "null" or "certified"
    certificate: Optional[DisplaceabilityCertificate]
    value: float = 0.0


@dataclass
class DecompositionReport:
    gamma: float
    epsilon_achieved: float
    pieces: list
    sum_of_values: float
    direct_zeta: float              # zeta(f') by the direct formula
    reconstruction_error: float     # |sum_of_values - direct_zeta|
    additivity_error: float         # same-rule linearity check of the piece sum
    pointwise_error: float          # max |sum pieces - (f' - f'(p*))| on the verification grid
    partition_error: float          # max |sum phi_j - 1| on the verification grid
    target_zeta: float              # zeta(f) for the unflattened function
    engine: str
    schedule: tuple = DEFAULT_SWEEP

    @property
    def error_to_target(self) -> float:
        return abs(self.sum_of_values - self.target_zeta)

    def to_json(self) -> dict:
        return {
            "schedule": list(self.schedule),
            "gamma": self.gamma,
            "epsilon_achieved": self.epsilon_achieved,
            "engine": self.engine,
            "sum_of_values": self.sum_of_values,
            "direct_zeta": self.direct_zeta,
            "target_zeta": self.target_zeta,
            "reconstruction_error": self.reconstruction_error,
            "additivity_error": self.additivity_error,
            "pointwise_error": self.pointwise_error,
            "partition_error": self.partition_error,
            "pieces": [
                {
                    "index": p.index,
                    "label": p.label,
                    "value": p.value,
                    "certificate": None if p.certificate is None else {
                        "cycles": p.certificate.symmetry.cycles(),
                        "separation": p.certificate.separation,
                        "region": [{"center": list(b.center), "r": b.radius} for b in p.certificate.region],
                    },
                }
                for p in self.pieces
            ],
        }


def _rule(model: QuasiStateModel, plan: CoverPlan, fl: FlattenResult, engine: str,
          order: int, panels: int, samples: int, seed: int):
    """Shared points/weights on which every piece is integrated."""
    space = model.space
    if engine == "mc":
        X, w = sample(model.dh, samples, np.random.default_rng(seed))
        return X, w / samples
    if engine != "quad":
        raise ValueError("the pipeline integrates pieces with engine 'quad' or 'mc'")
    if space.dim == 1:
        # panel boundaries on every kink of the bumps and the plateau
        breaks = {0.0, space.scale}
        for b in plan.balls:
            breaks |= {b.center[0] - b.radius, b.center[0] + b.radius}
        c = plan.pstar[0]
        breaks |= {c - 2 * fl.gamma, c - fl.gamma, c + fl.gamma, c + 2 * fl.gamma}
        cuts = sorted(x for x in breaks if 0.0 <= x <= space.scale)
        xs, ws = [], []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo > 1e-15:
                x, w = gauss_legendre_panels(lo, hi, order, panels)
                xs.append(x)
                ws.append(w)
        return np.concatenate(xs)[:, None], np.concatenate(ws) * (model.dh.total_mass / space.scale)
    return quadrature_rule(model.dh, order, panels)


def partition_and_evaluate(model: QuasiStateModel, f: SmoothFunction, gamma: float,
                           engine: str = "quad", order: int = 12, panels: int = 2,
                           samples: int = 200_000, seed: int = 0,
                           verify_resolution: int = 513) -> DecompositionReport:
    space = model.space
    if not isinstance(space, Simplex):
        raise StructureError("the decomposition pipeline runs on simplex models")
    pstar = special_point(space)
    fl = flatten(f, pstar, gamma, space)
    plan = build_cover(space, pstar, gamma)
    phis = partition_of_unity(plan)
    g = Shift(-fl.value_at_pstar, fl.fprime)

    pieces = []
    for j, (ball, phi) in enumerate(zip(plan.balls, phis)):
        fn = Product((phi, g))
        if j == 0:
            pieces.append(Piece(0, fn, "near-p*", None))
            continue
        region = cap_region(ball, pstar, gamma)
        # a cap outside the simplex leaves only points where the flattened function is constant
        if region is None or not space.distance(region.center) < region.radius:
            pieces.append(Piece(j, fn, "null", None))
            continue
        cert = displace_region(space, [region])
        if cert is None:
            raise DecompositionError(
                f"piece {j} (ball at {ball.center}, radius {ball.radius}) has no displaceability "
                f"certificate; gamma = {gamma} is too large")
        pieces.append(Piece(j, fn, "certified", cert))

    # integrate every piece on one shared rule
    X, W = _rule(model, plan, fl, engine, order, panels, samples, seed)
    B = _bump_matrix(plan, X)
    gX = g.evaluate(X)
    values = W @ (B / B.sum(axis=0) * gX).T
    for p, v in zip(pieces, values):
        p.value = float(v)

    # verification grid: partition, near-p* vanishing, pointwise reconstruction
    grid = space.grid(verify_resolution)
    Bg = _bump_matrix(plan, grid)
    Phi = Bg / Bg.sum(axis=0)
    partition_error = float(np.max(np.abs(Phi.sum(axis=0) - 1.0)))
    gg = g.evaluate(grid)
    pointwise_error = float(np.max(np.abs((Phi * gg).sum(axis=0) - gg)))
    near = pieces[0].function.evaluate(grid)
    if np.max(np.abs(near)) > 1e-12:
        raise DecompositionError("the piece at p* is not identically zero; flattening failed")
    if abs(pieces[0].value) > 1e-12:
        raise DecompositionError("the piece at p* integrates to a nonzero value")

    total = float(sum(p.value for p in pieces))
    h_prime = ToricHamiltonian(fl.fprime)
    direct = zeta(model, h_prime, "auto", order=order, panels=max(panels, 64))
    same_rule = float(W @ fl.fprime.evaluate(X)) - fl.value_at_pstar * float(W.sum())
    target = zeta(model, ToricHamiltonian(f), "auto", order=order, panels=max(panels, 64))
    return DecompositionReport(
        gamma=gamma,
        epsilon_achieved=fl.epsilon_achieved,
        pieces=pieces,
        sum_of_values=total,
        direct_zeta=direct,
        reconstruction_error=abs(total - direct),
        additivity_error=abs(total - same_rule),
        pointwise_error=pointwise_error,
        partition_error=partition_error,
        target_zeta=target,
        engine=engine,
    )


def gamma_sweep(model: QuasiStateModel, f: SmoothFunction, gammas: Sequence[float] = DEFAULT_SWEEP,
                **kwargs) -> list:
    return [partition_and_evaluate(model, f, g, **kwargs) for g in gammas]
