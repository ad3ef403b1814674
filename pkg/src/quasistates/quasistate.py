"""Calabi quasimorphisms on toric Hamiltonians.

For F = Phi^* f with f a function on the base space, a Calabi quasimorphism
that is Hofer-continuous takes the value

    zeta(f) = int f d(volume pushforward) - int f d(sigma)

with sigma a measure on the non-displaceable locus: the Dirac mass at the
barycenter of the moment simplex of CP^n, at the median of a Reeb tree, and
the product of these on products. Toric Hamiltonians Poisson-commute, so the
quasimorphism restricted to them is a homomorphism: composition is addition
of generating functions and zeta is exactly linear.

This module also carries the ball family mu_delta obtained by pulling the
CP^n quasimorphism back along the conformally symplectic embeddings
theta_delta of the ball of radius 1/sqrt(pi).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basespace import MeasuredTree, ProductSpace, Simplex
from .errors import DomainError, InvalidCertificateError, StructureError
from .funcspace import (
    FULL, Ball, Bump, Dilate, Monomial, RadialProfile, Scale, SmoothFunction,
    integrate_1d, sup_norm, support_bound,
)
from .measure import (
    PushforwardMeasure, QuasiStateMeasure, dirac, integrate, integrate_sigma,
    product_sigma, pushforward,
)
from .median import MedianResult, tree_median
from .symmetry import DisplaceabilityCertificate, verify_certificate

log = logging.getLogger(__name__)

CONVENTIONS = ("derived", "paper")
_warned = []  # warn about the printed exponent once per process


@dataclass(frozen=True)
class QuasiStateModel:
    space: object
    dh: PushforwardMeasure
    sigma: QuasiStateMeasure

    @property
    def lipschitz_constant(self) -> float:
        return self.dh.total_mass + self.sigma.total_mass


@dataclass(frozen=True)
class ToricHamiltonian:
    """phi_F^power with F = Phi^* fbar; power m stands for the flow of m F."""
    fbar: SmoothFunction
    power: int = 1


def special_point(space):
    """Barycenter of a simplex, median of a tree, tuple of these on a product."""
    if isinstance(space, Simplex):
        return space.barycenter()
    if isinstance(space, MeasuredTree):
        return tree_median(space).point
    if isinstance(space, ProductSpace):
        return tuple(special_point(f) for f in space.factors)
    raise StructureError(f"unknown space {space!r}")


def default_sigma(space, dh: PushforwardMeasure) -> QuasiStateMeasure:
    # sigma carries the same mass as the volume so that constants have zeta = 0
    if isinstance(space, ProductSpace):
        return product_sigma(space, [default_sigma(f, m) for f, m in zip(space.factors, dh.factors)])
    return dirac(space, special_point(space), dh.total_mass)


def default_model(space) -> QuasiStateModel:
    dh = pushforward(space)
    return QuasiStateModel(space, dh, default_sigma(space, dh))


def cpn_model(n: int) -> QuasiStateModel:
    """CP^n with volume 1: uniform mass 1 on the unit simplex, Dirac mass 1 at the barycenter."""
    return default_model(Simplex(n, 1.0))


def zeta(model: QuasiStateModel, h: ToricHamiltonian, engine: str = "auto", **opts) -> float:
    vol = integrate(model.dh, h.fbar, engine, **opts)
    return h.power * (vol - integrate_sigma(model.sigma, h.fbar))


def calabi_value(model: QuasiStateModel, h: ToricHamiltonian, engine: str = "auto", **opts) -> float:
    return h.power * integrate(model.dh, h.fbar, engine, **opts)


def sigma_term(model: QuasiStateModel, h: ToricHamiltonian) -> float:
    return h.power * integrate_sigma(model.sigma, h.fbar)


def _ball_inside(b: Ball, region) -> bool:
    return any(np.linalg.norm(np.subtract(b.center, r.center)) + b.radius <= r.radius + 1e-12
               for r in region)


def calabi_property_check(model: QuasiStateModel, h: ToricHamiltonian,
                          certificate: DisplaceabilityCertificate,
                          engine: str = "auto", tol: float = 1e-9, **opts) -> bool:
    """zeta == Calabi value for a Hamiltonian supported in a certified-displaceable region."""
    if not isinstance(model.space, Simplex):
        raise StructureError("symmetry certificates exist on simplices only")
    if certificate.region is None:
        raise InvalidCertificateError("a region certificate is required")
    if not verify_certificate(model.space, certificate):
        raise InvalidCertificateError("certificate does not separate its region")
    supp = support_bound(h.fbar)
    if supp is FULL or not all(isinstance(b, Ball) and _ball_inside(b, certificate.region) for b in supp):
        raise InvalidCertificateError("support of the Hamiltonian is not inside the certified region")
    z = zeta(model, h, engine, **opts)
    c = calabi_value(model, h, engine, **opts)
    return abs(z - c) <= tol


# -- the ball family ---------------------------------------------------------

def evaluation_point(n: int, delta: float) -> float:
    return n / ((n + 1) * delta)


def conformal_factor(n: int, delta: float, convention: str = "derived") -> float:
    """Coefficient of the point-evaluation term of mu_delta.

    "derived": H o theta_delta = delta F and theta_delta^* omega = delta omega_B
    give int H omega^n = delta^(n+1) int F omega_B^n and H(p_clif) = delta F(x),
    so after the delta^(-n-1) normalization the point term carries delta^(-n).
    "paper": the printed delta^(-n-1).
    """
    if convention == "derived":
        return delta ** (-n)
    if convention == "paper":
        if delta != 1.0 and not _warned:
            _warned.append(True)
            log.warning("convention 'paper' uses delta^(-n-1); the conformal derivation gives delta^(-n)")
        return delta ** (-n - 1)
    raise ValueError(f"convention must be one of {CONVENTIONS}")


def _check_ball_args(n: int, delta: float, profile: SmoothFunction):
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not 0 < delta <= 1:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    x = evaluation_point(n, delta)
    if x >= 1:
        raise DomainError(f"evaluation point {x:.6g} >= 1: delta must exceed n/(n+1) = {n / (n + 1):.6g}")
    supp = support_bound(profile)
    if supp is FULL:
        # only the closed ball is seen when delta == 1
        if delta != 1.0:
            raise DomainError("profile must be supported in [0, 1) when delta < 1")
    elif any(b.center[0] + b.radius > 1.0 for b in supp):
        raise DomainError("profile support leaves [0, 1)")


def ball_integral(n: int, profile: SmoothFunction) -> float:
    """int over B^{2n}(1/sqrt(pi)) of profile(pi |w|^2) omega_B^n, normalized so the ball has volume 1.

    pi |w_i|^2 is uniform on the unit simplex, so s = pi |w|^2 has density n s^(n-1).
    """
    return integrate_1d(profile, 0.0, 1.0, Monomial((n - 1,), float(n)))


def mu_delta_closed_form(n: int, delta: float, profile: SmoothFunction,
                         convention: str = "derived") -> float:
    _check_ball_args(n, delta, profile)
    x = evaluation_point(n, delta)
    value_at = float(profile.evaluate(np.array([[x]]))[0])
    return ball_integral(n, profile) - conformal_factor(n, delta, convention) * value_at


def pushed_forward_profile(delta: float, profile: SmoothFunction) -> SmoothFunction:
    """The toric function H on the CP^n simplex generating theta_delta,* phi_F.

    H o theta_delta = delta F, and theta_delta maps the torus T(r) to the moment
    value pi delta r, so H(p) = delta * profile(sum(p) / delta); it vanishes past
    sum(p) = delta because the profile is supported in [0, 1).
    """
    return Scale(delta, RadialProfile(Dilate(1.0 / delta, profile)))


def mu_delta_via_pullback(n: int, delta: float, profile: SmoothFunction,
                          engine: str = "exact", **opts) -> float:
    _check_ball_args(n, delta, profile)
    h = ToricHamiltonian(pushed_forward_profile(delta, profile))
    return delta ** (-n - 1) * zeta(cpn_model(n), h, engine, **opts)


def matched_bumps(n: int, deltas: Sequence[float], radius: float = 0.02) -> list:
    """One 1-D spline bump per delta, centered on its evaluation point."""
    return [Bump((evaluation_point(n, d),), radius) for d in deltas]


@dataclass(frozen=True)
class IndependenceCertificate:
    matrix: np.ndarray
    rank: int
    singular_values: np.ndarray

    @property
    def min_singular_value(self) -> float:
        return float(self.singular_values[-1])

    @property
    def max_singular_value(self) -> float:
        return float(self.singular_values[0])


def independence_certificate(n: int, deltas: Sequence[float], profiles: Sequence[SmoothFunction],
                             convention: str = "derived", rtol: float = 1e-10) -> IndependenceCertificate:
    """M[i][j] = mu_{delta_i}(profile_j); rank k certifies independence of the k functionals."""
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise DomainError("need at least one delta")
    if len(set(deltas)) != len(deltas):
        raise DomainError("duplicate deltas")
    if len(profiles) < len(deltas):
        raise DomainError("need at least as many profiles as deltas")
    M = np.array([[mu_delta_closed_form(n, d, f, convention) for f in profiles] for d in deltas])
    sv = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(sv > rtol * sv[0])) if sv[0] > 0 else 0
    return IndependenceCertificate(M, rank, sv)


def lipschitz_check(model: QuasiStateModel, h1: ToricHamiltonian, h2: ToricHamiltonian,
                    resolution: int = 65, engine: str = "auto", **opts):
    """(|zeta(h1) - zeta(h2)|, K sup|f1 - f2|, ok) with K = mass(volume) + mass(sigma)."""
    if h1.power != 1 or h2.power != 1:
        raise DomainError("Lipschitz check compares power-1 Hamiltonians")
    lhs = abs(zeta(model, h1, engine, **opts) - zeta(model, h2, engine, **opts))
    bound = model.lipschitz_constant * sup_norm(h1.fbar - h2.fbar, model.space, resolution)
    return lhs, bound, lhs <= bound + 1e-9


__all__ = [
    "QuasiStateModel", "ToricHamiltonian", "MedianResult", "special_point",
    "tree_median", "default_model", "cpn_model", "zeta", "calabi_value",
    "sigma_term", "calabi_property_check", "mu_delta_closed_form",
    "mu_delta_via_pullback", "independence_certificate", "lipschitz_check",
    "matched_bumps", "conformal_factor", "evaluation_point", "ball_integral",
    "pushed_forward_profile",
]
