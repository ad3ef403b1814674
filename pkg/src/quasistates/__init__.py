"""Calabi quasimorphisms restricted to toric Hamiltonians.

The restriction of a Calabi quasimorphism to Hamiltonians pulled back from a
moment polytope (or a Reeb tree, or a product of these) is the linear
functional

    zeta(f) = integral of f against the pushforward volume
              - integral of f against a quasi-state measure sigma

and this package evaluates it, together with the symmetry certificates and
partition-of-unity machinery that justify it.
"""
from .basespace import (
    Simplex, MeasuredTree, ProductSpace, TreePoint, make_simplex,
    barycenter, contains, tree_from_edges,
)
from .funcspace import (
    Monomial, Constant, Bump, Plateau, RadialProfile, EdgeProfile, Factor,
    Sum, Product, Scale, Shift, Dilate, Ratio, evaluate, sup_norm,
    support_bound,
)
from .measure import (
    PushforwardMeasure, QuasiStateMeasure, dirac, integrate,
    integrate_exact, integrate_quadrature, integrate_monte_carlo,
    integrate_sigma,
)
from .symmetry import (
    AffineSymmetry, DisplaceabilityCertificate, symmetry_group,
    enumerate_group, displace_point, displace_region, fixed_locus,
)
from .quasistate import (
    QuasiStateModel, ToricHamiltonian, default_model, cpn_model,
    special_point, tree_median, zeta, calabi_value, calabi_property_check,
    mu_delta_closed_form, mu_delta_via_pullback, independence_certificate,
    lipschitz_check,
)
from .decompose import flatten, build_cover, partition_and_evaluate, gamma_sweep

__version__ = "0.1.0"

__all__ = [
    "Simplex",
    "MeasuredTree",
    "ProductSpace",
    "TreePoint",
    "make_simplex",
    "barycenter",
    "contains",
    "tree_from_edges",
    "Monomial",
    "Constant",
    "Bump",
    "Plateau",
    "RadialProfile",
    "EdgeProfile",
    "Factor",
    "Sum",
    "Product",
    "Scale",
    "Shift",
    "Dilate",
    "Ratio",
    "evaluate",
    "sup_norm",
    "support_bound",
    "PushforwardMeasure",
    "QuasiStateMeasure",
    "dirac",
    "integrate",
    "integrate_exact",
    "integrate_quadrature",
    "integrate_monte_carlo",
    "integrate_sigma",
    "AffineSymmetry",
    "DisplaceabilityCertificate",
    "symmetry_group",
    "enumerate_group",
    "displace_point",
    "displace_region",
    "fixed_locus",
    "QuasiStateModel",
    "ToricHamiltonian",
    "default_model",
    "cpn_model",
    "special_point",
    "tree_median",
    "zeta",
    "calabi_value",
    "calabi_property_check",
    "mu_delta_closed_form",
    "mu_delta_via_pullback",
    "independence_certificate",
    "lipschitz_check",
    "flatten",
    "build_cover",
    "partition_and_evaluate",
    "gamma_sweep",
]
