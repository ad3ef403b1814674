from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from quasistates.basespace import ProductSpace, Simplex, TreePoint, tree_from_edges
from quasistates.errors import NotPolynomialError, OutsideSpaceError
from quasistates.funcspace import (
    Bump, Constant, EdgeProfile, Factor, Monomial, Product, Sum,
)
from quasistates.measure import (
    dirac, dirichlet_monomial, integrate, integrate_exact,
    integrate_monte_carlo, integrate_quadrature, integrate_sigma,
    product_sigma, pushforward,
)
from quasistates.quasistate import cpn_model


def sympy_simplex_integral(exps, scale=1):
    """Iterated integral over the scaled simplex (Lebesgue), by sympy."""
    n = len(exps)
    xs = sympy.symbols(f"x1:{n + 1}")
    expr = sympy.Integer(1)
    for x, a in zip(xs, exps):
        expr *= x ** a
    for k in reversed(range(n)):
        expr = sympy.integrate(expr, (xs[k], 0, scale - sum(xs[:k])))
    return expr


@pytest.mark.parametrize("exps", [(1,), (3,), (1, 1), (3, 2), (0, 4), (2, 1, 1), (4, 0, 0), (1, 2, 0, 1)])
def test_dirichlet_formula_matches_sympy(exps):
    assert dirichlet_monomial(exps, len(exps)) == Fraction(str(sympy_simplex_integral(exps)))


@pytest.mark.parametrize("n, f, expected", [
    (2, Monomial((1, 0)), 1 / 3),
    (2, Monomial((1, 1)), 1 / 12),
    (1, Monomial((2,)), 1 / 3),
    (2, Monomial((3, 2)), 1 / 210),
    (3, Monomial((2, 1, 1)), 1 / 420),
])
def test_integrate_exact_examples(n, f, expected):
    assert integrate_exact(cpn_model(n).dh, f) == pytest.approx(expected, abs=1e-16)


def test_integrate_exact_scaled_simplex():
    # density mass * 2 / 4 on the side-2 triangle; sympy gives 1/3 and 2/3
    m = pushforward(Simplex(2, 2.0))
    assert integrate_exact(m, Monomial((1, 1))) == pytest.approx(1 / 3, abs=1e-15)
    assert integrate_exact(m, Monomial((2, 0))) == pytest.approx(2 / 3, abs=1e-15)


def test_integrate_exact_rejects_bump_in_dimension_two():
    with pytest.raises(NotPolynomialError):
        integrate_exact(cpn_model(2).dh, Bump((0.3, 0.3), 0.1))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_quadrature_normalization(n):
    assert integrate_quadrature(cpn_model(n).dh, Constant(1.0), order=2) == pytest.approx(1.0, abs=1e-12)


def test_quadrature_polynomial():
    assert integrate_quadrature(cpn_model(2).dh, Monomial((1, 1)), order=2) == pytest.approx(1 / 12, abs=1e-10)


def test_quadrature_bump_matches_monte_carlo():
    m = cpn_model(2).dh
    f = Bump((1 / 3, 1 / 3), 0.1)
    quad = integrate_quadrature(m, f, order=12, panels=8)
    est, se = integrate_monte_carlo(m, f, 400_000, seed=5)
    assert abs(quad - est) <= 3 * se


def test_monte_carlo_constant_has_zero_error():
    est, se = integrate_monte_carlo(cpn_model(3).dh, Constant(1.0), 1000, seed=1)
    assert est == 1.0 and se == 0.0


@pytest.mark.parametrize("n, f, exact", [(2, Monomial((1, 0)), 1 / 3), (1, Monomial((2,)), 1 / 3)])
def test_monte_carlo_unbiased(n, f, exact):
    est, se = integrate_monte_carlo(cpn_model(n).dh, f, 1_000_000, seed=42)
    assert abs(est - exact) <= 3 * se


def test_monte_carlo_reproducible_and_sharded():
    m = cpn_model(2).dh
    f = Monomial((2, 1))
    a = integrate_monte_carlo(m, f, 10_000, seed=9, shards=4)
    b = integrate_monte_carlo(m, f, 10_000, seed=9, shards=4)
    assert a == b
    assert integrate_monte_carlo(m, f, 10_000, seed=9, shards=1) != a


def test_monte_carlo_rejects_single_sample():
    with pytest.raises(ValueError):
        integrate_monte_carlo(cpn_model(1).dh, Constant(1.0), 1)


@pytest.mark.parametrize("sigma_point, f, expected", [
    ((1 / 3, 1 / 3), Monomial((1, 1)), 1 / 9),
    ((1 / 3, 1 / 3), Constant(2.5), 2.5),
])
def test_integrate_sigma(sigma_point, f, expected):
    assert integrate_sigma(dirac(Simplex(2), sigma_point), f) == pytest.approx(expected, abs=1e-16)


def test_product_dirac():
    sq = ProductSpace((Simplex(1), Simplex(1)))
    sigma = product_sigma(sq, [dirac(Simplex(1), (0.5,)), dirac(Simplex(1), (0.5,))])
    f = Product((Factor(0, Monomial((1,))), Factor(1, Monomial((1,)))))
    assert integrate_sigma(sigma, f) == 0.25


def test_sigma_outside_space():
    with pytest.raises(OutsideSpaceError):
        integrate_sigma(dirac(Simplex(2), (0.9, 0.9)), Constant(1.0))


def test_tree_integration_engines_agree():
    t = tree_from_edges([("a", "b", 1.0, 2.0), ("b", "c", 0.5, 1.0), ("b", "d", 2.0, Monomial((1,)))])
    m = pushforward(t)
    f = Sum((EdgeProfile(0, Monomial((2,))), EdgeProfile(2, Bump((1.0,), 0.5)), Constant(1.0)))
    exact = integrate_exact(m, f)
    # 2/3 + mass(0.5 + 2) + int_0^2 t bump(t) dt = 2/3 + 4.5 + 32/35 * 0.5 (bump symmetric about 1)
    assert exact == pytest.approx(2 / 3 + 4.5 + 16 / 35, abs=1e-13)
    assert integrate_quadrature(m, f, order=10, panels=8) == pytest.approx(exact, abs=1e-10)
    est, se = integrate_monte_carlo(m, f, 400_000, seed=3)
    assert abs(est - exact) <= 4 * se


def test_product_integration_fubini():
    t = tree_from_edges([("a", "b", 1.0)])
    sp = ProductSpace((t, Simplex(2)))
    m = pushforward(sp)
    f = Product((Factor(0, EdgeProfile(0, Monomial((1,)))), Factor(1, Monomial((1, 1)))))
    assert integrate_exact(m, f) == pytest.approx(0.5 / 12, abs=1e-16)
    assert integrate_quadrature(m, f, order=4) == pytest.approx(0.5 / 12, abs=1e-14)
    assert integrate(m, f, "auto") == integrate_exact(m, f)
    assert integrate(m, Constant(1.0), "exact") == 1.0
    assert integrate_sigma(dirac(sp, (TreePoint(0, 0.5), (1 / 3, 1 / 3))), f) == pytest.approx(0.5 / 9)


poly = st.lists(
    st.tuples(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.floats(-3, 3)),
    min_size=1, max_size=5,
).map(lambda ts: Sum(tuple(Monomial(e, c) for e, c in ts)))


@given(poly, poly, st.floats(-3, 3), st.floats(-3, 3))
def test_integrators_are_linear(f, g, a, b):
    m = cpn_model(2).dh
    lhs = integrate_exact(m, a * f + b * g)
    assert lhs == pytest.approx(a * integrate_exact(m, f) + b * integrate_exact(m, g), abs=1e-12)
    q = integrate_quadrature(m, a * f + b * g, order=8)
    assert q == pytest.approx(a * integrate_quadrature(m, f, order=8) + b * integrate_quadrature(m, g, order=8),
                              abs=1e-12)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=4))
def test_exact_symmetric_in_exponents(exps):
    n = len(exps)
    m = cpn_model(n).dh
    base = integrate_exact(m, Monomial(tuple(exps)))
    assert integrate_exact(m, Monomial(tuple(reversed(exps)))) == base
    assert integrate_exact(m, Monomial(tuple(np.roll(exps, 1).tolist()))) == base


def test_dispatch_rejects_unknown_engine():
    with pytest.raises(ValueError):
        integrate(cpn_model(1).dh, Constant(1.0), "simpson")
