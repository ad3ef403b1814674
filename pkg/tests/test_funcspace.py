import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasistates.basespace import Simplex, tree_from_edges
from quasistates.errors import NotPolynomialError, OutsideSpaceError
from quasistates.funcspace import (
    FULL, Ball, Bump, Constant, Dilate, EdgeProfile, Monomial, Plateau,
    Product, RadialProfile, Ratio, Scale, Shift, Sum, evaluate,
    integrate_1d, integrate_1d_exact, sup_norm, support_bound, to_poly,
)

DELTA2 = Simplex(2)


@pytest.mark.parametrize("f, p, expected", [
    (Monomial((2, 1)), (0.5, 0.25), 1 / 16),
    (Bump((1 / 3, 1 / 3), 0.1), (1 / 3, 1 / 3), 1.0),
    (Bump((1 / 3, 1 / 3), 0.1), (0.9, 0.05), 0.0),
    (Bump((1 / 3, 1 / 3), 0.1, "cinf"), (1 / 3, 1 / 3), 1.0),
])
def test_evaluate_examples(f, p, expected):
    assert evaluate(f, p, DELTA2) == expected


def test_evaluate_rejects_outside_point():
    with pytest.raises(OutsideSpaceError):
        evaluate(Monomial((1, 0)), (0.8, 0.8), DELTA2)


@pytest.mark.parametrize("order", ["c2", "cinf"])
@given(st.floats(0, 1), st.floats(0, 1))
def test_bump_range(order, x, y):
    b = Bump((0.3, 0.3), 0.2, order)
    v = float(b.evaluate(np.array([[x, y]]))[0])
    assert 0.0 <= v <= 1.0
    if np.hypot(x - 0.3, y - 0.3) >= 0.2:
        assert v == 0.0


def test_plateau_levels():
    f = Plateau((0.5,), 0.1, 0.2)
    x = np.array([[0.5], [0.55], [0.6], [0.65], [0.71], [0.95]])
    v = f.evaluate(x)
    assert v[0] == v[1] == v[2] == 1.0
    assert 0 < v[3] < 1
    assert v[4] == v[5] == 0.0


@pytest.mark.parametrize("f, space, res, expected, tol", [
    (Constant(3.0), DELTA2, 9, 3.0, 0.0),
    (Monomial((1,)), Simplex(1), 101, 1.0, 0.0),
    (Monomial((1, 1)), DELTA2, 201, 0.25, 1e-3),
])
def test_sup_norm_examples(f, space, res, expected, tol):
    assert sup_norm(f, space, res) == pytest.approx(expected, abs=tol)


def test_sup_norm_modulus_bounds_the_gap():
    f = Monomial((1, 1))
    r = sup_norm(f, DELTA2, 9, report=True)
    assert r.value <= 0.25 <= r.value + r.modulus


@given(st.integers(2, 40))
@settings(max_examples=20)
def test_sup_norm_monotone_in_resolution(res):
    f = Sum((Monomial((3, 1)), Monomial((0, 2), -0.7), Bump((0.2, 0.3), 0.15)))
    assert sup_norm(f, DELTA2, res) <= sup_norm(f, DELTA2, 2 * res)


def test_support_bounds():
    b1, b2 = Bump((0.2, 0.2), 0.1), Bump((0.6, 0.1), 0.05)
    assert support_bound(b1) == [Ball((0.2, 0.2), 0.1)]
    assert support_bound(b1 + b2) == [Ball((0.2, 0.2), 0.1), Ball((0.6, 0.1), 0.05)]
    assert support_bound(Product((Monomial((1, 0)), b1))) == [Ball((0.2, 0.2), 0.1)]
    assert support_bound(Monomial((1, 1))) is FULL


poly_terms = st.builds(
    Monomial,
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.floats(-2, 2),
)
leaves = st.one_of(
    poly_terms,
    st.builds(Constant, st.floats(-2, 2)),
    st.builds(lambda c, r: Bump(c, r), st.tuples(st.floats(0, 0.5), st.floats(0, 0.5)), st.floats(0.05, 0.5)),
    st.builds(lambda g: RadialProfile(g), st.builds(Monomial, st.tuples(st.integers(0, 3)), st.floats(-1, 1))),
)
exprs = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.builds(lambda a, b: Sum((a, b)), kids, kids),
        st.builds(lambda a, b: Product((a, b)), kids, kids),
        st.builds(Scale, st.floats(-2, 2), kids),
        st.builds(Shift, st.floats(-2, 2), kids),
    ),
    max_leaves=6,
)
points2 = st.tuples(st.floats(0, 1), st.floats(0, 1)).filter(lambda p: p[0] + p[1] <= 1)


@given(exprs, exprs, points2)
def test_sum_evaluates_termwise(f, g, p):
    x = np.array([p])
    assert Sum((f, g)).evaluate(x)[0] == f.evaluate(x)[0] + g.evaluate(x)[0]


@given(st.builds(Monomial, st.tuples(st.integers(0, 4)), st.floats(-1, 1)),
       st.lists(st.floats(0, 0.25), min_size=4, max_size=4))
def test_radial_profile_permutation_invariant(profile, p):
    f = RadialProfile(profile)
    vals = f.evaluate(np.array(list(itertools.permutations(p))))
    # equal up to the rounding of the coordinate sum
    np.testing.assert_allclose(vals, vals[0], rtol=1e-14, atol=1e-15)


@given(exprs, points2)
def test_to_poly_matches_evaluation(f, p):
    try:
        poly = to_poly(f, 2)
    except NotPolynomialError:
        return
    direct = float(f.evaluate(np.array([p]))[0])
    value = sum(c * p[0] ** a * p[1] ** b for (a, b), c in poly.items())
    assert value == pytest.approx(direct, rel=1e-9, abs=1e-9)


def test_integrate_1d_exact_spline_bump():
    # r * int_{-1}^{1} (1 - u^2)^3 du = 32 r / 35, oracle by sympy
    assert integrate_1d_exact(Bump((0.5,), 0.2), 0.0, 1.0) == pytest.approx(32 / 175, abs=1e-15)
    assert integrate_1d_exact(Bump((0.5,), 0.2), 0.0, 1.0, Monomial((1,), 2.0)) == pytest.approx(32 / 175, abs=1e-15)


def test_integrate_1d_smooth_bump_falls_back_to_quadrature():
    import mpmath
    oracle = 0.2 * mpmath.quad(lambda u: mpmath.exp(1 - 1 / (1 - u ** 2)), [-1, 0, 1])
    got = integrate_1d(Bump((0.5,), 0.2, "cinf"), 0.0, 1.0)
    assert got == pytest.approx(float(oracle), abs=1e-12)


def test_ratio_and_dilate():
    f = Ratio(Monomial((1,)), Shift(1.0, Monomial((1,))))
    assert evaluate(f, (1.0,)) == 0.5
    g = Dilate(2.0, Monomial((2,)))
    assert evaluate(g, (0.25,)) == 0.25


def test_edge_profile_on_tree():
    t = tree_from_edges([("a", "b", 1.0), ("b", "c", 2.0)])
    f = EdgeProfile(1, Monomial((1,)))
    assert evaluate(f, (1, 1.5), t) == 1.5
    assert evaluate(f, (0, 0.5), t) == 0.0
