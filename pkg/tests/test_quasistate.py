from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasistates.basespace import ProductSpace, Simplex, TreePoint, tree_from_edges
from quasistates.errors import DomainError, InvalidCertificateError
from quasistates.funcspace import Ball, Bump, Constant, Monomial, Product, Sum
from quasistates.quasistate import (
    ToricHamiltonian, ball_integral, calabi_property_check, calabi_value,
    conformal_factor, cpn_model, default_model, evaluation_point,
    independence_certificate, lipschitz_check, matched_bumps,
    mu_delta_closed_form, mu_delta_via_pullback, pushed_forward_profile,
    special_point, zeta,
)
from quasistates.symmetry import AffineSymmetry, displace_region, enumerate_group


@pytest.mark.parametrize("n, f, expected", [
    (1, Monomial((2,)), Fraction(1, 3) - Fraction(1, 4)),
    (2, Monomial((1, 0)), Fraction(0)),
    (2, Monomial((1, 1)), Fraction(1, 12) - Fraction(1, 9)),
])
def test_zeta_examples(n, f, expected):
    assert zeta(cpn_model(n), ToricHamiltonian(f), "exact") == pytest.approx(float(expected), abs=1e-15)


@pytest.mark.parametrize("n, f, power, expected", [
    (2, Monomial((1, 0)), 1, 1 / 3),
    (2, Constant(0.0), 1, 0.0),
    (1, Monomial((2,)), 3, 1.0),
])
def test_calabi_value_examples(n, f, power, expected):
    assert calabi_value(cpn_model(n), ToricHamiltonian(f, power), "exact") == pytest.approx(expected, abs=1e-15)


def test_special_points():
    assert special_point(Simplex(2)) == pytest.approx((1 / 3, 1 / 3))
    assert special_point(ProductSpace((Simplex(1), Simplex(1)))) == ((0.5,), (0.5,))
    assert special_point(tree_from_edges([("a", "b", 1.0)])) == TreePoint(0, 0.5)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_special_point_fixed_by_symmetries(n):
    space = Simplex(n)
    p = np.asarray(special_point(space))
    for g in enumerate_group(space):
        np.testing.assert_allclose(g.apply(p), p, atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_constants_and_linear_functions_vanish(n):
    model = cpn_model(n)
    assert zeta(model, ToricHamiltonian(Constant(4.0)), "exact") == pytest.approx(0.0, abs=1e-14)
    lin = Sum(tuple(Monomial(tuple(int(i == k) for i in range(n)), k + 1.0) for k in range(n)))
    assert zeta(model, ToricHamiltonian(lin), "exact") == pytest.approx(0.0, abs=1e-14)


coef = st.floats(-3, 3)
poly2 = st.lists(st.tuples(st.tuples(st.integers(0, 4), st.integers(0, 4)), coef), min_size=1, max_size=4).map(
    lambda ts: Sum(tuple(Monomial(e, c) for e, c in ts)))


@given(poly2, poly2, coef, coef, st.integers(-4, 4).filter(bool))
def test_linearity_and_homogeneity(f, g, a, b, m):
    model = cpn_model(2)
    z = lambda h, p=1: zeta(model, ToricHamiltonian(h, p), "exact")  # noqa: E731
    assert z(a * f + b * g) == pytest.approx(a * z(f) + b * z(g), abs=1e-12)
    assert z(f, m) == pytest.approx(m * z(f), abs=1e-12)


def test_calabi_property_examples():
    model, space = cpn_model(2), Simplex(2)
    cert = displace_region(space, [Ball((0.6, 0.2), 0.05)])
    assert calabi_property_check(model, ToricHamiltonian(Bump((0.6, 0.2), 0.05)), cert, order=12, panels=8)
    zero = Product((Constant(0.0), Bump((0.6, 0.2), 0.05)))
    assert calabi_property_check(model, ToricHamiltonian(zero), cert)
    assert displace_region(space, [Ball((1 / 3, 1 / 3), 0.05)]) is None


def test_calabi_property_rejects_mismatched_certificate():
    model, space = cpn_model(2), Simplex(2)
    cert = displace_region(space, [Ball((0.6, 0.2), 0.05)])
    with pytest.raises(InvalidCertificateError):
        calabi_property_check(model, ToricHamiltonian(Bump((0.1, 0.1), 0.05)), cert)
    with pytest.raises(InvalidCertificateError):
        calabi_property_check(model, ToricHamiltonian(Monomial((1, 0))), cert)


def test_monotone_vanishing_on_sigma_support():
    # f vanishes at the barycenter, so zeta equals the Calabi value
    model = cpn_model(2)
    f = Sum((Monomial((1, 0)), Constant(-1 / 3))) * Monomial((0, 2))
    h = ToricHamiltonian(f)
    assert zeta(model, h, "exact") == pytest.approx(calabi_value(model, h, "exact"), abs=1e-15)


# -- the ball family ------------------------------------------------------------------

def test_conformal_factor_conventions():
    assert conformal_factor(2, 0.9, "derived") == pytest.approx(0.9 ** -2)
    assert conformal_factor(2, 0.9, "paper") == pytest.approx(0.9 ** -3)
    assert conformal_factor(3, 1.0, "derived") == conformal_factor(3, 1.0, "paper") == 1.0
    with pytest.raises(ValueError):
        conformal_factor(1, 0.9, "other")


def test_mu_delta_bump_away_from_evaluation_point():
    f = Bump((0.2,), 0.1)
    assert mu_delta_closed_form(1, 1.0, f) == pytest.approx(0.1 * 32 / 35, abs=1e-15)


def test_mu_delta_bump_on_evaluation_point():
    f = Bump((0.5,), 0.2)
    assert mu_delta_closed_form(1, 1.0, f) == pytest.approx(32 / 175 - 1, abs=1e-15)


def test_mu_delta_closed_form_off_unit_delta():
    # x = 5/9, bump value (1 - (1/18 / 0.2)^2)^3 = (299/324)^3, derived factor 1/0.9
    f = Bump((0.5,), 0.2)
    expected = 32 / 175 - (10 / 9) * (299 / 324) ** 3
    assert mu_delta_closed_form(1, 0.9, f) == pytest.approx(expected, abs=1e-14)
    assert mu_delta_via_pullback(1, 0.9, f) == pytest.approx(expected, abs=1e-14)


def test_mu_delta_linear_profile_vanishes():
    f = Monomial((1,))
    assert mu_delta_closed_form(2, 1.0, f) == pytest.approx(0.0, abs=1e-15)
    assert mu_delta_via_pullback(2, 1.0, f) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("delta", [1.0, 0.95])
def test_two_paths_agree_for_bump_at_0_2(delta):
    f = Bump((0.2,), 0.1)
    assert mu_delta_via_pullback(1, delta, f) == pytest.approx(mu_delta_closed_form(1, delta, f, "derived"), abs=1e-12)


def test_paper_convention_disagrees_with_pullback():
    f = Bump((0.5,), 0.2)
    gap = mu_delta_closed_form(1, 0.9, f, "paper") - mu_delta_via_pullback(1, 0.9, f)
    assert abs(gap) > 1e-3


@pytest.mark.parametrize("n, delta, profile", [
    (1, 0.4, Bump((0.5,), 0.1)),
    (2, 0.6, Bump((0.5,), 0.1)),
    (1, 0.0, Bump((0.5,), 0.1)),
    (1, 1.2, Bump((0.5,), 0.1)),
    (1, 0.9, Bump((0.95,), 0.1)),
    (1, 0.9, Monomial((1,))),
])
def test_mu_delta_preconditions(n, delta, profile):
    with pytest.raises(DomainError):
        mu_delta_closed_form(n, delta, profile)


def _ball_samples(n, size, rng):
    """Uniform points of the 2n-ball of radius 1/sqrt(pi), drawn in C^n coordinates."""
    v = rng.normal(size=(size, 2 * n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rad = rng.random(size) ** (1 / (2 * n)) / np.sqrt(np.pi)
    return v * rad[:, None]


def test_ball_integral_monte_carlo():
    rng = np.random.default_rng(4)
    w = _ball_samples(2, 400_000, rng)
    s = np.pi * (w ** 2).sum(axis=1)
    vals = s  # F(w) = pi |w|^2
    est, se = vals.mean(), vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(est - ball_integral(2, Monomial((1,)))) <= 4 * se
    assert ball_integral(2, Monomial((1,))) == pytest.approx(2 / 3, abs=1e-15)


def test_conformal_factor_by_monte_carlo():
    """Compare the ball integral with the CP^1 integral of the pushed-forward function.

    Independent of the library's samplers: points of CP^1 come from the
    moment coordinate |z_1|^2 / |z|^2 of a Gaussian vector in C^2, ball points from
    a uniform draw in the disk.
    """
    n, delta = 1, 0.9
    rng = np.random.default_rng(2024)
    profile = Bump((0.45,), 0.3)
    H = pushed_forward_profile(delta, profile)
    z = rng.normal(size=(1_000_000, 4))
    p = ((z[:, 2:] ** 2).sum(axis=1) / (z ** 2).sum(axis=1))[:, None]
    # the image of the embedding is {sum p < delta}, a delta^n fraction of the volume
    frac = (p[:, 0] < delta).mean()
    assert abs(frac - delta ** n) < 4 * np.sqrt(delta * (1 - delta) / len(p))
    hv = H.evaluate(p)
    cp_int, cp_se = hv.mean(), hv.std(ddof=1) / np.sqrt(len(hv))
    w = _ball_samples(n, 1_000_000, rng)
    fv = profile.evaluate((np.pi * (w ** 2).sum(axis=1))[:, None])
    ball_int, ball_se = fv.mean(), fv.std(ddof=1) / np.sqrt(len(fv))
    # int H omega^n = delta^(n+1) int F omega_B^n
    ratio = cp_int / ball_int
    ratio_se = ratio * np.hypot(cp_se / cp_int, ball_se / ball_int)
    assert abs(ratio - delta ** (n + 1)) <= 4 * ratio_se
    assert abs(ratio - delta ** n) > 10 * ratio_se
    # the point term: H(barycenter) = delta * F(x), so the normalized coefficient is delta^-n
    x = evaluation_point(n, delta)
    hb = float(H.evaluate(np.array([[1 / (n + 1)] * n]))[0])
    fx = float(profile.evaluate(np.array([[x]]))[0])
    assert delta ** (-n - 1) * hb == pytest.approx(conformal_factor(n, delta, "derived") * fx, rel=1e-14)


def test_independence_examples():
    deltas = [1.0, 0.9]
    cert = independence_certificate(1, deltas, matched_bumps(1, deltas))
    assert cert.rank == 2
    assert evaluation_point(1, 0.9) == pytest.approx(5 / 9)
    same = independence_certificate(1, deltas, [Bump((0.5,), 0.02)] * 2)
    assert same.rank == 1
    single = independence_certificate(1, [1.0], [Bump((0.5,), 0.1)])
    assert single.rank == 1


def test_independence_rejects_duplicates():
    with pytest.raises(DomainError):
        independence_certificate(1, [0.9, 0.9], matched_bumps(1, [0.9, 0.8]))


@pytest.mark.parametrize("convention", ["derived", "paper"])
@pytest.mark.parametrize("n", [1, 2])
def test_independence_three_deltas(n, convention):
    deltas = [1.0, 0.9, 0.8]
    cert = independence_certificate(n, deltas, matched_bumps(n, deltas), convention)
    assert cert.rank == 3
    assert cert.min_singular_value > 0.1 * cert.max_singular_value


def test_lipschitz_examples():
    model = cpn_model(1)
    h = ToricHamiltonian(Monomial((2,)))
    assert lipschitz_check(model, h, h)[:2] == (0.0, 0.0)
    lhs, bound, ok = lipschitz_check(model, h, ToricHamiltonian(Constant(0.0)))
    assert lhs == pytest.approx(1 / 12) and bound == pytest.approx(2.0) and ok


def test_stabilization_on_tree_times_interval():
    from quasistates.funcspace import EdgeProfile, Factor
    seg = tree_from_edges([("a", "b", 1.0)])
    model = default_model(ProductSpace((seg, Simplex(1))))
    f = Product((Factor(0, EdgeProfile(0, Monomial((2,)))), Factor(1, Monomial((1,)))))
    # int x^2 p = 1/3 * 1/2, median point (1/2, 1/2)
    assert zeta(model, ToricHamiltonian(f), "exact") == pytest.approx(1 / 6 - 1 / 8, abs=1e-15)


def test_affine_symmetry_identity():
    assert AffineSymmetry((0, 1, 2)).is_identity
