import math

import numpy as np
import pytest

from biwave import gauss_legendre, integrate_interval, integrate_nested, sphere_surface_rule, weighted_ball_rule
from biwave.quadrature import QuadratureError, sphere_area


def test_gauss_legendre_order_one_is_midpoint():
    rule = gauss_legendre(1)
    np.testing.assert_allclose(rule.nodes, [0.0], atol=1e-16)
    np.testing.assert_allclose(rule.weights, [2.0])


def test_gauss_legendre_examples():
    assert gauss_legendre(2).integrate(lambda x: x ** 2) == pytest.approx(2 / 3, rel=1e-14)
    assert gauss_legendre(3).integrate(lambda x: x ** 4) == pytest.approx(2 / 5, rel=1e-14)


@pytest.mark.parametrize("order", [1, 2, 5, 16, 32])
def test_gauss_legendre_exactness(order):
    rule = gauss_legendre(order)
    for d in range(2 * order):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert abs(rule.integrate(lambda x: x ** d) - exact) <= 1e-13 * max(1.0, exact)
    assert np.all(rule.weights > 0)


@pytest.mark.parametrize("order", [0, -1, 2.5])
def test_gauss_legendre_rejects_bad_order(order):
    with pytest.raises(QuadratureError):
        gauss_legendre(order)


def test_integrate_interval_examples():
    assert integrate_interval(np.ones_like, 0.0, 3.0) == pytest.approx(3.0)
    assert integrate_interval(np.sin, -math.pi, math.pi) == pytest.approx(0.0, abs=1e-15)
    x, a, t = math.pi / 2, 1.0, 1.0
    assert integrate_interval(np.sin, x - a * t, x + a * t) == pytest.approx(2 * math.sin(1.0), abs=1e-14)
    assert integrate_interval(np.sin, 1.0, 1.0) == 0.0


def test_integrate_interval_rejects_non_finite_bounds():
    with pytest.raises(QuadratureError):
        integrate_interval(np.sin, 0.0, math.inf)


def test_integrate_interval_vectorizes_over_bounds():
    lo, hi = np.array([0.0, 1.0]), np.array([1.0, 3.0])
    np.testing.assert_allclose(integrate_interval(lambda s: s, lo, hi), [0.5, 4.0])


def test_integrate_interval_converges_monotonically():
    # int_0^2 exp(sin x) dx against a 200-point reference
    ref = integrate_interval(lambda x: np.exp(np.sin(x)), 0.0, 2.0, 200)
    errors = [abs(integrate_interval(lambda x: np.exp(np.sin(x)), 0.0, 2.0, k) - ref) for k in (1, 2, 4, 8)]
    assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    assert abs(integrate_interval(lambda x: np.exp(np.sin(x)), 0.0, 2.0, 16) - ref) < 1e-12


def test_integrate_nested_examples():
    assert integrate_nested(np.ones_like, 2, [(0.0, 2.0), (0.0, lambda y: y)]) == pytest.approx(2.0)
    tri = integrate_nested(np.ones_like, 3, [(-1.0, 1.0), (0.0, lambda y: y), (0.0, lambda tau: tau)])
    # the inner integrals leave y^2/2, which is even in y
    assert tri == pytest.approx(1 / 3, abs=1e-15)
    odd = integrate_nested(lambda w: np.ones_like(w), 2, [(-1.0, 1.0), (0.0, lambda y: y)])
    assert odd == pytest.approx(0.0, abs=1e-15)
    assert integrate_nested(lambda w: w, 2, [(0.0, 1.0), (0.0, lambda tau: tau)]) == pytest.approx(1 / 6)


@pytest.mark.parametrize("depth, bounds", [
    (4, [(0, 1)] * 4),
    (2, [(0, 1)]),
    (1, [(lambda y: y, 1.0)]),
])
def test_integrate_nested_rejects_malformed_bounds(depth, bounds):
    with pytest.raises(QuadratureError):
        integrate_nested(np.ones_like, depth, bounds)


@pytest.mark.parametrize("n", range(2, 8))
@pytest.mark.parametrize("level", [1, 3, 8])
def test_sphere_rule_normalization(n, level):
    rule = sphere_surface_rule(n, level)
    assert rule.weights.sum() == pytest.approx(sphere_area(n), rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)
    assert np.all(rule.weights > 0)


def test_sphere_areas():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_sphere_second_moment():
    rule = sphere_surface_rule(3, 8)
    assert rule.integrate(lambda y: y[:, 2] ** 2) / (4 * math.pi) == pytest.approx(1 / 3, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_sphere_rule_kills_linear_functionals(rng, n):
    rule = sphere_surface_rule(n, 6)
    v = rng.normal(size=n)
    assert abs(rule.integrate(lambda y: y @ v)) < 1e-12


def test_sphere_rule_unsupported_dimension():
    with pytest.raises(QuadratureError):
        sphere_surface_rule(1, 4)
    with pytest.raises(QuadratureError):
        sphere_surface_rule(9, 4)


@pytest.mark.parametrize("n", range(1, 7))
def test_ball_rule_normalization(n):
    rule = weighted_ball_rule(n, 10)
    assert rule.weights.sum() == pytest.approx(sphere_area(n + 1) / 2, rel=1e-10)
    assert np.all(np.linalg.norm(rule.nodes, axis=1) < 1.0)


def test_ball_rule_examples():
    assert weighted_ball_rule(2, 16).weights.sum() == pytest.approx(2 * math.pi, abs=1e-10)
    assert weighted_ball_rule(1, 16).weights.sum() == pytest.approx(math.pi, abs=1e-10)
    moment = weighted_ball_rule(2, 16).integrate(lambda z: np.sum(z ** 2, axis=1))
    assert moment == pytest.approx(4 * math.pi / 3, abs=1e-12)


def test_ball_rule_unsupported_dimension():
    with pytest.raises(QuadratureError):
        weighted_ball_rule(0, 4)
    with pytest.raises(QuadratureError):
        weighted_ball_rule(8, 4)
