import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parageo import zoo
from parageo.curves import integrate_curve
from parageo.expr import parse
from parageo.geometry import conformal_rescale
from parageo.tractor import (
    Tractor, TransportError, gauge_change, parallel_transport, tractor_derivative, tractor_metric,
)
from parageo.verify import random_conformal_data

E = zoo.euclidean(3)
SPHERE = zoo.sphere_stereographic(3)
e1 = np.eye(3)[0]
ORIGIN = np.zeros(3)


def _line(h=1e-2):
    return integrate_curve("geodesic", E, ORIGIN, e1, None, 0, 1, h, diagnostics=False)


def test_tractor_metric_examples():
    assert tractor_metric(SPHERE, ORIGIN, Tractor(1, np.zeros(3), 0)) == 0
    alpha = np.array([4.0, 0, 2.0])
    assert tractor_metric(SPHERE, ORIGIN, Tractor(0, alpha, 0)) == pytest.approx(alpha @ alpha / 4)
    assert tractor_metric(E, ORIGIN, Tractor(1, np.zeros(3), 1)) == -2


def test_polarised_metric_is_symmetric():
    u, w = Tractor(1, [1, 2, 3], -1), Tractor(0.5, [0, 1, -1], 2)
    x = [0.1, 0.2, 0.3]
    assert tractor_metric(SPHERE, x, u, w) == pytest.approx(tractor_metric(SPHERE, x, w, u))


def test_flat_derivative_of_constant_tractor():
    u = Tractor(2.0, [1, -1, 0.5], 3.0)
    X = np.array([0.3, 1.0, -2.0])
    D = tractor_derivative(E, ORIGIN, X, u, Tractor(0, np.zeros(3), 0))
    np.testing.assert_allclose(D.as_array(), np.concatenate([[0], -2.0 * X, [-(u.alpha @ X)]]))


def test_flat_parallel_section():
    D = tractor_derivative(E, [0.4, 0, 0], e1, Tractor(0, e1, 0.4), Tractor(0, np.zeros(3), 1))
    assert not D.as_array().any()


def test_transport_flat_line_unit_form():
    path = parallel_transport(E, _line(), Tractor(0, e1, 0))
    np.testing.assert_allclose(path.mu, path.times, atol=1e-9, rtol=0)
    assert np.max(np.abs(path.alpha - e1)) <= 1e-9 and np.max(np.abs(path.lam)) <= 1e-9
    assert np.max(np.abs(path.H - 1)) <= 1e-9


def test_transport_flat_line_isotropic():
    path = parallel_transport(E, _line(), Tractor(1, np.zeros(3), 0))
    t = path.times
    assert np.max(np.abs(path.lam - 1)) <= 1e-9
    assert np.max(np.abs(path.alpha - np.outer(t, e1))) <= 1e-9
    assert np.max(np.abs(path.mu - t**2 / 2)) <= 1e-9
    assert np.max(np.abs(path.H)) <= 1e-9


def test_zero_tractor_stays_zero():
    rng = np.random.default_rng(0)
    x0, v0, a0 = random_conformal_data(SPHERE, rng)
    curve = integrate_curve("conformal", SPHERE, x0, v0, a0, 0, 1, 1e-2, diagnostics=False)
    path = parallel_transport(SPHERE, curve, Tractor(0, np.zeros(3), 0))
    assert not path.lam.any() and not path.alpha.any() and not path.mu.any()


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000), s=st.floats(-3, 3))
def test_transport_is_linear(seed, s):
    rng = np.random.default_rng(seed)
    x0, v0, a0 = random_conformal_data(SPHERE, rng)
    curve = integrate_curve("conformal", SPHERE, x0, v0, a0, 0, 1, 2e-2, diagnostics=False)
    u = Tractor(rng.normal(), rng.normal(size=3), rng.normal())
    w = Tractor(rng.normal(), rng.normal(size=3), rng.normal())

    def end(t):
        return parallel_transport(SPHERE, curve, t).tractor(-1).as_array()

    np.testing.assert_allclose(end(u + s * w), end(u) + s * end(w), atol=1e-11)


@pytest.mark.parametrize("name", ["euclidean", "minkowski", "sphere_stereographic",
                                  "hyperbolic_halfspace", "conformal", "warped_lorentzian"])
def test_tractor_metric_conserved_on_builtins(name):
    M = zoo.builtin_metric(name, {"f": "0.2*x1*x3"} if name == "conformal" else {})
    rng = np.random.default_rng(5)
    x0, v0, a0 = random_conformal_data(M, rng)
    if name == "hyperbolic_halfspace":
        x0[2] = 1.5
    curve = integrate_curve("conformal", M, x0, v0, a0, 0, 1, 1e-3, diagnostics=False)
    u0 = Tractor(rng.normal(), rng.normal(size=3), rng.normal())
    path = parallel_transport(M, curve, u0)
    assert np.max(np.abs(path.H - path.H[0])) <= 1e-8


def test_gauge_change_preserves_metric_and_commutes_with_transport():
    f = parse("0.3*x1 - 0.2*x2*x3", 3)
    M2 = conformal_rescale(SPHERE, f)
    rng = np.random.default_rng(9)
    x0, v0, a0 = random_conformal_data(SPHERE, rng)
    u = Tractor(0.4, [1, -0.5, 0.2], -1.2)
    assert tractor_metric(M2, x0, gauge_change(SPHERE, f, x0, u)) == pytest.approx(
        tractor_metric(SPHERE, x0, u), rel=1e-13)
    curve = integrate_curve("conformal", SPHERE, x0, v0, a0, 0, 1, 1e-3, diagnostics=False)
    base = parallel_transport(SPHERE, curve, u)
    hat = parallel_transport(M2, curve, gauge_change(SPHERE, f, x0, u))
    moved = gauge_change(SPHERE, f, curve.x[-1], base.tractor(-1))
    np.testing.assert_allclose(moved.as_array(), hat.tractor(-1).as_array(), atol=1e-9)


def test_step_doubling_tolerance():
    rng = np.random.default_rng(1)
    x0, v0, a0 = random_conformal_data(SPHERE, rng)
    coarse = integrate_curve("conformal", SPHERE, x0, v0, a0, 0, 1, 0.25, diagnostics=False)
    u0 = Tractor(1, [1, 0, 0], 1)
    with pytest.raises(TransportError):
        parallel_transport(SPHERE, coarse, u0, tolerance=1e-12)
    fine = integrate_curve("conformal", SPHERE, x0, v0, a0, 0, 1, 1e-3, diagnostics=False)
    assert parallel_transport(SPHERE, fine, u0, tolerance=1e-8).error_estimate <= 1e-8


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        tractor_metric(E, ORIGIN, Tractor(0, [1, 0], 0))
