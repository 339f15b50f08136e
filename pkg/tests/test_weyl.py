import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parageo import zoo
from parageo.expr import eval_jet2, parse
from parageo.geometry import christoffel, conformal_rescale, connection_at, metric_at
from parageo.weyl import (
    NullVelocityError, alpha_from_acceleration, weyl_acceleration, weyl_coefficients,
)

E = zoo.euclidean(3)
e1, e2 = np.eye(3)[0], np.eye(3)[1]
vec3 = st.lists(st.floats(-1, 1), min_size=3, max_size=3).map(np.array)


def test_zero_alpha_is_levi_civita_geodesic():
    M = zoo.sphere_stereographic(3)
    x, v = np.array([0.1, 0.2, -0.3]), np.array([0.5, -1.0, 0.2])
    gamma = christoffel(M, x)
    np.testing.assert_allclose(weyl_acceleration(M, x, v, np.zeros(3)), -(gamma @ v) @ v)


def test_flat_examples():
    np.testing.assert_array_equal(weyl_acceleration(E, [0, 0, 0], e1, e2), e2)
    np.testing.assert_array_equal(weyl_acceleration(E, [0, 0, 0], e1, e1), -e1)


def test_alpha_recovery_examples():
    np.testing.assert_array_equal(alpha_from_acceleration(E, [0, 0, 0], e1, np.zeros(3)), 0)
    np.testing.assert_array_equal(alpha_from_acceleration(E, [0, 0, 0], e1, e2), e2)
    np.testing.assert_array_equal(alpha_from_acceleration(E, [0, 0, 0], e1, e1), -e1)


def test_null_velocity_rejected():
    with pytest.raises(NullVelocityError):
        alpha_from_acceleration(zoo.minkowski(2, 1), [0, 0, 0], [1, 1, 0], e2)


@settings(max_examples=40, deadline=None)
@given(x=vec3, v=vec3, alpha=vec3)
def test_round_trip_on_curved_metrics(x, v, alpha):
    for M in (zoo.sphere_stereographic(3), zoo.warped_lorentzian()):
        gm, _, _ = connection_at(M, x)
        if abs(v @ gm @ v) < 1e-3:
            continue
        a = weyl_acceleration(M, x, v, alpha)
        np.testing.assert_allclose(alpha_from_acceleration(M, x, v, a), alpha, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(v=vec3, a1=vec3, a2=vec3, s=st.floats(-2, 2))
def test_acceleration_is_affine_in_alpha(v, a1, a2, s):
    M = zoo.hyperbolic_halfspace(3)
    x = np.array([0.1, 0.2, 1.3])
    f = lambda a: weyl_acceleration(M, x, v, a)  # noqa: E731
    base = f(np.zeros(3))
    np.testing.assert_allclose(f(a1 + s * a2) - base, (f(a1) - base) + s * (f(a2) - base), atol=1e-12)


def test_gauge_compatibility_of_coefficients():
    """The same Weyl connection seen from g and from exp(2f) g, with alpha -> alpha - df."""
    f = parse("0.3*x1*x2 + 0.2*x3", 3)
    M = zoo.sphere_stereographic(3)
    M2 = conformal_rescale(M, f)
    x = np.array([0.2, -0.4, 0.1])
    alpha = np.array([0.3, -0.1, 0.5])
    df = eval_jet2(f, x).grad
    np.testing.assert_allclose(weyl_coefficients(M, x, alpha),
                               weyl_coefficients(M2, x, alpha - df), atol=1e-12)


def test_weyl_connection_preserves_conformal_class():
    """D^alpha g = -2 alpha (x) g."""
    M = zoo.warped_lorentzian()
    x = np.array([0.1, 0.4, -0.2])
    alpha = np.array([0.2, 0.7, -0.3])
    m = metric_at(M, x)
    C = weyl_coefficients(M, x, alpha)
    Dg = m.dg - np.einsum("lki,lj->kij", C, m.g) - np.einsum("lkj,il->kij", C, m.g)
    np.testing.assert_allclose(Dg, -2 * np.einsum("k,ij->kij", alpha, m.g), atol=1e-12)
