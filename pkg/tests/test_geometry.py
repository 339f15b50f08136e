import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parageo import zoo
from parageo.expr import eval_jet2, parse
from parageo.geometry import (
    DegenerateMetricError, GeometryError, MetricField, SignatureError, christoffel,
    conformal_rescale, curvature_at, flat, metric_at, projective_schouten, ricci, schouten, sharp,
)
from parageo.verify import fd_tensor_oracle, relative_error

SPHERE = zoo.sphere_stereographic(3)
HYPER = zoo.hyperbolic_halfspace(3)
points3 = st.lists(st.floats(-0.7, 0.7), min_size=3, max_size=3).map(np.array)


def test_euclidean_jets_vanish():
    m = metric_at(zoo.euclidean(3), [0.3, -1.0, 2.0])
    np.testing.assert_array_equal(m.g, np.eye(3))
    assert not m.dg.any() and not m.d2g.any()
    assert not christoffel(zoo.euclidean(3), [1, 2, 3]).any()


def test_inverse_square_metric_derivative():
    M = MetricField.from_strings([["1/x2^2", "0"], ["0", "1/x2^2"]], (2, 0))
    m = metric_at(M, [0, 1])
    np.testing.assert_allclose(m.g, np.eye(2))
    assert m.dg[1, 0, 0] == -2.0
    gamma = christoffel(M, [0, 1])
    # Gamma^1_12 = -1/x2, Gamma^2_11 = 1/x2, Gamma^2_22 = -1/x2
    assert gamma[0, 0, 1] == gamma[0, 1, 0] == -1
    assert gamma[1, 0, 0] == 1 and gamma[1, 1, 1] == -1


def test_sphere_at_origin():
    np.testing.assert_array_equal(metric_at(SPHERE, [0, 0, 0]).g, 4 * np.eye(3))


def test_upper_triangle_rows():
    full = MetricField.from_strings([["1", "0.1*x1"], ["0.1*x1", "2"]], (2, 0))
    upper = MetricField.from_strings([["1", "0.1*x1"], ["2"]], (2, 0))
    np.testing.assert_array_equal(metric_at(full, [0.5, 0]).g, metric_at(upper, [0.5, 0]).g)


def test_asymmetric_rows_rejected():
    with pytest.raises(GeometryError):
        MetricField.from_strings([["1", "x1"], ["x2", "1"]], (2, 0))


@settings(max_examples=25, deadline=None)
@given(x=points3)
def test_christoffel_matches_fd_oracle_on_sphere(x):
    fd = fd_tensor_oracle(SPHERE, x)
    assert relative_error(christoffel(SPHERE, x), fd["gamma"]) <= 1e-6


def test_trig_metric_matches_fd_oracle():
    M = MetricField.from_strings([["2 + sin(x1*x2)", "0.3*cos(x3)", "0"],
                                  ["1 + x1^2", "0.1*x2*x3"], ["exp(0.2*x1)"]], (3, 0))
    x = np.array([0.3, -0.4, 0.7])
    fd = fd_tensor_oracle(M, x)
    m = metric_at(M, x)
    for key in ("dg", "d2g"):
        assert relative_error(getattr(m, key), fd[key]) <= 1e-6
    assert relative_error(christoffel(M, x), fd["gamma"]) <= 1e-6


@settings(max_examples=25, deadline=None)
@given(x=points3)
def test_unit_sphere_constant_curvature(x):
    cur = curvature_at(SPHERE, x)
    g = cur.metric.g
    assert relative_error(cur.ricci, 2 * g) <= 1e-12
    assert cur.scalar == pytest.approx(6.0, rel=1e-12)
    assert relative_error(cur.schouten, 0.5 * g) <= 1e-12
    assert relative_error(cur.projective_schouten, g) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(x=points3)
def test_hyperbolic_constant_curvature(x):
    x = x.copy()
    x[2] = 1.0 + abs(x[2])
    cur = curvature_at(HYPER, x)
    g = cur.metric.g
    assert relative_error(cur.ricci, -2 * g) <= 1e-12
    assert relative_error(cur.schouten, -0.5 * g) <= 1e-12
    assert relative_error(cur.projective_schouten, -g) <= 1e-12


def test_flat_tensors_vanish():
    E = zoo.euclidean(3)
    assert not ricci(E, [1, 2, 3]).any()
    assert not schouten(E, [1, 2, 3]).any()
    assert not projective_schouten(E, [1, 2, 3]).any()


def test_riemann_symmetries():
    M = zoo.conformal("0.3*sin(x1)*x2 + 0.1*x3^2", 3)
    cur = curvature_at(M, [0.2, 0.5, -0.3])
    R = np.einsum("ml,lijk->mijk", cur.metric.g, cur.riemann)  # R_mijk lowered
    np.testing.assert_allclose(R, -R.transpose(0, 1, 3, 2), atol=1e-12)
    np.testing.assert_allclose(R, -R.transpose(1, 0, 2, 3), atol=1e-12)
    np.testing.assert_allclose(R, R.transpose(2, 3, 0, 1), atol=1e-12)
    bianchi = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
    np.testing.assert_allclose(bianchi, 0, atol=1e-12)
    np.testing.assert_allclose(cur.ricci, cur.ricci.T, atol=1e-12)


def test_sharp_and_flat():
    g4 = MetricField.from_strings([["4", "0", "0"], ["4", "0"], ["4"]], (3, 0))
    np.testing.assert_array_equal(sharp(g4, [0, 0, 0], [4, 0, 0]), [1, 0, 0])
    np.testing.assert_array_equal(sharp(zoo.minkowski(2, 1), [0, 0, 0], [1, 0, 0]), [-1, 0, 0])
    np.testing.assert_array_equal(flat(zoo.minkowski(2, 1), [0, 0, 0], [1, 0, 0]), [-1, 0, 0])


def test_schouten_needs_three_dimensions():
    with pytest.raises(GeometryError, match="n < 3"):
        schouten(zoo.euclidean(2), [0, 0])
    # the projective normalisation is fine in two dimensions
    assert projective_schouten(zoo.sphere_stereographic(2), [0, 0]) == pytest.approx(np.eye(2) * 4)


def test_signature_and_degeneracy_errors():
    with pytest.raises(SignatureError):
        metric_at(MetricField.from_strings([["1", "0"], ["1"]], (1, 1)), [0, 0])
    with pytest.raises(DegenerateMetricError):
        metric_at(MetricField.from_strings([["x1", "0"], ["1"]], (2, 0)), [0, 0])


def test_conformal_rescale_matches_builtin():
    f = parse("0.1*x1", 3)
    rescaled = conformal_rescale(zoo.euclidean(3), f)
    x = [0.4, 0.2, -0.1]
    np.testing.assert_allclose(metric_at(rescaled, x).g, np.exp(0.2 * 0.4) * np.eye(3), rtol=1e-15)
    np.testing.assert_allclose(curvature_at(rescaled, x).ricci,
                               curvature_at(zoo.conformal("0.1*x1", 3), x).ricci, atol=1e-14)


def test_schouten_transformation_law():
    """Under g -> e^{2f} g: S' = S - Hess f + df df - |df|^2 g / 2."""
    f = parse("0.2*x1*x2 + 0.1*sin(x3)", 3)
    x = np.array([0.3, -0.2, 0.5])
    E = zoo.euclidean(3)
    S2 = schouten(conformal_rescale(E, f), x)
    jet = eval_jet2(f, x)
    Y = jet.grad
    expected = -jet.hess + np.outer(Y, Y) - 0.5 * (Y @ Y) * np.eye(3)
    np.testing.assert_allclose(S2, expected, atol=1e-12)
