import numpy as np
import pytest

from parageo import zoo
from parageo.geometry import GeometryError, metric_at
from parageo.zoo import UnknownMetricError, builtin_metric


def test_euclidean_identity():
    M = builtin_metric("euclidean", {"n": 3})
    np.testing.assert_array_equal(metric_at(M, [5, -1, 2]).g, np.eye(3))


def test_sphere_origin():
    np.testing.assert_array_equal(metric_at(builtin_metric("sphere_stereographic"), np.zeros(3)).g,
                                  4 * np.eye(3))


@pytest.mark.parametrize("x", [[0, 0, 0], [0.5, -1, 2], [-2, 0.3, 0.1]])
def test_conformal_linear_factor(x):
    M = builtin_metric("conformal", {"f": "0.1*x1", "n": 3})
    np.testing.assert_allclose(metric_at(M, x).g, np.exp(0.2 * x[0]) * np.eye(3), rtol=1e-15)


def test_minkowski_signature_layout():
    M = builtin_metric("minkowski", {"p": 3, "q": 1})
    assert M.signature == (3, 1)
    np.testing.assert_array_equal(metric_at(M, np.zeros(4)).g, np.diag([-1, 1, 1, 1]))


def test_hyperbolic_half_space():
    np.testing.assert_allclose(metric_at(zoo.hyperbolic_halfspace(2), [3, 2]).g, np.eye(2) / 4)


def test_unknown_and_bad_parameters():
    with pytest.raises(UnknownMetricError):
        builtin_metric("torus")
    with pytest.raises(GeometryError):
        builtin_metric("euclidean", {"dim": 3})
    with pytest.raises(GeometryError):
        builtin_metric("euclidean", {"n": 1})
    with pytest.raises(GeometryError):
        builtin_metric("conformal", {"f": 3})
    with pytest.raises(GeometryError):
        builtin_metric("minkowski", {"p": True})
