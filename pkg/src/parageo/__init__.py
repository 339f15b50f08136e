"""Parabolic geodesics in conformal and projective geometry from coordinate metrics."""
from ._accel import USE_NUMBA, backend_name
from .curves import (
    IntegrationError, Trajectory, integrate, integrate_curve, make_system, rk4_step,
    ode3_initial_acceleration, coupled_initial_alpha,
)
from .expr import DomainError, ExprError, ScalarExpr, eval_jet2, evaluate, parse, to_string
from .geometry import (
    GeometryError, MetricField, christoffel, conformal_rescale, curvature_at, metric_at,
    projective_schouten, ricci, riemann, scalar, schouten,
)
from .tractor import Tractor, gauge_change, parallel_transport, tractor_metric, weyl_tractor
from .weyl import alpha_from_acceleration, weyl_acceleration
from .zoo import builtin_metric

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA", "backend_name",
    "IntegrationError", "Trajectory", "integrate", "integrate_curve", "make_system", "rk4_step",
    "ode3_initial_acceleration", "coupled_initial_alpha",
    "DomainError", "ExprError", "ScalarExpr", "eval_jet2", "evaluate", "parse", "to_string",
    "GeometryError", "MetricField", "christoffel", "conformal_rescale", "curvature_at", "metric_at",
    "projective_schouten", "ricci", "riemann", "scalar", "schouten",
    "Tractor", "gauge_change", "parallel_transport", "tractor_metric", "weyl_tractor",
    "alpha_from_acceleration", "weyl_acceleration", "builtin_metric",
]
