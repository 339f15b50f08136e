"""Standard conformal tractors in the gauge of a metric ``g``.

A tractor is a triple ``u = (lam, alpha, mu)`` (function, 1-form, function).
The tractor metric is ``H(u, u) = g^{-1}(alpha, alpha) - 2 lam mu`` and the
tractor connection reads::

    D_X u = ( d lam(X) + S(alpha^#, X),
              D^g_X alpha - lam X_flat + mu S(X, .),
              d mu(X) - alpha(X) )

with ``S`` the Schouten tensor of ``g``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import IntegrationError, Trajectory, rk4_step
from .expr import ScalarExpr, eval_jet2
from .geometry import MetricField, connection_at, curvature_at


class TransportError(IntegrationError):
    pass


@dataclass(frozen=True)
class Tractor:
    lam: float
    alpha: np.ndarray
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float).ravel())

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.lam], self.alpha, [self.mu]])

    @classmethod
    def from_array(cls, arr) -> "Tractor":
        arr = np.asarray(arr, dtype=float).ravel()
        return cls(arr[0], arr[1:-1], arr[-1])

    def __add__(self, other):
        return Tractor.from_array(self.as_array() + other.as_array())

    def __mul__(self, scale):
        return Tractor.from_array(float(scale) * self.as_array())

    __rmul__ = __mul__


def _check_dim(M: MetricField, u: Tractor):
    if u.alpha.shape[0] != M.dim:
        raise ValueError(f"tractor 1-form has length {u.alpha.shape[0]}, expected {M.dim}")


def metric_form(g_inv, u: Tractor, w: Tractor) -> float:
    return float(u.alpha @ g_inv @ w.alpha - u.lam * w.mu - w.lam * u.mu)


def tractor_metric(M: MetricField, x, u: Tractor, w: Tractor | None = None) -> float:
    """Polarised tractor metric ``H(u, w)``; ``H(u, u)`` when ``w`` is omitted."""
    w = u if w is None else w
    _check_dim(M, u)
    _check_dim(M, w)
    _, g_inv, _ = connection_at(M, x)
    return metric_form(g_inv, u, w)


def tractor_derivative(M: MetricField, x, X, u: Tractor, du_dt: Tractor) -> Tractor:
    """``D_X u`` given the coordinate derivatives ``du_dt`` of the components along ``X``."""
    _check_dim(M, u)
    X = np.asarray(X, dtype=float)
    cur = curvature_at(M, x)
    S = cur.schouten
    g, g_inv = cur.metric.g, cur.metric.g_inv
    cov_alpha = du_dt.alpha - (cur.gamma @ X).T @ u.alpha
    return Tractor(
        du_dt.lam + (g_inv @ u.alpha) @ S @ X,
        cov_alpha - u.lam * (g @ X) + u.mu * (S @ X),
        du_dt.mu - u.alpha @ X,
    )


def _transport_rhs(M: MetricField, x, X, y):
    n = M.dim
    lam, alpha, mu = y[0], y[1:n + 1], y[n + 1]
    cur = curvature_at(M, x)
    S = cur.schouten
    g, g_inv = cur.metric.g, cur.metric.g_inv
    SX = S @ X
    out = np.empty(n + 2)
    out[0] = -(g_inv @ alpha) @ SX
    out[1:n + 1] = (cur.gamma @ X).T @ alpha + lam * (g @ X) - mu * SX
    out[n + 1] = alpha @ X
    return out


def _hermite_mid(x0, v0, x1, v1, dt):
    """Midpoint position and velocity of the cubic Hermite interpolant."""
    xm = 0.5 * (x0 + x1) + 0.125 * dt * (v0 - v1)
    vm = 1.5 * (x1 - x0) / dt - 0.25 * (v0 + v1)
    return xm, vm


@dataclass
class TractorPath:
    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray
    H: np.ndarray
    error_estimate: float | None = None

    def __len__(self):
        return self.times.shape[0]

    def tractor(self, i) -> Tractor:
        return Tractor(self.lam[i], self.alpha[i], self.mu[i])


def _transport_on_grid(M, times, xs, vs, y0):
    out = np.empty((times.shape[0], y0.shape[0]))
    out[0] = y0
    y = y0
    for i in range(times.shape[0] - 1):
        dt = times[i + 1] - times[i]
        xm, vm = _hermite_mid(xs[i], vs[i], xs[i + 1], vs[i + 1], dt)
        ends = {0: (xs[i], vs[i]), 1: (xm, vm), 2: (xs[i + 1], vs[i + 1])}

        def f(t, yy, _ends=ends, _t0=times[i], _dt=dt):
            key = int(round(2.0 * (t - _t0) / _dt))
            px, pv = _ends[key]
            return _transport_rhs(M, px, pv, yy)

        y = rk4_step(f, times[i], y, dt)
        if not np.all(np.isfinite(y)):
            raise TransportError("tractor became non-finite", times[i + 1])
        out[i + 1] = y
    return out


def parallel_transport(M: MetricField, curve: Trajectory, u0: Tractor,
                       tolerance: float | None = None) -> TractorPath:
    """Solve ``D_{gamma'} u = 0`` along a sampled curve, one RK4 step per sample interval.

    Midpoints between samples come from the cubic Hermite interpolant of the
    positions and velocities.  With ``tolerance`` set, the transport is redone
    on every second sample and a :class:`TransportError` is raised when the
    step-doubling estimate exceeds it.
    """
    _check_dim(M, u0)
    times = np.asarray(curve.times, dtype=float)
    xs, vs = np.asarray(curve.x), np.asarray(curve.v)
    if times.shape[0] < 2:
        raise ValueError("curve needs at least two samples")
    y0 = u0.as_array()
    ys = _transport_on_grid(M, times, xs, vs, y0)
    n = M.dim
    estimate = None
    if tolerance is not None:
        if times.shape[0] < 3:
            raise ValueError("step-doubling needs at least three samples")
        last = (times.shape[0] - 1) // 2 * 2
        coarse = _transport_on_grid(M, times[:last + 1:2], xs[:last + 1:2], vs[:last + 1:2], y0)
        estimate = float(np.max(np.abs(coarse - ys[:last + 1:2]))) / 15.0
        if estimate > tolerance:
            raise TransportError(
                f"curve grid too coarse: step-doubling estimate {estimate:.3e} exceeds {tolerance:.3e}")
    H = np.empty(times.shape[0])
    for i in range(times.shape[0]):
        _, g_inv, _ = connection_at(M, xs[i])
        a = ys[i, 1:n + 1]
        H[i] = a @ g_inv @ a - 2.0 * ys[i, 0] * ys[i, n + 1]
    return TractorPath(times, xs.copy(), vs.copy(), ys[:, 0].copy(), ys[:, 1:n + 1].copy(),
                       ys[:, n + 1].copy(), H, estimate)


def gauge_change(M: MetricField, f: ScalarExpr, x, u: Tractor) -> Tractor:
    """Components of ``u`` in the gauge of ``exp(2 f) g``.

    With ``Y = df``: ``mu -> e^f mu``, ``alpha -> e^f (alpha + mu Y)`` and
    ``lam -> e^-f (lam + <Y, alpha> + |Y|^2 mu / 2)``, norms taken with ``g``.
    """
    _check_dim(M, u)
    jet = eval_jet2(f, x)
    _, g_inv, _ = connection_at(M, x)
    Y = jet.grad
    ef = np.exp(jet.value)
    return Tractor(
        (u.lam + Y @ g_inv @ u.alpha + 0.5 * (Y @ g_inv @ Y) * u.mu) / ef,
        ef * (u.alpha + u.mu * Y),
        ef * u.mu,
    )


def weyl_tractor(M: MetricField, x, alpha) -> Tractor:
    """Isotropic tractor ``(|alpha|^2 / 2, -alpha, 1)`` spanning the ray of the Weyl structure ``alpha``."""
    alpha = np.asarray(alpha, dtype=float)
    _, g_inv, _ = connection_at(M, x)
    return Tractor(0.5 * alpha @ g_inv @ alpha, -alpha, 1.0)
