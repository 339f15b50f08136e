"""Curve systems and a fixed-step RK4 integrator.

All systems are first order in a flat state vector ``y``:

=============  ===================  ===========================================
kind           state                meaning
=============  ===================  ===========================================
``conformal``  ``(x, v, alpha)``    Weyl geodesic + parallel Weyl structure
``ode3``       ``(x, v, A)``        third-order form, ``A = D_v v`` covariant
``projective`` ``(x, v, u)``        projective parabolic geodesic
``geodesic``   ``(x, v)``           Levi-Civita geodesic
=============  ===================  ===========================================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expr import ExprError
from .geometry import GeometryError, MetricField, connection_at, curvature_at, metric_jets
from .weyl import NULL_THRESHOLD, NullVelocityError, acceleration_terms, alpha_from_covariant


class IntegrationError(RuntimeError):
    """The right-hand side failed or the state stopped being finite at time ``t``."""

    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"{message} (at t = {t:.17g})"
        super().__init__(message)


# ------------------------------------------------------------------- states

@dataclass(frozen=True)
class ConformalState:
    x: np.ndarray
    v: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class Jet3State:
    x: np.ndarray
    v: np.ndarray
    A: np.ndarray


@dataclass(frozen=True)
class ProjectiveState:
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray


# ------------------------------------------------------------------ systems

class CurveSystem:
    """Base class: subclasses define ``kind``, ``extra`` and ``rhs``."""

    kind = ""
    extra = ""  # column prefix of the third block, empty when absent

    def __init__(self, metric: MetricField):
        self.metric = metric
        self.n = metric.dim

    @property
    def size(self):
        return 3 * self.n if self.extra else 2 * self.n

    def pack(self, x, v, extra=None) -> np.ndarray:
        parts = [np.asarray(x, dtype=float).ravel(), np.asarray(v, dtype=float).ravel()]
        if self.extra:
            if extra is None:
                raise ValueError(f"{self.kind} system needs initial {self.extra}")
            parts.append(np.asarray(extra, dtype=float).ravel())
        y = np.concatenate(parts)
        if y.shape[0] != self.size:
            raise ValueError(f"state vectors must all have length {self.n}")
        return y

    def split(self, y):
        n = self.n
        return y[:n], y[n:2 * n], (y[2 * n:3 * n] if self.extra else None)

    def columns(self):
        n = self.n
        cols = ["t"] + [f"x{i}" for i in range(1, n + 1)] + [f"v{i}" for i in range(1, n + 1)]
        if self.extra:
            cols += [f"{self.extra}{i}" for i in range(1, n + 1)]
        return cols

    def rhs(self, t, y) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError


class GeodesicSystem(CurveSystem):
    kind = "geodesic"

    def rhs(self, t, y):
        n = self.n
        v = y[n:]
        _, _, gamma = connection_at(self.metric, y[:n])
        return np.concatenate([v, -(gamma @ v) @ v])


class ConformalSystem(CurveSystem):
    """Weyl geodesic ``D^alpha_v v = 0`` with the Weyl structure parallel along it.

    The 1-form obeys ``D_v alpha = S(v, .) - 1/2 |alpha|^2 v_flat + alpha(v) alpha``.
    """

    kind = "conformal"
    extra = "alpha"

    def rhs(self, t, y):
        n = self.n
        x, v, alpha = y[:n], y[n:2 * n], y[2 * n:]
        cur = curvature_at(self.metric, x)
        g, g_inv = cur.metric.g, cur.metric.g_inv
        S = cur.schouten
        gv = cur.gamma @ v
        av = alpha @ v
        dv = acceleration_terms(cur.gamma, g, g_inv, v, alpha)
        dalpha = (gv.T @ alpha + S @ v - 0.5 * (alpha @ g_inv @ alpha) * (g @ v) + av * alpha)
        return np.concatenate([v, dv, dalpha])


class ThirdOrderSystem(CurveSystem):
    """The third-order conformal-circle equation as a first-order system in ``(x, v, A)``.

    Covariantly::

        D_v A = -3/2 |A|^2/|v|^2 v + 3 g(A, v)/|v|^2 A + |v|^2 S(v, .)^# - c S(v, v) v

    with ``c = tangential_schouten``.  ``c = 2`` is what the coupled system
    implies; any other value only changes the parametrisation of the curve.
    """

    kind = "ode3"
    extra = "A"
    tangential_schouten = 2.0

    def __init__(self, metric, tangential_schouten=None):
        super().__init__(metric)
        if tangential_schouten is not None:
            self.tangential_schouten = float(tangential_schouten)

    def rhs(self, t, y):
        n = self.n
        x, v, A = y[:n], y[n:2 * n], y[2 * n:]
        cur = curvature_at(self.metric, x)
        g, g_inv = cur.metric.g, cur.metric.g_inv
        S = cur.schouten
        gvv = v @ g @ v
        if abs(gvv) <= NULL_THRESHOLD:
            raise NullVelocityError(f"g(v, v) = {gvv:.3e}: third-order equation needs non-null velocity")
        Sv = S @ v
        DA = (-1.5 * (A @ g @ A) / gvv * v + 3.0 * (A @ g @ v) / gvv * A
              + gvv * (g_inv @ Sv) - self.tangential_schouten * (v @ Sv) * v)
        dv = A - (cur.gamma @ v) @ v
        dA = DA - (cur.gamma @ A) @ v
        return np.concatenate([v, dv, dA])


class ProjectiveSystem(CurveSystem):
    """Projective parabolic geodesics over the Levi-Civita connection of the metric."""

    kind = "projective"
    extra = "u"

    def rhs(self, t, y):
        n = self.n
        x, v, u = y[:n], y[n:2 * n], y[2 * n:]
        cur = curvature_at(self.metric, x)
        P = cur.projective_schouten
        gv = cur.gamma @ v
        uv = u @ v
        dv = -gv @ v - 2.0 * uv * v
        du = gv.T @ u + P @ v + uv * u
        return np.concatenate([v, dv, du])


SYSTEMS = {
    "conformal": ConformalSystem,
    "ode3": ThirdOrderSystem,
    "projective": ProjectiveSystem,
    "geodesic": GeodesicSystem,
}


def make_system(kind: str, metric: MetricField) -> CurveSystem:
    try:
        return SYSTEMS[kind](metric)
    except KeyError:
        raise ValueError(f"unknown system {kind!r}; expected one of {sorted(SYSTEMS)}") from None


# ------------------------------------------------------ state-level wrappers

def conformal_coupled_rhs(M: MetricField, s: ConformalState) -> ConformalState:
    sys_ = ConformalSystem(M)
    d = sys_.rhs(0.0, sys_.pack(s.x, s.v, s.alpha))
    return ConformalState(*sys_.split(d))


def conformal_ode3_rhs(M: MetricField, s: Jet3State) -> Jet3State:
    sys_ = ThirdOrderSystem(M)
    d = sys_.rhs(0.0, sys_.pack(s.x, s.v, s.A))
    return Jet3State(*sys_.split(d))


def projective_coupled_rhs(M: MetricField, s: ProjectiveState) -> ProjectiveState:
    sys_ = ProjectiveSystem(M)
    d = sys_.rhs(0.0, sys_.pack(s.x, s.v, s.u))
    return ProjectiveState(*sys_.split(d))


def geodesic_rhs(M: MetricField, x, v):
    sys_ = GeodesicSystem(M)
    d = sys_.rhs(0.0, sys_.pack(x, v))
    return sys_.split(d)[:2]


def ode3_initial_acceleration(M: MetricField, x0, v0, alpha0) -> np.ndarray:
    """Covariant acceleration ``A0 = -2 alpha(v) v + g(v, v) alpha^#`` of the coupled data."""
    x0, v0, alpha0 = (np.asarray(a, dtype=float) for a in (x0, v0, alpha0))
    g, g_inv, _ = connection_at(M, x0)
    return -2.0 * (alpha0 @ v0) * v0 + (v0 @ g @ v0) * (g_inv @ alpha0)


def coupled_initial_alpha(M: MetricField, x0, v0, A0) -> np.ndarray:
    """Inverse bridge: the 1-form whose Weyl geodesic has covariant acceleration ``A0``."""
    g, _, _ = connection_at(M, x0)
    return alpha_from_covariant(g, np.asarray(v0, dtype=float), np.asarray(A0, dtype=float))


# --------------------------------------------------------------- integrator

@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (samples, state size)
    kind: str
    dim: int
    diagnostics: dict = field(default_factory=dict)
    error_estimate: float | None = None

    def __len__(self):
        return self.times.shape[0]

    @property
    def x(self):
        return self.states[:, :self.dim]

    @property
    def v(self):
        return self.states[:, self.dim:2 * self.dim]

    @property
    def extra(self):
        return self.states[:, 2 * self.dim:3 * self.dim]


def rk4_step(f: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def time_grid(t0: float, t1: float, h: float) -> np.ndarray:
    """Uniform grid from ``t0`` to ``t1`` (either direction); the last step may be short."""
    if not h > 0 or not math.isfinite(h):
        raise ValueError("step must be positive")
    if t1 == t0:
        raise ValueError("empty time interval")
    span = abs(t1 - t0)
    steps = max(1, int(math.ceil(span / h - 1e-9)))
    sign = 1.0 if t1 > t0 else -1.0
    times = t0 + sign * h * np.arange(steps + 1, dtype=float)
    times[-1] = t1
    return times


def integrate(system, y0, t0: float, t1: float, h: float, *,
              error_estimate: bool = False, diagnostics: bool = True) -> Trajectory:
    """Classical RK4 from ``t0`` to ``t1`` with fixed step ``h``.

    ``system`` is a :class:`CurveSystem` or a bare ``f(t, y)``.  With
    ``error_estimate`` every step is repeated as two half steps and the largest
    Richardson estimate ``|y_half - y_full| / 15`` is stored.
    """
    f = system.rhs if isinstance(system, CurveSystem) else system
    times = time_grid(t0, t1, h)
    y = np.array(y0, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise IntegrationError("initial state is not finite", t0)
    states = np.empty((times.shape[0], y.shape[0]))
    states[0] = y
    worst = 0.0
    for i in range(times.shape[0] - 1):
        t = times[i]
        dt = times[i + 1] - t
        try:
            y_next = rk4_step(f, t, y, dt)
            if error_estimate:
                half = rk4_step(f, t + 0.5 * dt, rk4_step(f, t, y, 0.5 * dt), 0.5 * dt)
                worst = max(worst, float(np.max(np.abs(half - y_next))) / 15.0)
        except (ExprError, GeometryError, NullVelocityError, ArithmeticError,
                np.linalg.LinAlgError) as exc:
            raise IntegrationError(f"right-hand side failed: {exc}", t) from exc
        if not np.all(np.isfinite(y_next)):
            raise IntegrationError("state became non-finite", times[i + 1])
        y = y_next
        states[i + 1] = y
    traj = Trajectory(times, states, getattr(system, "kind", "custom"),
                      getattr(system, "n", y.shape[0]),
                      error_estimate=worst if error_estimate else None)
    if diagnostics and isinstance(system, CurveSystem):
        traj.diagnostics["gvv"] = speed_squared(system.metric, traj)
    return traj


def speed_squared(M: MetricField, traj: Trajectory) -> np.ndarray:
    """``g(v, v)`` at every sample."""
    out = np.empty(len(traj))
    for i, (x, v) in enumerate(zip(traj.x, traj.v)):
        g = metric_jets(M, x)[0]
        out[i] = v @ g @ v
    return out


def integrate_curve(kind: str, M: MetricField, x0, v0, extra0=None, t0=0.0, t1=1.0,
                    h=1e-3, **kwargs) -> Trajectory:
    system = make_system(kind, M)
    return integrate(system, system.pack(x0, v0, extra0), t0, t1, h, **kwargs)
