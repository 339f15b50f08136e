"""Independent oracles and invariance checks.

Each ``check_*`` function returns a :class:`CheckReport`.  ``SUITE`` maps
names to zero-argument-ish runners over the builtin metrics; the CLI ``check``
command runs them.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels, zoo
from .curves import (Trajectory, integrate, integrate_curve, make_system,
                     ode3_initial_acceleration, rk4_step)
from .expr import ScalarExpr, eval_jet2, evaluate, parse
from .geometry import MetricField, conformal_rescale, connection_at, curvature_at
from .tractor import Tractor, gauge_change, parallel_transport, tractor_derivative, weyl_tractor
from .weyl import NULL_THRESHOLD

# tolerances: 10-100x the RK4 global error at h = 1e-3 on the builtin metrics
TOL_FD = 1e-6
TOL_EQUIVALENCE = 1e-6
TOL_INVARIANCE = 1e-6
TOL_NULL = 1e-10
TOL_TRACTOR_H = 1e-8
TOL_GREAT_CIRCLE = 1e-5
TOL_CIRCLE_FIT = 1e-6
TOL_WEYL_PARALLEL = 1e-8
TOL_GAUGE = 1e-9
TOL_ORDER = 0.2


@dataclass
class CheckReport:
    name: str
    passed: bool = field(init=False)
    max_residual: float
    tolerance: float
    details: list = field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.passed = bool(self.max_residual <= self.tolerance)

    def to_dict(self):
        return asdict(self)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: residual {self.max_residual:.3e} (tolerance {self.tolerance:.1e})"


def merge(name: str, reports, tolerance=None) -> CheckReport:
    """Fold several reports into one keeping the worst residual."""
    reports = list(reports)
    tol = reports[0].tolerance if tolerance is None else tolerance
    worst = max(r.max_residual for r in reports)
    details = [{"name": r.name, "max_residual": r.max_residual, "seed": r.seed, "details": r.details}
               for r in reports]
    return CheckReport(name, worst, tol, details)


# ------------------------------------------------------------------- oracles

def fd_tensor_oracle(M: MetricField, x, h: float = 1e-4) -> dict:
    """Central finite differences of the metric from plain evaluation.

    Returns ``g``, ``dg``, ``d2g`` and ``gamma`` in the layouts of
    :mod:`parageo.geometry`.  No jets are involved.
    """
    x = np.asarray(x, dtype=float)
    n = M.dim

    def g_at(p):
        return np.array([[evaluate(M.components[i][j], p) for j in range(n)] for i in range(n)])

    eye = np.eye(n)
    g0 = g_at(x)
    dg = np.empty((n, n, n))
    d2g = np.empty((n, n, n, n))
    plus = [g_at(x + h * eye[k]) for k in range(n)]
    minus = [g_at(x - h * eye[k]) for k in range(n)]
    for k in range(n):
        dg[k] = (plus[k] - minus[k]) / (2 * h)
        d2g[k, k] = (plus[k] - 2 * g0 + minus[k]) / h**2
        for l in range(k + 1, n):
            mixed = (g_at(x + h * eye[k] + h * eye[l]) - g_at(x + h * eye[k] - h * eye[l])
                     - g_at(x - h * eye[k] + h * eye[l]) + g_at(x - h * eye[k] - h * eye[l])) / (4 * h * h)
            d2g[k, l] = d2g[l, k] = mixed
    g_inv = np.linalg.inv(g0)
    gamma = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(g_inv[k, m] * (dg[i, j, m] + dg[j, i, m] - dg[m, i, j])
                                           for m in range(n))
    return {"g": g0, "dg": dg, "d2g": d2g, "gamma": gamma}


def fd_jet_oracle(expr: ScalarExpr, x, h: float = 1e-4):
    """Central-difference gradient and Hessian of a scalar expression."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    eye = np.eye(n)
    f0 = evaluate(expr, x)
    grad = np.empty(n)
    hess = np.empty((n, n))
    for k in range(n):
        fp, fm = evaluate(expr, x + h * eye[k]), evaluate(expr, x - h * eye[k])
        grad[k] = (fp - fm) / (2 * h)
        hess[k, k] = (fp - 2 * f0 + fm) / h**2
        for l in range(k + 1, n):
            hess[k, l] = hess[l, k] = (
                evaluate(expr, x + h * eye[k] + h * eye[l]) - evaluate(expr, x + h * eye[k] - h * eye[l])
                - evaluate(expr, x - h * eye[k] + h * eye[l]) + evaluate(expr, x - h * eye[k] - h * eye[l])
            ) / (4 * h * h)
    return f0, grad, hess


def relative_error(approx, exact, floor=1.0):
    """``max |approx - exact| / max(max |exact|, floor)``."""
    approx, exact = np.asarray(approx, dtype=float), np.asarray(exact, dtype=float)
    scale = max(float(np.max(np.abs(exact))) if exact.size else 0.0, floor)
    return float(np.max(np.abs(approx - exact))) / scale


def check_fd_tensors(M: MetricField, x, tolerance=TOL_FD, h=1e-4) -> CheckReport:
    fd = fd_tensor_oracle(M, x, h)
    cur = curvature_at(M, x)
    res = {
        "dg": relative_error(cur.metric.dg, fd["dg"]),
        "d2g": relative_error(cur.metric.d2g, fd["d2g"]),
        "gamma": relative_error(cur.gamma, fd["gamma"]),
    }
    return CheckReport(f"fd_tensors[{M.name}]", max(res.values()), tolerance, [res])


# ------------------------------------------------------------------- checks

def check_equivalence(M: MetricField, x0, v0, alpha0, t1=1.0, h=1e-3,
                      tolerance=TOL_EQUIVALENCE, seed=None) -> CheckReport:
    """Coupled system versus the third-order equation from bridged initial data."""
    x0, v0, alpha0 = (np.asarray(a, dtype=float) for a in (x0, v0, alpha0))
    g, _, _ = connection_at(M, x0)
    if abs(v0 @ g @ v0) <= NULL_THRESHOLD:
        return CheckReport(f"equivalence[{M.name}]", math.inf, tolerance,
                           [{"error": "initial velocity is null"}], seed)
    A0 = ode3_initial_acceleration(M, x0, v0, alpha0)
    coupled = integrate_curve("conformal", M, x0, v0, alpha0, 0.0, t1, h, diagnostics=False)
    third = integrate_curve("ode3", M, x0, v0, A0, 0.0, t1, h, diagnostics=False)
    dist = np.linalg.norm(coupled.x - third.x, axis=1)
    return CheckReport(f"equivalence[{M.name}]", dist.max(), tolerance,
                       [{"x0": x0.tolist(), "v0": v0.tolist(), "alpha0": alpha0.tolist(),
                         "sup_distance": float(dist.max())}], seed)


def check_conformal_invariance(M: MetricField, f: ScalarExpr | str, x0, v0, alpha0, t1=1.0,
                               h=1e-3, tolerance=TOL_INVARIANCE, seed=None) -> CheckReport:
    """Coupled solutions for ``g`` and ``exp(2f) g`` with ``alpha -> alpha - df`` agree."""
    if isinstance(f, str):
        f = parse(f, M.dim)
    x0, v0, alpha0 = (np.asarray(a, dtype=float) for a in (x0, v0, alpha0))
    M_hat = conformal_rescale(M, f)
    base = integrate_curve("conformal", M, x0, v0, alpha0, 0.0, t1, h, diagnostics=False)
    hat = integrate_curve("conformal", M_hat, x0, v0, alpha0 - eval_jet2(f, x0).grad,
                          0.0, t1, h, diagnostics=False)
    pos = float(np.max(np.linalg.norm(base.x - hat.x, axis=1)))
    gauge = 0.0
    for x, a, a_hat in zip(base.x, base.extra, hat.extra):
        gauge = max(gauge, float(np.max(np.abs(a_hat - (a - eval_jet2(f, x).grad)))))
    return CheckReport(f"conformal_invariance[{M.name}; f={f}]", max(pos, gauge), tolerance,
                       [{"position": pos, "alpha_gauge": gauge}], seed)


def check_null_preservation(M: MetricField, x0, v0, alpha0, t1=1.0, h=1e-3,
                            tolerance=TOL_NULL, seed=None) -> CheckReport:
    x0, v0, alpha0 = (np.asarray(a, dtype=float) for a in (x0, v0, alpha0))
    name = f"null_preservation[{M.name}]"
    g, _, _ = connection_at(M, x0)
    g00 = float(v0 @ g @ v0)
    if abs(g00) > NULL_THRESHOLD:
        return CheckReport(name, math.inf, tolerance,
                           [{"error": "precondition violated: initial velocity is not null",
                             "g(v0,v0)": g00}], seed)
    traj = integrate_curve("conformal", M, x0, v0, alpha0, 0.0, t1, h)
    drift = np.abs(traj.diagnostics["gvv"])
    return CheckReport(name, drift.max(), tolerance, [{"max_abs_gvv": float(drift.max())}], seed)


def check_tractor_metric(M: MetricField, curve: Trajectory, u0: Tractor,
                         tolerance=TOL_TRACTOR_H, seed=None) -> CheckReport:
    path = parallel_transport(M, curve, u0)
    drift = np.abs(path.H - path.H[0])
    return CheckReport(f"tractor_metric[{M.name}]", drift.max(), tolerance,
                       [{"H0": float(path.H[0]), "max_drift": float(drift.max())}], seed)


def _closest(p, G, curve):
    """``(distance, interval, s)`` from ``p`` to a sampled curve ``(x, v, t)``."""
    x, v, t = curve
    if v is None:
        d2, j, s = _closest_polyline(p, G, x)
        return math.sqrt(d2), j, s
    d2, j, s = _kernels.closest(np.ascontiguousarray(p, dtype=float), np.ascontiguousarray(G),
                                np.ascontiguousarray(x), np.ascontiguousarray(v),
                                np.ascontiguousarray(t, dtype=float))
    return math.sqrt(d2), int(j), float(s)


def _closest_polyline(p, G, x):
    k = int(np.argmin(((x - p) ** 2).sum(axis=1)))
    best = (math.inf, max(0, min(k, x.shape[0] - 2)), 0.0)
    for j in range(k - 1, k + 1):
        if j < 0 or j + 1 >= x.shape[0]:
            continue
        ab = x[j + 1] - x[j]
        den = ab @ G @ ab
        s = 0.0 if den == 0 else min(1.0, max(0.0, ((p - x[j]) @ G @ ab) / den))
        r = x[j] + s * ab - p
        d2 = abs(float(r @ G @ r))
        if d2 < best[0]:
            best = (d2, j, s)
    return best


def _as_curve(c):
    if isinstance(c, Trajectory):
        return np.asarray(c.x), np.asarray(c.v), np.asarray(c.times)
    return np.asarray(c, dtype=float), None, None


def curve_distance(points, curve, metric_of) -> float:
    """Max over ``points`` of the metric distance to ``curve``.

    A :class:`Trajectory` is interpolated by cubic Hermite pieces built from its
    velocities; a bare point array is treated as a polyline.
    """
    c = _as_curve(curve)
    return max(_closest(p, metric_of(p), c)[0] for p in np.asarray(points, dtype=float))


def hausdorff(A, B, metric_of) -> float:
    """Sampled Hausdorff distance between two curves under the metric ``metric_of(x)``."""
    return max(curve_distance(_as_curve(A)[0], B, metric_of),
               curve_distance(_as_curve(B)[0], A, metric_of))


def _cut(traj: Trajectory, p, metric_of) -> Trajectory:
    """Truncate ``traj`` at its closest point to ``p``."""
    x, v, t = _as_curve(traj)
    _, j, s = _closest(p, metric_of(p), (x, v, t))
    dt = t[j + 1] - t[j]
    q, d1, _ = _kernels._hermite_numpy(x[j], v[j], x[j + 1], v[j + 1], dt, s)
    xs = np.vstack([x[:j + 1], q])
    vs = np.vstack([v[:j + 1], d1 / dt])
    ts = np.append(t[:j + 1], t[j] + s * dt)
    if s == 0.0:
        xs, vs, ts = xs[:-1], vs[:-1], ts[:-1]
    return Trajectory(ts, np.hstack([xs, vs]), traj.kind, traj.dim)


def check_great_circles(M: MetricField, x0, v0, u0, t1=1.0, h=1e-3,
                        tolerance=TOL_GREAT_CIRCLE, seed=None) -> CheckReport:
    """Projective parabolic geodesic versus the metric geodesic through the same ray.

    The geodesic runs at unit speed a little past the arclength of the
    projective curve and is cut at the point closest to its end, so neither
    the length estimate nor the sampling enters the distance.
    """
    x0, v0, u0 = (np.asarray(a, dtype=float) for a in (x0, v0, u0))

    def metric_of(p):
        return connection_at(M, p)[0]

    proj = integrate_curve("projective", M, x0, v0, u0, 0.0, t1, h, diagnostics=False)
    speeds = np.sqrt(np.abs([v @ metric_of(x) @ v for x, v in zip(proj.x, proj.v)]))
    length = float(np.sum(0.5 * (speeds[1:] + speeds[:-1]) * np.diff(proj.times)))
    unit = v0 / math.sqrt(abs(v0 @ metric_of(x0) @ v0))
    geo_h = length / (len(proj) - 1)
    geo = integrate_curve("geodesic", M, x0, unit, None, 0.0, 1.05 * length, geo_h, diagnostics=False)
    geo = _cut(geo, proj.x[-1], metric_of)
    dist = hausdorff(proj, geo, metric_of)
    return CheckReport(f"great_circles[{M.name}]", dist, tolerance,
                       [{"arclength": length, "hausdorff": dist}], seed)


def circle_fit_residual(points) -> tuple[float, float]:
    """(plane residual, circle residual) of a least-squares plane + circle fit in R^3."""
    P = np.asarray(points, dtype=float)
    c = P.mean(axis=0)
    _, _, vt = np.linalg.svd(P - c)
    normal = vt[2]
    plane = float(np.max(np.abs((P - c) @ normal)))
    e1, e2 = vt[0], vt[1]
    uv = np.column_stack([(P - c) @ e1, (P - c) @ e2])
    # algebraic fit u^2 + v^2 = 2 a u + 2 b v + k
    lhs = np.column_stack([2 * uv[:, 0], 2 * uv[:, 1], np.ones(len(uv))])
    sol, *_ = np.linalg.lstsq(lhs, (uv**2).sum(axis=1), rcond=None)
    centre = sol[:2]
    radius = math.sqrt(sol[2] + centre @ centre)
    circle = float(np.max(np.abs(np.linalg.norm(uv - centre, axis=1) - radius)))
    return plane, circle


def check_flat_circles(x0, v0, A0, t1=1.0, h=1e-3, tolerance=TOL_CIRCLE_FIT, seed=None) -> CheckReport:
    """Third-order solutions in Euclidean R^3 are planar circles."""
    traj = integrate_curve("ode3", zoo.euclidean(3), x0, v0, A0, 0.0, t1, h, diagnostics=False)
    plane, circle = circle_fit_residual(traj.x)
    return CheckReport("flat_circles", max(plane, circle), tolerance,
                       [{"plane": plane, "circle": circle}], seed)


def check_weyl_structure_parallel(M: MetricField, x0, v0, alpha0, t1=1.0, h=1e-3,
                                  tolerance=TOL_WEYL_PARALLEL, seed=None) -> CheckReport:
    """Along a coupled solution the tractor ``w = (|alpha|^2/2, -alpha, 1)`` obeys ``D_v w = alpha(v) w``.

    Derivatives of ``w`` are taken from the right-hand side, not by differencing.
    """
    system = make_system("conformal", M)
    traj = integrate(system, system.pack(x0, v0, alpha0), 0.0, t1, h, diagnostics=False)
    n = M.dim
    worst = 0.0
    for t, y in zip(traj.times, traj.states):
        x, v, alpha = y[:n], y[n:2 * n], y[2 * n:]
        d = system.rhs(t, y)
        dalpha = d[2 * n:]
        m = curvature_at(M, x).metric
        dginv = -np.einsum("ia,kab,bj->kij", m.g_inv, m.dg, m.g_inv)
        dnorm = np.einsum("kij,k,i,j->", dginv, v, alpha, alpha) + 2.0 * alpha @ m.g_inv @ dalpha
        w = weyl_tractor(M, x, alpha)
        dw = Tractor(0.5 * dnorm, -dalpha, 0.0)
        D = tractor_derivative(M, x, v, w, dw).as_array()
        worst = max(worst, float(np.max(np.abs(D - (alpha @ v) * w.as_array()))))
    return CheckReport(f"weyl_structure_parallel[{M.name}]", worst, tolerance, [], seed)


def check_tractor_gauge(M: MetricField, f: ScalarExpr | str, curve: Trajectory, u0: Tractor,
                        tolerance=TOL_GAUGE, seed=None) -> CheckReport:
    """Transport commutes with the tractor gauge change and preserves ``H`` across gauges."""
    if isinstance(f, str):
        f = parse(f, M.dim)
    M_hat = conformal_rescale(M, f)
    base = parallel_transport(M, curve, u0)
    hat = parallel_transport(M_hat, curve, gauge_change(M, f, curve.x[0], u0))
    worst = 0.0
    for i in range(len(base)):
        moved = gauge_change(M, f, curve.x[i], base.tractor(i)).as_array()
        worst = max(worst, float(np.max(np.abs(moved - hat.tractor(i).as_array()))),
                    abs(base.H[i] - hat.H[i]))
    return CheckReport(f"tractor_gauge[{M.name}; f={f}]", worst, tolerance, [], seed)


def observed_order(f, y0, t1, exact, counts=(16, 32, 64)) -> list:
    """Convergence orders ``log2(e_h / e_{h/2})`` of RK4 with ``counts`` uniform steps."""
    errors = []
    for count in counts:
        h = t1 / count
        y = np.array(y0, dtype=float)
        for i in range(count):
            y = rk4_step(f, i * h, y, h)
        errors.append(float(np.max(np.abs(y - exact))))
    return [math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]


def check_integrator_order(tolerance=TOL_ORDER) -> CheckReport:
    cases = {
        "exponential": (lambda t, y: y, [1.0], 1.0, np.array([math.e])),
        "rotation": (lambda t, y: np.array([-y[1], y[0]]), [1.0, 0.0], 2 * math.pi, np.array([1.0, 0.0])),
        "forced": (lambda t, y: np.array([math.cos(t) - y[0]]), [0.0], 2.0,
                   np.array([0.5 * (math.sin(2.0) + math.cos(2.0) - math.exp(-2.0))])),
    }
    details = []
    worst = 0.0
    for name, (f, y0, t1, exact) in cases.items():
        orders = observed_order(f, y0, t1, exact)
        details.append({"case": name, "orders": orders})
        worst = max(worst, max(abs(o - 4.0) for o in orders))
    return CheckReport("integrator_order", worst, tolerance, details)


# -------------------------------------------------------------- random data

def random_point(M: MetricField, rng):
    x = rng.uniform(-0.5, 0.5, M.dim)
    if M.name.startswith("hyperbolic"):
        x[-1] = rng.uniform(1.0, 2.0)
    return x


def random_conformal_data(M: MetricField, rng):
    x0 = random_point(M, rng)
    v0 = rng.normal(size=M.dim)
    v0 *= rng.uniform(0.5, 1.0) / np.linalg.norm(v0)
    alpha0 = 0.3 * rng.normal(size=M.dim)
    return x0, v0, alpha0


def null_vector(M: MetricField, x0, rng):
    """A random null vector for a diagonal Lorentzian metric whose first axis is timelike."""
    g, _, _ = connection_at(M, x0)
    spatial = rng.normal(size=M.dim - 1)
    spatial /= np.linalg.norm(spatial)
    v = np.concatenate([[0.0], spatial])
    norm = v @ g @ v
    v[0] = math.sqrt(norm / -g[0, 0])
    # one Newton step to clean rounding
    v[0] += -(v @ g @ v) / (2 * g[0, 0] * v[0])
    return v


# --------------------------------------------------------------------- suite

def _equivalence(metric, seeds, h):
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(1000 + s)
        reps.append(check_equivalence(metric, *random_conformal_data(metric, rng), h=h, seed=1000 + s))
    return merge(f"equivalence[{metric.name}]", reps)


def _invariance(f_text, seeds, h):
    E = zoo.euclidean(3)
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(2000 + s)
        reps.append(check_conformal_invariance(E, f_text, *random_conformal_data(E, rng), h=h, seed=2000 + s))
    return merge(f"conformal_invariance[f={f_text}]", reps)


def _null(metric, seeds, h):
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(3000 + s)
        x0 = random_point(metric, rng)
        v0 = null_vector(metric, x0, rng)
        # |alpha0| ~ 0.1 keeps the null speed from blowing up on [0, 1]
        reps.append(check_null_preservation(metric, x0, v0, 0.1 * rng.normal(size=metric.dim),
                                            h=h, seed=3000 + s))
    return merge(f"null_preservation[{metric.name}]", reps)


def _tractor(metric, seeds, h):
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(4000 + s)
        x0, v0, alpha0 = random_conformal_data(metric, rng)
        curve = integrate_curve("conformal", metric, x0, v0, alpha0, 0.0, 1.0, h, diagnostics=False)
        u0 = Tractor(rng.normal(), rng.normal(size=metric.dim), rng.normal())
        reps.append(check_tractor_metric(metric, curve, u0, seed=4000 + s))
    return merge(f"tractor_metric[{metric.name}]", reps)


def _great_circles(metric, seeds, h):
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(5000 + s)
        x0, v0, _ = random_conformal_data(metric, rng)
        u0 = 0.3 * rng.normal(size=metric.dim)
        reps.append(check_great_circles(metric, x0, v0, u0, h=h, seed=5000 + s))
    return merge(f"great_circles[{metric.name}]", reps)


def _flat_circles(seeds, h):
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(6000 + s)
        v0 = rng.normal(size=3)
        A0 = rng.normal(size=3)
        A0 -= (A0 @ v0) / (v0 @ v0) * v0
        reps.append(check_flat_circles(rng.uniform(-1, 1, 3), v0, A0, h=h, seed=6000 + s))
    return merge("flat_circles", reps)


def _weyl_parallel(metric, seeds, h):
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(7000 + s)
        reps.append(check_weyl_structure_parallel(metric, *random_conformal_data(metric, rng), h=h,
                                                  seed=7000 + s))
    return merge(f"weyl_structure_parallel[{metric.name}]", reps)


def _tractor_gauge(f_text, seeds, h):
    E = zoo.euclidean(3)
    reps = []
    for s in range(seeds):
        rng = np.random.default_rng(8000 + s)
        x0, v0, alpha0 = random_conformal_data(E, rng)
        curve = integrate_curve("conformal", E, x0, v0, alpha0, 0.0, 1.0, h, diagnostics=False)
        u0 = Tractor(rng.normal(), rng.normal(size=3), rng.normal())
        reps.append(check_tractor_gauge(E, f_text, curve, u0, seed=8000 + s))
    return merge(f"tractor_gauge[f={f_text}]", reps)


SPHERE_GAUGE = "log(2/(1 + x1^2 + x2^2 + x3^2))"

SUITE = {
    "integrator_order": lambda seeds, h: check_integrator_order(),
    "fd_tensors": lambda seeds, h: merge("fd_tensors", [
        check_fd_tensors(m, random_point(m, np.random.default_rng(9000 + s)), )
        for m in (zoo.sphere_stereographic(3), zoo.hyperbolic_halfspace(3), zoo.warped_lorentzian())
        for s in range(seeds)]),
    "equivalence_flat": lambda seeds, h: _equivalence(zoo.euclidean(3), seeds, h),
    "equivalence_sphere": lambda seeds, h: _equivalence(zoo.sphere_stereographic(3), seeds, h),
    "equivalence_hyperbolic": lambda seeds, h: _equivalence(zoo.hyperbolic_halfspace(3), seeds, h),
    "invariance_identity": lambda seeds, h: _invariance("0", seeds, h),
    "invariance_linear": lambda seeds, h: _invariance("0.1*x1", seeds, h),
    "invariance_sphere": lambda seeds, h: _invariance(SPHERE_GAUGE, seeds, h),
    "null_minkowski": lambda seeds, h: _null(zoo.minkowski(2, 1), seeds, h),
    "null_warped": lambda seeds, h: _null(zoo.warped_lorentzian(), seeds, h),
    "tractor_euclidean": lambda seeds, h: _tractor(zoo.euclidean(3), seeds, h),
    "tractor_minkowski": lambda seeds, h: _tractor(zoo.minkowski(2, 1), seeds, h),
    "tractor_sphere": lambda seeds, h: _tractor(zoo.sphere_stereographic(3), seeds, h),
    "tractor_hyperbolic": lambda seeds, h: _tractor(zoo.hyperbolic_halfspace(3), seeds, h),
    "tractor_conformal": lambda seeds, h: _tractor(zoo.conformal("0.1*x1*x2", 3), seeds, h),
    "tractor_warped": lambda seeds, h: _tractor(zoo.warped_lorentzian(), seeds, h),
    "great_circles_flat": lambda seeds, h: _great_circles(zoo.euclidean(3), seeds, h),
    "great_circles_sphere": lambda seeds, h: _great_circles(zoo.sphere_stereographic(3), seeds, h),
    "flat_circles": lambda seeds, h: _flat_circles(seeds, h),
    "weyl_structure_parallel": lambda seeds, h: _weyl_parallel(zoo.sphere_stereographic(3), seeds, h),
    "tractor_gauge": lambda seeds, h: _tractor_gauge(SPHERE_GAUGE, seeds, h),
}


def run_suite(names=None, seeds: int = 2, h: float = 1e-3) -> list:
    names = list(SUITE) if not names else list(names)
    unknown = [n for n in names if n not in SUITE]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}; available: {sorted(SUITE)}")
    return [SUITE[n](seeds, h) for n in names]
