"""Manifest-driven command line front end.

Usage::

    parageo integrate <manifest.json>
    parageo tensors <manifest.json>
    parageo transport <manifest.json>
    parageo check [name ...] <manifest.json>
    parageo run <manifest.json>
    parageo builtins

Exit status: 0 success, 1 a check failed, 2 bad input, 3 numerical abort.
``PARAGEO_STEP_OVERRIDE`` replaces every step size in the manifest.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import verify, zoo
from .curves import IntegrationError, SYSTEMS, integrate_curve, ode3_initial_acceleration
from .expr import DomainError, ExprError, parse
from .geometry import GeometryError, MetricField, curvature_at
from .tractor import Tractor, TransportError, parallel_transport

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
JOB_KINDS = ("integrate", "tensors", "transport", "check")
EXTRA_KEYS = {"conformal": "alpha0", "ode3": "A0", "projective": "u0", "geodesic": None}


class ManifestError(ValueError):
    def __init__(self, field_name, message):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class Manifest:
    dimension: int
    signature: tuple
    metric: MetricField
    jobs: list
    base_dir: Path = field(default_factory=Path.cwd)


# ------------------------------------------------------------------ formatting

def fmt(x) -> str:
    return format(float(x), ".17g")


def dumps17(obj, indent=0) -> str:
    """JSON text with floats printed to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps17(obj.tolist(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps17(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps17(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_table(path: Path, columns, rows, fmt_name: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt_name == "csv":
        lines = [",".join(columns)]
        lines += [",".join(fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = dumps17({"columns": list(columns), "rows": [list(map(float, r)) for r in rows]}) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


# ------------------------------------------------------------------ manifest

def _vector(job, key, n, required=True):
    if key not in job:
        if required:
            raise ManifestError(key, "missing")
        return None
    value = job[key]
    if (not isinstance(value, list) or len(value) != n
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise ManifestError(key, f"must be a list of {n} numbers")
    return np.asarray(value, dtype=float)


def _number(job, key, default=None, positive=False):
    if key not in job:
        if default is None:
            raise ManifestError(key, "missing")
        return default
    value = job[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ManifestError(key, "must be a finite number")
    if positive and value <= 0:
        raise ManifestError(key, "must be positive")
    return float(value)


def _build_metric(entry, dimension, signature):
    if not isinstance(entry, dict):
        raise ManifestError("metric", "must be an object with 'builtin' or 'components'")
    try:
        if "builtin" in entry:
            params = entry.get("params", {})
            if not isinstance(params, dict):
                raise ManifestError("metric.params", "must be an object")
            M = zoo.builtin_metric(entry["builtin"], params)
        elif "components" in entry:
            rows = entry["components"]
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ManifestError("metric.components", "must be a list of rows")
            if len(rows) != dimension:
                raise ManifestError("metric.components", f"expected {dimension} rows")
            M = MetricField.from_strings(rows, signature, entry.get("name", "custom"))
        else:
            raise ManifestError("metric", "needs 'builtin' or 'components'")
    except ExprError as exc:
        raise ManifestError("metric", str(exc)) from exc
    except GeometryError as exc:
        raise ManifestError("metric", str(exc)) from exc
    if M.dim != dimension:
        raise ManifestError("dimension", f"metric has dimension {M.dim}, manifest says {dimension}")
    if M.signature != tuple(signature):
        raise ManifestError("signature", f"metric has signature {M.signature}, manifest says {tuple(signature)}")
    return M


def _validate_curve(job, n, prefix=""):
    system = job.get("system")
    if system not in SYSTEMS:
        raise ManifestError(prefix + "system", f"must be one of {sorted(SYSTEMS)}")
    out = {"system": system, "x0": _vector(job, "x0", n), "v0": _vector(job, "v0", n)}
    key = EXTRA_KEYS[system]
    if system == "ode3" and "A0" not in job and "alpha0" in job:
        out["alpha0"] = _vector(job, "alpha0", n)
    elif key:
        out[key] = _vector(job, key, n)
    return out


def _validate_job(job, n, index):
    where = f"jobs[{index}]"
    if not isinstance(job, dict):
        raise ManifestError(where, "must be an object")
    kind = job.get("kind")
    if kind not in JOB_KINDS:
        raise ManifestError(f"{where}.kind", f"must be one of {list(JOB_KINDS)}")
    out = {"kind": kind}
    try:
        if kind in ("integrate", "transport"):
            out.update(_validate_curve(job, n))
            out["t0"] = _number(job, "t0", 0.0)
            out["t1"] = _number(job, "t1")
            out["step"] = _number(job, "step", positive=True)
            if out["t1"] == out["t0"]:
                raise ManifestError("t1", "must differ from t0")
            stride = job.get("stride", 1)
            if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
                raise ManifestError("stride", "must be a positive integer")
            out["stride"] = stride
            out["format"] = job.get("format", "csv")
            if out["format"] not in ("csv", "json"):
                raise ManifestError("format", "must be 'csv' or 'json'")
            if not isinstance(job.get("output"), str):
                raise ManifestError("output", "missing output path")
            out["output"] = job["output"]
            if kind == "transport":
                t0 = job.get("tractor0")
                if not isinstance(t0, dict):
                    raise ManifestError("tractor0", "must be an object with lambda, alpha, mu")
                out["tractor0"] = Tractor(_number(t0, "lambda"), _vector(t0, "alpha", n), _number(t0, "mu"))
                if "tolerance" in job:
                    out["tolerance"] = _number(job, "tolerance", positive=True)
        elif kind == "tensors":
            points = job.get("points")
            if not isinstance(points, list) or not points:
                raise ManifestError("points", "must be a non-empty list of points")
            out["points"] = [_vector({"p": p}, "p", n) for p in points]
            if not isinstance(job.get("output"), str):
                raise ManifestError("output", "missing output path")
            out["output"] = job["output"]
        else:
            checks = job.get("checks", [])
            if not isinstance(checks, list):
                raise ManifestError("checks", "must be a list")
            for c in checks:
                if isinstance(c, str):
                    if c not in verify.SUITE:
                        raise ManifestError("checks", f"unknown check {c!r}")
                elif not (isinstance(c, dict) and c.get("check") in CUSTOM_CHECKS):
                    raise ManifestError("checks", f"entries must be suite names or objects with "
                                                  f"'check' in {sorted(CUSTOM_CHECKS)}")
            out["checks"] = checks
            seeds = job.get("seeds", 2)
            if isinstance(seeds, bool) or not isinstance(seeds, int) or seeds < 1:
                raise ManifestError("seeds", "must be a positive integer")
            out["seeds"] = seeds
            out["step"] = _number(job, "step", 1e-3, positive=True)
            if "output" in job and not isinstance(job["output"], str):
                raise ManifestError("output", "must be a path")
            out["output"] = job.get("output")
            out["custom"] = [c for c in checks if isinstance(c, dict)]
    except ManifestError as exc:
        if exc.field.startswith("jobs["):
            raise
        raise ManifestError(f"{where}.{exc.field}", str(exc).split(": ", 1)[1]) from exc
    return out


def parse_manifest(data: dict, base_dir: Path | None = None) -> Manifest:
    if not isinstance(data, dict):
        raise ManifestError("manifest", "top level must be an object")
    for key in ("dimension", "signature", "metric"):
        if key not in data:
            raise ManifestError(key, "missing")
    n = data["dimension"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ManifestError("dimension", "must be an integer >= 2")
    sig = data["signature"]
    if (not isinstance(sig, list) or len(sig) != 2
            or not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in sig)
            or sum(sig) != n):
        raise ManifestError("signature", f"must be [p, q] with p + q = {n}")
    metric = _build_metric(data["metric"], n, tuple(sig))
    if "jobs" in data and "job" in data:
        raise ManifestError("jobs", "give either 'job' or 'jobs'")
    raw = data.get("jobs", [data["job"]] if "job" in data else [])
    if not isinstance(raw, list):
        raise ManifestError("jobs", "must be a list")
    jobs = [_validate_job(j, n, i) for i, j in enumerate(raw)]
    return Manifest(n, tuple(sig), metric, jobs, base_dir or Path.cwd())


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ManifestError("manifest", f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError("manifest", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_manifest(data, path.resolve().parent)


builtin_metric = zoo.builtin_metric


# ------------------------------------------------------------------- running

def _step(value):
    override = os.environ.get("PARAGEO_STEP_OVERRIDE")
    if override:
        try:
            step = float(override)
        except ValueError:
            raise ManifestError("PARAGEO_STEP_OVERRIDE", "must be a real number") from None
        if not step > 0 or not math.isfinite(step):
            raise ManifestError("PARAGEO_STEP_OVERRIDE", "must be positive")
        return step
    return value


def _curve(M, job):
    system = job["system"]
    extra = job.get(EXTRA_KEYS[system]) if EXTRA_KEYS[system] else None
    if system == "ode3" and extra is None:
        extra = ode3_initial_acceleration(M, job["x0"], job["v0"], job["alpha0"])
    return integrate_curve(system, M, job["x0"], job["v0"], extra, job["t0"], job["t1"],
                           _step(job["step"]), diagnostics=False)


def _columns(system_kind, n):
    cols = ["t"] + [f"x{i}" for i in range(1, n + 1)] + [f"v{i}" for i in range(1, n + 1)]
    prefix = {"conformal": "alpha", "ode3": "A", "projective": "u"}.get(system_kind)
    if prefix:
        cols += [f"{prefix}{i}" for i in range(1, n + 1)]
    return cols


def run_integrate(M, job, base):
    traj = _curve(M, job)
    rows = np.column_stack([traj.times, traj.states])[::job["stride"]]
    write_table(base / job["output"], _columns(job["system"], M.dim), rows, job["format"])


def run_transport(M, job, base):
    traj = _curve(M, job)
    path = parallel_transport(M, traj, job["tractor0"], job.get("tolerance"))
    n = M.dim
    cols = (["t"] + [f"x{i}" for i in range(1, n + 1)] + [f"v{i}" for i in range(1, n + 1)]
            + ["lambda"] + [f"alpha{i}" for i in range(1, n + 1)] + ["mu", "H"])
    rows = np.column_stack([path.times, path.x, path.v, path.lam, path.alpha, path.mu, path.H])
    write_table(base / job["output"], cols, rows[::job["stride"]], job["format"])


def run_tensors(M, job, base):
    out = []
    for x in job["points"]:
        cur = curvature_at(M, x)
        out.append({
            "x": x, "g": cur.metric.g, "Gamma": cur.gamma, "Ric": cur.ricci, "Scal": cur.scalar,
            "S": cur.schouten if M.dim >= 3 else None, "P": cur.projective_schouten,
        })
    target = base / job["output"]
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="\n") as fh:
        fh.write(dumps17({"metric": M.name, "dimension": M.dim, "signature": list(M.signature),
                          "points": out}) + "\n")


def _custom_check(M, entry, h):
    n = M.dim
    kind = entry["check"]
    t1 = _number(entry, "t1", 1.0)
    if kind == "tractor_metric":
        job = _validate_curve(entry, n)
        job.update(t0=0.0, t1=t1, step=h)
        t = entry.get("tractor0")
        if not isinstance(t, dict):
            raise ManifestError("tractor0", "must be an object with lambda, alpha, mu")
        u0 = Tractor(_number(t, "lambda"), _vector(t, "alpha", n), _number(t, "mu"))
        return verify.check_tractor_metric(M, _curve(M, job), u0)
    x0, v0 = _vector(entry, "x0", n), _vector(entry, "v0", n)
    if kind == "great_circles":
        return verify.check_great_circles(M, x0, v0, _vector(entry, "u0", n), t1, h)
    alpha0 = _vector(entry, "alpha0", n)
    if kind == "conformal_invariance":
        f = entry.get("f")
        if not isinstance(f, str):
            raise ManifestError("f", "conformal factor expression required")
        try:
            f = parse(f, n)
        except ExprError as exc:
            raise ManifestError("f", str(exc)) from exc
        return verify.check_conformal_invariance(M, f, x0, v0, alpha0, t1, h)
    return CUSTOM_CHECKS[kind](M, x0, v0, alpha0, t1, h)


CUSTOM_CHECKS = {
    "equivalence": verify.check_equivalence,
    "null_preservation": verify.check_null_preservation,
    "weyl_structure_parallel": verify.check_weyl_structure_parallel,
    "conformal_invariance": None,
    "great_circles": None,
    "tractor_metric": None,
}


def run_check(M, job, base, names=None):
    h = _step(job["step"])
    suite_names = list(names) if names else [c for c in job["checks"] if isinstance(c, str)]
    unknown = [n for n in suite_names if n not in verify.SUITE]
    if unknown:
        raise ManifestError("checks", f"unknown checks {unknown}")
    custom = [] if names else job["custom"]
    if not suite_names and not custom:
        suite_names = list(verify.SUITE)
    reports = verify.run_suite(suite_names, job["seeds"], h) if suite_names else []
    reports += [_custom_check(M, entry, h) for entry in custom]
    for r in reports:
        print(r.line())
    if job.get("output"):
        target = base / job["output"]
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", newline="\n") as fh:
            fh.write(dumps17([r.to_dict() for r in reports]) + "\n")
    return all(r.passed for r in reports)


RUNNERS = {"integrate": run_integrate, "transport": run_transport, "tensors": run_tensors}


def run(manifest: Manifest, kind: str | None = None, check_names=None) -> int:
    """Execute the manifest's jobs (only those of ``kind`` when given); return an exit code."""
    jobs = [j for j in manifest.jobs if kind is None or j["kind"] == kind]
    if kind == "check" and not jobs:
        jobs = [_validate_job({"kind": "check"}, manifest.dimension, 0)]
    if not jobs:
        raise ManifestError("jobs", f"manifest has no {kind or ''} jobs".replace("  ", " "))
    ok = True
    for job in jobs:
        if job["kind"] == "check":
            ok = run_check(manifest.metric, job, manifest.base_dir, check_names) and ok
        else:
            RUNNERS[job["kind"]](manifest.metric, job, manifest.base_dir)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ----------------------------------------------------------------------- main

def _parser():
    p = argparse.ArgumentParser(prog="parageo", description="Integrate conformal and projective "
                                "parabolic geodesics from coordinate metrics.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("integrate", "tensors", "transport", "run"):
        sp = sub.add_parser(name)
        sp.add_argument("manifest")
    sp = sub.add_parser("check", help="run named checks (default: the full suite)")
    sp.add_argument("args", nargs="+", metavar="[name ...] manifest")
    sub.add_parser("builtins", help="list builtin metrics")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "builtins":
        for name, (_, defaults) in zoo.BUILTINS.items():
            params = ", ".join(f"{k}={v!r}" for k, v in defaults.items())
            print(f"{name}({params})")
        return EXIT_OK
    if args.command == "check":
        *names, manifest_path = args.args
    else:
        names, manifest_path = None, args.manifest
    try:
        manifest = load_manifest(manifest_path)
        kind = None if args.command == "run" else args.command
        return run(manifest, kind, names or None)
    except (ManifestError, KeyError) as exc:
        print(f"parageo: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrationError, TransportError, DomainError, GeometryError, ArithmeticError) as exc:
        print(f"parageo: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
