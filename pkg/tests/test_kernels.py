import os
import subprocess
import sys

import numpy as np
import pytest

from helpers import seeded_expressions
from parageo import _kernels, zoo
from parageo._accel import USE_NUMBA
from parageo.expr import compile_tape, parse
from parageo.geometry import DEGENERACY_THRESHOLD

needs_numba = pytest.mark.skipif(not USE_NUMBA, reason="numba backend disabled")


@needs_numba
@pytest.mark.parametrize("seed", range(5))
def test_tape_backends_agree(seed):
    exprs = [parse(t, 3) for t in seeded_expressions(8, 3, seed=seed)]
    tape = compile_tape(exprs)
    x = np.random.default_rng(seed).uniform(-1, 1, 3)
    fast = _kernels._eval_tape_numba(tape.ops, tape.a, tape.b, tape.c, x)
    slow = _kernels._eval_tape_numpy(tape.ops, tape.a, tape.b, tape.c, x)
    assert fast[3:] == slow[3:] == (0, -1)
    for f, s in zip(fast[:3], slow[:3]):
        np.testing.assert_allclose(f, s, rtol=1e-13, atol=1e-13)


@needs_numba
@pytest.mark.parametrize("metric", [zoo.sphere_stereographic(3), zoo.hyperbolic_halfspace(4),
                                    zoo.warped_lorentzian(), zoo.conformal("sin(x1)*x2", 3)],
                         ids=lambda m: m.name)
def test_fused_curvature_backends_agree(metric):
    t = metric._tape
    x = np.array([0.2, -0.1, 0.3, 1.2][:metric.dim])
    args = (t.ops, t.a, t.b, t.c, t.outputs, x, DEGENERACY_THRESHOLD, True)
    fast = _kernels._metric_curvature_numba(*args)
    slow = _kernels._metric_curvature_numpy(*args)
    assert tuple(fast[:5]) == tuple(slow[:5])
    for f, s in zip(fast[5:], slow[5:]):
        np.testing.assert_allclose(f, s, rtol=1e-12, atol=1e-12)


def test_signature_count():
    g = np.diag([-1.0, 2.0, 3.0])
    assert tuple(_kernels.signature(g, 1e-10)) == (2, 1, False)
    assert _kernels.signature(np.diag([1.0, 1e-12, 1.0]), 1e-10)[2]


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, PARAGEO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import parageo; print(parageo.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_closest_point_backends_agree():
    t = np.linspace(0, 1, 40)
    x = np.column_stack([np.cos(3 * t), np.sin(3 * t), t])
    v = np.column_stack([-3 * np.sin(3 * t), 3 * np.cos(3 * t), np.ones_like(t)])
    G = np.diag([1.0, 2.0, 0.5])
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = x[rng.integers(40)] + 0.05 * rng.normal(size=3)
        fast = _kernels._closest_numba(p, G, x, v, t)
        slow = _kernels._closest_numpy(p, G, x, v, t)
        assert fast[1] == slow[1]
        assert fast[0] == pytest.approx(slow[0], rel=1e-10, abs=1e-15)
        assert fast[2] == pytest.approx(slow[2], abs=1e-10)


def test_closest_point_on_sampled_parabola():
    t = np.linspace(0, 1, 11)
    x = np.column_stack([t, t**2, np.zeros_like(t)])
    v = np.column_stack([np.ones_like(t), 2 * t, np.zeros_like(t)])
    # cubic Hermite reproduces the parabola exactly
    p = np.array([0.33, 0.33**2, 0.0])
    d2, j, s = _kernels.closest(p, np.eye(3), x, v, t)
    assert d2 <= 1e-28 and j == 3 and s == pytest.approx(0.3)
