"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made at import
time from PARAGEO_DISABLE_NUMBA.  Timings are best-of-N wall clock.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit


def measure(repeat):
    import numpy as np

    from parageo import _kernels, backend_name, zoo
    from parageo.curves import integrate_curve, make_system
    from parageo.geometry import DEGENERACY_THRESHOLD

    M = zoo.conformal("0.2*sin(x1)*x2 + 0.1*x3^2", 3)
    t = M._tape
    x = np.array([0.2, -0.1, 0.3])
    system = make_system("conformal", M)
    y = system.pack(x, [1.0, 0.3, -0.2], [0.1, 0.2, 0.0])

    cases = {
        "tape jets (9 components)": lambda: _kernels.eval_tape(t.ops, t.a, t.b, t.c, x),
        "metric + curvature": lambda: _kernels.metric_curvature(
            t.ops, t.a, t.b, t.c, t.outputs, x, DEGENERACY_THRESHOLD, True),
        "conformal rhs": lambda: system.rhs(0.0, y),
        "trajectory (200 RK4 steps)": lambda: integrate_curve(
            "conformal", M, x, [1.0, 0.3, -0.2], [0.1, 0.2, 0.0], 0.0, 1.0, 5e-3, diagnostics=False),
    }
    out = {}
    for name, fn in cases.items():
        fn()  # warm-up: JIT compilation or cache load
        timer = timeit.Timer(fn)
        number, _ = timer.autorange()
        out[name] = min(timer.repeat(repeat, number)) / number
    return backend_name(), out


def run_backend(disable, repeat):
    env = dict(os.environ)
    if disable:
        env["PARAGEO_DISABLE_NUMBA"] = "1"
    else:
        env.pop("PARAGEO_DISABLE_NUMBA", None)
    res = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        backend, times = measure(args.repeat)
        print(json.dumps({"backend": backend, "times": times}))
        return
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if fast["backend"] != "numba":
        print("numba is not importable; only the numpy backend was measured")
    print(f"{'case':30s} {fast['backend']:>12s} {slow['backend']:>12s} {'speed-up':>9s}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:30s} {t_fast * 1e6:10.1f}us {t_slow * 1e6:10.1f}us {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
