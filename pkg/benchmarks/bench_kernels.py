"""Time the compiled kernels against the numpy/pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--points 500]
"""
import argparse
import time

import numpy as np

from crocker_lab import _backend, dynamics
from crocker_lab.lyapunov import benettin_mle, divergence_curve
from crocker_lab.persistence import cloud_persistence
from crocker_lab.subsample import greedy_maxmin


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=500, help="cloud size for persistence")
    args = ap.parse_args()
    if not _backend.compiled:
        raise SystemExit("compiled kernels not built; run `python3 setup.py build_ext --inplace`")

    spec = dynamics.get_system("lorenz")
    cloud = dynamics.simulate_item(spec, 100.0).cloud
    sub, _ = greedy_maxmin(cloud, args.points)
    y0 = np.array(spec.sim.initial_condition)
    fb = _backend.fallback

    cases = {
        "rk4 (lorenz, 10k steps)": (
            lambda: dynamics.integrate(spec, 100.0),
            lambda: fb.rk4_generic(spec.field_fn, spec.fixed_params, 100.0, y0,
                                   spec.sim.dt, spec.sim.n_steps)),
        "benettin (lorenz, 10k steps)": (
            lambda: benettin_mle(spec, 100.0),
            lambda: benettin_mle(spec, 100.0, backend="python")),
        "rosenstein curve (2000 pts)": (
            lambda: divergence_curve(cloud),
            lambda: divergence_curve(cloud, backend="python")),
        "maxmin (2000 -> 500)": (
            lambda: greedy_maxmin(cloud, 500, backend="cython"),
            lambda: greedy_maxmin(cloud, 500, backend="python")),
        f"rips H0+H1 ({args.points} pts)": (
            lambda: cloud_persistence(sub, backend="cython"),
            lambda: cloud_persistence(sub, backend="python")),
    }
    print(f"{'kernel':32s} {'cython_s':>10s} {'python_s':>10s} {'speedup':>8s}")
    for label, (fast, slow) in cases.items():
        tf, ts = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{label:32s} {tf:10.4f} {ts:10.4f} {ts / tf:8.1f}")


if __name__ == "__main__":
    main()
