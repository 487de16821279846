"""Acceptance suite: one PASS/FAIL line per criterion, at the stated
tolerance.  The sweep criteria (5, 6, 8, 10) run full 60-value sweeps and
take several minutes on one core."""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from crocker_lab import dynamics, pipeline, stats
from crocker_lab.lyapunov import benettin_mle
from crocker_lab.persistence import (betti_curve_integral, betti_numbers, cloud_persistence,
                                     swap_bar_endpoints, wasserstein_to_empty)

from conftest import record
from helpers import (linear_spec, mst_weights, random_diagram, random_overlap_diagram,
                     rips_betti_bruteforce)


def _sweep(system, out, lo=None, hi=None):
    cfg = pipeline.SweepConfig(system=system, param_min=lo, param_max=hi, steps=60, out=str(out))
    pipeline.run_sweep(cfg, write=True)
    return Path(out)


@pytest.fixture(scope="module")
def lorenz_run(tmp_path_factory):
    return _sweep("lorenz", tmp_path_factory.mktemp("lorenz_a"), 90.0, 105.0)


@pytest.fixture(scope="module")
def rossler_run(tmp_path_factory):
    return _sweep("rossler", tmp_path_factory.mktemp("rossler"), 0.37, 0.43)


def _benettin_vs_l1(run):
    ly = pipeline.read_table(run / "lyapunov.csv")
    l1 = pipeline.read_table(run / "l1.csv")
    out = []
    for dim in (0, 1):
        x, y, _ = stats.paired(ly["benettin"], l1[f"l1_h{dim}"])
        out.append(stats.pearson(x, y))
    return out


def test_criterion_01_integral_identity():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        d = random_diagram(rng, 50)
        lhs, rhs = betti_curve_integral(d), 2 * wasserstein_to_empty(d)
        if rhs > 0:
            worst = max(worst, abs(lhs - rhs) / rhs)
        else:
            worst = max(worst, abs(lhs))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 5
    record(1, ok, f"integral = 2*W1(empty): max rel err {worst:.2e} (<= 1e-9), {dt:.2f} s (< 5 s)")
    assert ok


def test_criterion_02_swap_lemma():
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    curve_bad = w_bad = 0
    for _ in range(500):
        d, i, j = random_overlap_diagram(rng)
        s = swap_bar_endpoints(d, i, j)
        knots = np.unique(np.concatenate([d.pairs.ravel(), s.pairs.ravel()]))
        probe = np.concatenate([knots, (knots[1:] + knots[:-1]) / 2, [knots[-1] + 1]])
        curve_bad += not np.array_equal(betti_numbers(d, probe), betti_numbers(s, probe))
        w_bad += wasserstein_to_empty(d) != wasserstein_to_empty(s)
    dt = time.perf_counter() - t0
    ok = curve_bad == 0 and w_bad == 0 and dt < 5
    record(2, ok, f"endpoint swap: {curve_bad} curve / {w_bad} W1 mismatches in 500 (0 allowed), "
                  f"{dt:.2f} s (< 5 s)")
    assert ok


def test_criterion_03_homology_oracle():
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 8))
        pts = rng.normal(size=(n, int(rng.integers(2, 4))))
        d0, d1 = cloud_persistence(pts)
        top = np.max(np.abs(pts[:, None] - pts[None]).sum(-1)) + 1.0
        for e in rng.uniform(0, top, 50):
            want = rips_betti_bruteforce(pts, e)
            got = (int(betti_numbers(d0, [e])[0]), int(betti_numbers(d1, [e])[0]))
            mismatches += got != want
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 120
    record(3, ok, f"homology oracle: {mismatches} mismatches over 200 clouds x 50 eps (0 allowed), "
                  f"{dt:.1f} s (< 120 s)")
    assert ok


def test_criterion_04_h0_is_mst():
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(100):
        pts = rng.uniform(size=(50, 3))
        d0, _ = cloud_persistence(pts)
        bad += not np.array_equal(np.sort(d0.finite().deaths), mst_weights(pts))
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    record(4, ok, f"H0 deaths = MST weights: {bad} of 100 differ (0 allowed), {dt:.2f} s (< 30 s)")
    assert ok


@pytest.mark.slow
def test_criterion_05_lorenz_sweep(lorenz_run):
    r0, r1 = _benettin_vs_l1(lorenz_run)
    ok = r0 >= 0.80 and r1 >= 0.80
    record(5, ok, f"Lorenz 60 values: Pearson(Benettin, L1 H0) = {r0:.3f}, "
                  f"(Benettin, L1 H1) = {r1:.3f} (>= 0.80)")
    assert ok


@pytest.mark.slow
def test_criterion_06_rossler_sweep(rossler_run):
    r0, r1 = _benettin_vs_l1(rossler_run)
    ok = r0 >= 0.75 and r1 >= 0.75
    record(6, ok, f"Rossler 60 values: Pearson(Benettin, L1 H0) = {r0:.3f}, "
                  f"(Benettin, L1 H1) = {r1:.3f} (>= 0.75)")
    assert ok


def test_criterion_07_lyapunov_sanity():
    lor = dynamics.get_system("lorenz")
    lam_p = benettin_mle(lor, 92.1).lam
    lam_c = benettin_mle(lor, 105.0).lam
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(2, 5))
        top = rng.choice([-1, 1]) * rng.uniform(0.3, 1.5)
        rest = top - rng.uniform(0.5, 2.0, n - 1)
        Q = rng.normal(size=(n, n)) + 2 * np.eye(n)
        A = Q @ np.diag(np.concatenate([[top], rest])) @ np.linalg.inv(Q)
        expected = float(np.max(np.linalg.eigvals(A).real))
        lam = benettin_mle(linear_spec(A), 0.0).lam
        worst = max(worst, abs(lam - expected) / abs(expected))
    ok = abs(lam_p) < 0.1 and lam_c > 0.5 and worst <= 0.02
    record(7, ok, f"Lorenz lambda(92.1) = {lam_p:+.4f} (|.| < 0.1), lambda(105) = {lam_c:.3f} "
                  f"(> 0.5); linear systems max rel err {worst:.2e} (<= 2%)")
    assert ok


@pytest.mark.slow
def test_criterion_08_rosenstein_vs_benettin(rossler_run):
    ly = pipeline.read_table(rossler_run / "lyapunov.csv")
    x, y, dropped = stats.paired(ly["benettin"], ly["rosenstein"])
    r = stats.pearson(x, y)
    ok = r >= 0.9
    record(8, ok, f"Rossler 60 values, k=20: Pearson(Benettin, Rosenstein) = {r:.3f} (>= 0.9), "
                  f"n = {x.size}")
    assert ok


def test_criterion_09_statistics():
    examples = [
        (stats.pearson([1, 2, 3], [2, 4, 6]), 1.0),
        (stats.pearson([1, 2, 3], [6, 4, 2]), -1.0),
        (stats.pearson([1, 2, 3, 4], [1, 4, 9, 16]), 25 / math.sqrt(645)),
        (stats.spearman([1, 2, 3, 4], [1, 4, 9, 16]), 1.0),
        (stats.spearman([1, 2, 3, 4], [16, 9, 4, 1]), -1.0),
        (stats.spearman([1, 2, 2, 3], [1, 2, 3, 4]), 3 / math.sqrt(10)),
    ]
    worst = max(abs(a - b) for a, b in examples)
    rng = np.random.default_rng(109)
    affine = monotone = bounds = 0
    for _ in range(1000):
        n = int(rng.integers(3, 60))
        x, y = rng.normal(size=n), rng.normal(size=n)
        r, rho = stats.pearson(x, y), stats.spearman(x, y)
        a, b = rng.uniform(0.1, 10), rng.uniform(-10, 10)
        affine += abs(stats.pearson(a * x + b, y) - r) > 1e-12
        monotone += stats.spearman(np.exp(x), y ** 3) != rho
        bounds += not (abs(r) <= 1 and abs(rho) <= 1)
    ok = worst <= 1e-9 and affine == monotone == bounds == 0
    record(9, ok, f"statistics: example max err {worst:.1e} (<= 1e-9); invariance failures "
                  f"affine {affine}, monotone {monotone}, bounds {bounds} of 1000 (0 allowed)")
    assert ok


@pytest.mark.slow
def test_criterion_10_determinism(lorenz_run, tmp_path):
    again = _sweep("lorenz", tmp_path / "lorenz_b", 90.0, 105.0)
    # timing.csv holds wall-clock times and is excluded
    names = sorted(p.relative_to(lorenz_run).as_posix() for p in lorenz_run.rglob("*")
                   if p.is_file() and p.name != "timing.csv")
    differ = [n for n in names if (lorenz_run / n).read_bytes() != (again / n).read_bytes()]
    ok = not differ and len(names) > 60
    record(10, ok, f"determinism: {len(differ)} of {len(names)} output files differ between two "
                   f"Lorenz runs (0 allowed; timing.csv excluded)")
    assert ok
