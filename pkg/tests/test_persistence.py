import math

import numpy as np
import pytest

from crocker_lab import _backend
from crocker_lab.errors import InvalidOverlap, SizeLimit
from crocker_lab.persistence import (PersistenceDiagram, betti_curve, betti_curve_integral,
                                     betti_numbers, cloud_persistence, diagrams_from_csv,
                                     diagrams_to_csv, enclosing_radius, pairwise_distances,
                                     rips_persistence, swap_bar_endpoints, wasserstein_distance,
                                     wasserstein_to_empty)

from helpers import mst_weights, random_diagram, random_overlap_diagram, rips_betti_bruteforce

BACKENDS = ["python"] + (["cython"] if _backend.compiled else [])
SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)


def D(pairs, dim=1):
    return PersistenceDiagram.from_pairs(pairs, dim)


def test_pairwise_distances():
    assert pairwise_distances([[0, 0], [3, 4]])[0, 1] == 5.0
    assert pairwise_distances([[1.0, 2.0]]).tolist() == [[0.0]]
    dm = pairwise_distances(SQUARE)
    off = np.sort(dm[np.triu_indices(4, 1)])
    np.testing.assert_allclose(off, [1, 1, 1, 1, math.sqrt(2), math.sqrt(2)])


def test_enclosing_radius():
    assert enclosing_radius(pairwise_distances([[0], [1], [3]])) == 2.0
    assert enclosing_radius(pairwise_distances([[0.0]])) == 0.0
    assert enclosing_radius(pairwise_distances(SQUARE)) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("backend", BACKENDS)
def test_square(backend):
    d0, d1 = cloud_persistence(SQUARE, backend=backend)
    np.testing.assert_allclose(d1.pairs, [[1.0, math.sqrt(2)]])
    fin = d0.finite().deaths
    assert sorted(fin.tolist()) == [1.0, 1.0, 1.0]
    assert np.isinf(d0.deaths).sum() == 1


@pytest.mark.parametrize("backend", BACKENDS)
def test_two_points_and_one_point(backend):
    d0, d1 = cloud_persistence([[0, 0], [2, 0]], backend=backend)
    assert d0.sorted().tolist() == [[0.0, 2.0], [0.0, math.inf]]
    assert len(d1) == 0
    d0, d1 = cloud_persistence([[1.0, 1.0]], backend=backend)
    assert d0.pairs.tolist() == [[0.0, math.inf]] and len(d1) == 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_homology_oracle(backend):
    rng = np.random.default_rng(5)
    mismatches = 0
    for trial in range(60):
        n = int(rng.integers(1, 8))
        pts = rng.normal(size=(n, int(rng.integers(2, 4))))
        if trial % 3 == 0:
            pts = np.round(pts * 2)  # integer grid, many equal lengths
        d0, d1 = cloud_persistence(pts, backend=backend)
        dm = pairwise_distances(pts)
        lengths = np.unique(dm)
        eps = np.concatenate([np.linspace(0, 1.1 * lengths.max() + 1e-9, 25),
                              rng.choice(lengths, 25)])
        for e in eps:
            want = rips_betti_bruteforce(pts, e)
            got = (int(betti_numbers(d0, [e])[0]), int(betti_numbers(d1, [e])[0]))
            mismatches += got != want
    assert mismatches == 0


def test_h0_matches_mst():
    rng = np.random.default_rng(9)
    for _ in range(20):
        pts = rng.uniform(size=(50, 3))
        d0, _ = cloud_persistence(pts)
        np.testing.assert_array_equal(np.sort(d0.finite().deaths), mst_weights(pts))


@pytest.mark.skipif(not _backend.compiled, reason="compiled kernels not built")
def test_backends_identical():
    rng = np.random.default_rng(4)
    for n in (20, 150):
        pts = rng.normal(size=(n, 3))
        a = cloud_persistence(pts, backend="cython")
        b = cloud_persistence(pts, backend="python")
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.sorted(), y.sorted())


def test_permutation_invariance():
    rng = np.random.default_rng(6)
    pts = rng.normal(size=(80, 3))
    perm = rng.permutation(80)
    for x, y in zip(cloud_persistence(pts), cloud_persistence(pts[perm])):
        np.testing.assert_allclose(x.sorted(), y.sorted(), rtol=0, atol=0)


def test_circle_has_one_long_loop():
    t = np.linspace(0, 2 * np.pi, 60, endpoint=False)
    _, d1 = cloud_persistence(np.column_stack([np.cos(t), np.sin(t)]))
    life = d1.deaths - d1.births
    assert life.max() > 1.0 and np.sum(life > 0.5) == 1


def test_user_threshold_leaves_open_bars():
    d0, d1 = rips_persistence(pairwise_distances(SQUARE), threshold=1.2)
    assert d1.pairs.tolist() == [[1.0, math.inf]]
    assert np.isinf(d0.deaths).sum() == 1
    d0, _ = rips_persistence(pairwise_distances([[0], [5]]), threshold=1.0)
    assert np.isinf(d0.deaths).sum() == 2


def test_betti_curve_examples():
    c = betti_curve(D([(0, 1), (0.5, 2)]))
    assert c([0, 0.25, 0.5, 0.75, 1, 1.5, 2, 3]).tolist() == [1, 1, 2, 2, 1, 1, 0, 0]
    assert betti_curve(D([]))([0, 1, 5]).tolist() == [0, 0, 0]
    assert betti_curve(D([(0, math.inf)]))([0, 1, 1e9]).tolist() == [1, 1, 1]


def test_integral_and_w_to_empty_examples():
    d = D([(0, 1), (0.5, 2)])
    assert betti_curve_integral(d) == 2.5
    assert wasserstein_to_empty(d) == 1.25
    assert betti_curve_integral(D([])) == 0.0 and wasserstein_to_empty(D([])) == 0.0
    assert betti_curve_integral(D([(1, 4)])) == 3.0


def test_integral_identity_random():
    rng = np.random.default_rng(1)
    for _ in range(200):
        d = random_diagram(rng)
        lhs, rhs = betti_curve_integral(d), 2 * wasserstein_to_empty(d)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_wasserstein_examples():
    d = D([(0, 1), (0.5, 2), (3, 3.5)])
    assert wasserstein_distance(d, d) == 0.0
    assert wasserstein_distance(D([]), D([(0, 2)])) == 1.0
    assert wasserstein_distance(D([(0, 2)]), D([(0.5, 2)])) == 0.5
    assert wasserstein_distance(D([(0, 2)]), D([(0.5, 2)]), q=2) == pytest.approx(0.5)


def test_wasserstein_to_empty_agrees_with_general():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = random_diagram(rng, 10)
        for q in (1, 2):
            assert wasserstein_distance(d, D([]), q) == pytest.approx(
                wasserstein_to_empty(d, q), rel=1e-12, abs=1e-12)


def test_wasserstein_metric_properties():
    rng = np.random.default_rng(3)
    for _ in range(100):
        a, b, c = (random_diagram(rng, 10) for _ in range(3))
        ab, ba = wasserstein_distance(a, b), wasserstein_distance(b, a)
        assert ab == pytest.approx(ba, abs=1e-9)
        assert ab <= wasserstein_distance(a, c) + wasserstein_distance(c, b) + 1e-9


def test_wasserstein_size_cap():
    big = D(np.column_stack([np.zeros(1200), np.ones(1200)]))
    with pytest.raises(SizeLimit):
        wasserstein_distance(big, big)


def test_swap_example():
    d = D([(0, 2), (1, 3)])
    s = swap_bar_endpoints(d, 0, 1)
    assert s.pairs.tolist() == [[1, 2], [0, 3]]
    grid = np.linspace(-1, 4, 101)
    np.testing.assert_array_equal(betti_numbers(d, grid), betti_numbers(s, grid))
    assert wasserstein_to_empty(d) == wasserstein_to_empty(s) == 2.0


def test_swap_invalid():
    with pytest.raises(InvalidOverlap):
        swap_bar_endpoints(D([(0, 1), (2, 3)]), 0, 1)


def test_swap_random():
    rng = np.random.default_rng(8)
    for _ in range(100):
        d, i, j = random_overlap_diagram(rng)
        s = swap_bar_endpoints(d, i, j)
        knots = np.unique(np.concatenate([d.pairs.ravel(), s.pairs.ravel()]))
        probe = np.concatenate([knots, (knots[1:] + knots[:-1]) / 2])
        np.testing.assert_array_equal(betti_numbers(d, probe), betti_numbers(s, probe))


def test_invalid_bar():
    with pytest.raises(ValueError):
        D([(2, 1)])


def test_csv_round_trip():
    d0, d1 = cloud_persistence(np.random.default_rng(0).normal(size=(40, 3)))
    text = diagrams_to_csv((d0, d1))
    back = diagrams_from_csv(text)
    np.testing.assert_array_equal(back[0].sorted(), d0.sorted())
    np.testing.assert_array_equal(back[1].sorted(), d1.sorted())
    assert diagrams_to_csv((back[0], back[1])) == text
