"""Independent oracles and generators shared by the test modules."""
from itertools import combinations

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import cdist

from crocker_lab.dynamics import SimProtocol, SystemSpec
from crocker_lab.persistence import PersistenceDiagram


def z2_rank(rows):
    """Rank over Z/2 of a matrix given as a list of int bitmasks."""
    basis = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                rank += 1
                break
    return rank


def rips_betti_bruteforce(points, eps):
    """(b0, b1) of the Rips complex at scale ``eps`` from explicit boundary
    ranks.  Simplices enter when every edge has length <= eps."""
    pts = np.asarray(points, float)
    n = len(pts)
    d = cdist(pts, pts)
    edges = [(i, j) for i, j in combinations(range(n), 2) if d[i, j] <= eps]
    eidx = {e: k for k, e in enumerate(edges)}
    tris = [t for t in combinations(range(n), 3)
            if all(d[a, b] <= eps for a, b in combinations(t, 2))]
    d1 = [(1 << i) | (1 << j) for i, j in edges]
    d2 = [sum(1 << eidx[e] for e in combinations(t, 2)) for t in tris]
    r1, r2 = z2_rank(d1), z2_rank(d2)
    return n - r1, len(edges) - r1 - r2


def mst_weights(points):
    dm = cdist(points, points)
    return np.sort(minimum_spanning_tree(dm).data)


def random_diagram(rng, max_bars=50, hi=10.0):
    k = int(rng.integers(0, max_bars + 1))
    a = rng.uniform(0, hi, size=(k, 2))
    a.sort(axis=1)
    a = a[a[:, 0] < a[:, 1]]
    return PersistenceDiagram(1, a)


def random_overlap_diagram(rng, max_bars=50, hi=10.0):
    """A random diagram plus indices of two bars with b1 < b2 < d1 < d2."""
    b1, b2, d1, d2 = np.sort(rng.uniform(0, hi, 4))
    rest = random_diagram(rng, max_bars - 2, hi).pairs
    pairs = np.vstack([rest, [[b1, d1], [b2, d2]]])
    perm = rng.permutation(len(pairs))
    pairs = pairs[perm]
    inv = np.argsort(perm)
    return PersistenceDiagram(1, pairs), int(inv[-2]), int(inv[-1])


def linear_spec(A, t_total=100.0, fs=100.0):
    """ẋ = A x as a SystemSpec without a compiled kernel."""
    A = np.asarray(A, float)
    n = A.shape[0]
    ic = tuple(np.linspace(1.0, 0.5, n))
    return SystemSpec("linear", n, lambda s, eta, p: A @ s, lambda s, eta, p: A,
                      {}, "eta", (0.0, 1.0), 1, SimProtocol(fs, t_total, t_total, ic))


def diverging_pair_series(rate=0.5, dt=0.01, per_period=2000, k=20, radius=10.0):
    """Two laps of the same circle; the second is lifted off the plane by
    ``1e-12 * exp(rate * t)``, so every nearest-neighbour pair separates at
    exactly ``rate``."""
    n = 2 * per_period + k + 1
    idx = np.arange(n)
    phase = 2 * np.pi * idx / per_period
    z = np.where(idx >= per_period, 1e-12 * np.exp(rate * idx * dt), 0.0)
    return np.column_stack([radius * np.cos(phase), radius * np.sin(phase), z])
