"""Vietoris-Rips persistence in dimensions 0 and 1, Betti curves and
Wasserstein distances between diagrams.

Persistence pairs come from a cohomology reduction over Z/2 with clearing:
H0 deaths are the Kruskal tree edges, H1 pairs come from reducing the
coboundary columns of the remaining edges.  Simplices are ordered by
(filtration value, dimension, lexicographic vertex tuple).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from . import _backend
from .errors import InvalidOverlap, SizeLimit

WASSERSTEIN_SIZE_CAP = 2000


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of ``(birth, death)`` pairs in one homology dimension."""

    dim: int
    pairs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pairs, dtype=np.float64).reshape(-1, 2)
        if np.any(arr[:, 0] >= arr[:, 1]):
            raise ValueError("every bar needs birth < death")
        object.__setattr__(self, "pairs", arr)

    @classmethod
    def from_pairs(cls, pairs, dim: int = 1) -> "PersistenceDiagram":
        return cls(dim, np.asarray(list(pairs), dtype=np.float64).reshape(-1, 2))

    def __len__(self):
        return len(self.pairs)

    @property
    def births(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self.pairs[:, 1]

    def finite(self) -> "PersistenceDiagram":
        return PersistenceDiagram(self.dim, self.pairs[np.isfinite(self.pairs[:, 1])])

    def sorted(self) -> np.ndarray:
        """Pairs in lexicographic order, for multiset comparisons."""
        p = self.pairs
        return p[np.lexsort((p[:, 1], p[:, 0]))]


@dataclass(frozen=True)
class BettiCurve:
    """Right-continuous step function; ``values[i]`` holds on
    ``[breakpoints[i], breakpoints[i+1])`` and the last value to +inf.
    Zero below the first breakpoint."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.breakpoints, s, side="right") - 1
        vals = np.concatenate([[0], self.values])
        return vals[idx + 1]


# ------------------------------------------------------------------ geometry

def pairwise_distances(cloud) -> np.ndarray:
    x = np.asarray(cloud, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] == 0:
        raise ValueError("empty point cloud")
    dm = cdist(x, x)
    np.fill_diagonal(dm, 0.0)
    return dm


def enclosing_radius(dm) -> float:
    dm = np.asarray(dm, dtype=np.float64)
    return float(dm.max(axis=1).min())


def _sorted_edges(dm, threshold):
    n = dm.shape[0]
    i, j = np.triu_indices(n, k=1)
    d = dm[i, j]
    keep = d <= threshold
    i, j, d = i[keep], j[keep], d[keep]
    order = np.lexsort((j, i, d))
    return (np.ascontiguousarray(i[order], dtype=np.int64),
            np.ascontiguousarray(j[order], dtype=np.int64),
            np.ascontiguousarray(d[order]))


def rips_persistence(dm, maxdim: int = 1, threshold: float | None = None,
                     backend: str | None = None):
    """H0 and H1 persistence diagrams of the Rips filtration on ``dm``.

    ``threshold`` defaults to the enclosing radius, past which the complex
    is a cone.  Returns ``(D0, D1)``; bars of zero length are dropped.
    """
    if maxdim != 1:
        raise ValueError("only maxdim=1 is supported")
    dm = np.ascontiguousarray(dm, dtype=np.float64)
    if threshold is None:
        threshold = enclosing_radius(dm)
    ei, ej, ed = _sorted_edges(dm, threshold)
    impl = _pick(backend)
    h0, h1, merges = impl.rips_pairs(dm, ei, ej, ed, float(threshold))
    # components that never merge below the threshold stay essential
    essential = dm.shape[0] - merges
    d0 = np.vstack([np.column_stack([np.zeros(len(h0)), np.asarray(h0)]),
                    np.tile([0.0, np.inf], (essential, 1))])
    d1 = np.asarray(h1).reshape(-1, 2)
    return PersistenceDiagram(0, d0), PersistenceDiagram(1, d1)


def _pick(backend):
    if backend is None:
        return _backend.kernels if _backend.compiled else _backend.fallback
    if backend == "python":
        return _backend.fallback
    if backend == "cython":
        if not _backend.compiled:
            raise RuntimeError("compiled kernels are not available")
        return _backend.kernels
    raise ValueError(f"unknown backend {backend!r}")


def cloud_persistence(cloud, threshold=None, backend=None):
    return rips_persistence(pairwise_distances(cloud), 1, threshold, backend)


# ------------------------------------------------------------------ curves

def betti_curve(diagram: PersistenceDiagram) -> BettiCurve:
    p = diagram.pairs
    if len(p) == 0:
        return BettiCurve(np.array([0.0]), np.array([0]))
    events = np.concatenate([p[:, 0], p[np.isfinite(p[:, 1]), 1]])
    bps = np.unique(events)
    values = (np.searchsorted(np.sort(p[:, 0]), bps, side="right")
              - np.searchsorted(np.sort(p[:, 1]), bps, side="right"))
    return BettiCurve(bps, values.astype(np.int64))


def betti_numbers(diagram: PersistenceDiagram, eps) -> np.ndarray:
    """``#{(b, d): b <= eps < d}`` evaluated at every ``eps``."""
    eps = np.asarray(eps, dtype=float)
    b = np.sort(diagram.births)
    d = np.sort(diagram.deaths)
    born = np.searchsorted(b, eps, side="right")
    dead = np.searchsorted(d, eps, side="right")
    return (born - dead).astype(np.int64)


def betti_curve_integral(diagram: PersistenceDiagram, over=None) -> float:
    """Exact integral of the Betti curve over ``over`` (default ``(0, d_max)``).

    Infinite bars are not allowed here; drop them with ``diagram.finite()``.
    """
    p = diagram.pairs
    if len(p) == 0:
        return 0.0
    if not np.all(np.isfinite(p)):
        raise ValueError("integral needs finite bars only")
    lo, hi = (0.0, float(p[:, 1].max())) if over is None else over
    # integrate the piecewise-constant curve between its breakpoints
    curve = betti_curve(diagram)
    knots = np.clip(np.concatenate([curve.breakpoints, [hi]]), lo, hi)
    widths = np.diff(knots)
    return float(math.fsum((widths * curve.values).tolist()))


def wasserstein_to_empty(diagram: PersistenceDiagram, q: float = 1) -> float:
    p = diagram.pairs
    if not np.all(np.isfinite(p)):
        raise ValueError("distance to the empty diagram needs finite bars")
    if q == 1:
        # one correctly rounded sum over all endpoints: depends only on the
        # multisets of births and deaths
        return 0.5 * math.fsum(p[:, 1].tolist() + (-p[:, 0]).tolist())
    half = (p[:, 1] - p[:, 0]) / 2.0
    return float(np.sum(half ** q) ** (1.0 / q))


def wasserstein_distance(d1: PersistenceDiagram, d2: PersistenceDiagram, q: float = 1,
                         size_cap: int = WASSERSTEIN_SIZE_CAP) -> float:
    """Exact q-Wasserstein distance with the L-infinity ground metric.

    Solves the assignment problem on the diagonal-augmented cost matrix.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    a, b = d1.pairs, d2.pairs
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("Wasserstein distance needs finite bars")
    m, n = len(a), len(b)
    if m + n > size_cap:
        raise SizeLimit(f"{m + n} points exceed the exact solver cap of {size_cap}")
    if m + n == 0:
        return 0.0
    cost = np.zeros((m + n, n + m))
    cost[:m, :n] = cdist(a, b, metric="chebyshev") ** q
    diag_a = ((a[:, 1] - a[:, 0]) / 2.0) ** q
    diag_b = ((b[:, 1] - b[:, 0]) / 2.0) ** q
    big = np.inf
    cost[:m, n:] = big
    cost[:m, n:][np.arange(m), np.arange(m)] = diag_a
    cost[m:, :n] = big
    cost[m:, :n][np.arange(n), np.arange(n)] = diag_b
    # diagonal-to-diagonal block stays zero
    rows, cols = linear_sum_assignment(cost)
    total = math.fsum(cost[rows, cols].tolist())
    return float(total ** (1.0 / q))


def swap_bar_endpoints(diagram: PersistenceDiagram, first: int, second: int) -> PersistenceDiagram:
    """Trade endpoints of two overlapping bars: ``(b1,d1),(b2,d2)`` with
    ``b1 < b2 < d1 < d2`` become ``(b2,d1),(b1,d2)``."""
    p = diagram.pairs.copy()
    (b1, d1), (b2, d2) = p[first], p[second]
    if not (b1 < b2 < d1 < d2):
        raise InvalidOverlap(f"bars {tuple(p[first])} and {tuple(p[second])} "
                             "do not satisfy b1 < b2 < d1 < d2")
    p[first] = (b2, d1)
    p[second] = (b1, d2)
    return PersistenceDiagram(diagram.dim, p)


# ------------------------------------------------------------------ CSV

def diagrams_to_csv(diagrams) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dim", "birth", "death"])
    for dgm in diagrams:
        for b, d in dgm.sorted():
            w.writerow([dgm.dim, repr(float(b)), "inf" if math.isinf(d) else repr(float(d))])
    return buf.getvalue()


def diagrams_from_csv(text: str) -> dict[int, PersistenceDiagram]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["dim", "birth", "death"]:
        raise ValueError("diagram CSV must start with header dim,birth,death")
    by_dim: dict[int, list] = {0: [], 1: []}
    for r in rows[1:]:
        if not r:
            continue
        by_dim.setdefault(int(r[0]), []).append((float(r[1]), float(r[2])))
    return {k: PersistenceDiagram.from_pairs(v, k) for k, v in by_dim.items()}
