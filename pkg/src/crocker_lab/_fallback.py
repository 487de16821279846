"""Pure Python / numpy versions of the hot kernels.

Signatures mirror the compiled ``_kernels`` module except for the ODE
routines, which take Python callables instead of a kernel id.
"""
from __future__ import annotations

import heapq

import numpy as np


# ---------------------------------------------------------------- integration

def rk4_generic(f, params, eta, y0, dt, n_steps):
    out = np.empty((n_steps + 1, len(y0)))
    y = np.array(y0, dtype=np.float64)
    out[0] = y
    h2 = 0.5 * dt
    with np.errstate(all="ignore"):
        for i in range(1, n_steps + 1):
            k1 = f(y, eta, params)
            k2 = f(y + h2 * k1, eta, params)
            k3 = f(y + h2 * k2, eta, params)
            k4 = f(y + dt * k3, eta, params)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[i] = y
            if not np.isfinite(y).all():
                out[i + 1:] = np.nan
                break
    return out


def benettin_generic(f, jac, params, eta, y0, dt, n_steps, n_transient, renorm_every):
    """Tangent-vector growth rate; returns (lambda, final_state)."""
    y = np.array(y0, dtype=np.float64)
    v = np.zeros_like(y)
    v[0] = 1.0
    h2 = 0.5 * dt
    total = 0.0
    with np.errstate(all="ignore"):
        for i in range(1, n_steps + 1):
            k1 = f(y, eta, params)
            l1 = jac(y, eta, params) @ v
            ya, va = y + h2 * k1, v + h2 * l1
            k2 = f(ya, eta, params)
            l2 = jac(ya, eta, params) @ va
            ya, va = y + h2 * k2, v + h2 * l2
            k3 = f(ya, eta, params)
            l3 = jac(ya, eta, params) @ va
            ya, va = y + dt * k3, v + dt * l3
            k4 = f(ya, eta, params)
            l4 = jac(ya, eta, params) @ va
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            v = v + (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4)
            if i <= n_transient:
                # keep the tangent bounded while discarding its growth
                if i % renorm_every == 0 or i == n_transient:
                    v = v / np.sqrt(v @ v)
            elif (i - n_transient) % renorm_every == 0 or i == n_steps:
                norm = np.sqrt(v @ v)
                total += np.log(norm)
                v = v / norm
            if not (np.isfinite(y).all() and np.isfinite(v).all()):
                return np.nan, y
    elapsed = (n_steps - n_transient) * dt
    return total / elapsed, y


# ---------------------------------------------------------------- subsampling

def maxmin(points, target, seed):
    """Greedy farthest-point order; returns (indices, insertion radii, cover)."""
    x = np.asarray(points, dtype=np.float64)
    n = x.shape[0]
    idx = np.empty(target, dtype=np.intp)
    radii = np.empty(target)
    idx[0] = seed
    radii[0] = np.inf
    dmin = np.sqrt(((x - x[seed]) ** 2).sum(axis=1))
    for k in range(1, target):
        nxt = int(np.argmax(dmin))  # first maximum -> lowest index on ties
        idx[k] = nxt
        radii[k] = dmin[nxt]
        np.minimum(dmin, np.sqrt(((x - x[nxt]) ** 2).sum(axis=1)), out=dmin)
    cover = float(dmin.max()) if n > target else 0.0
    return idx, radii, cover


# ---------------------------------------------------------------- persistence

def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        parent[a], a = root, parent[a]
    return root


def rips_pairs(dm, ei, ej, ed, threshold):
    """H0 deaths and H1 (birth, death) pairs of a Rips filtration.

    ``ei, ej, ed`` list the edges within ``threshold`` sorted by
    (length, i, j) with ``i < j``.  H1 classes still alive at the threshold
    get death ``inf``.
    """
    n = dm.shape[0]
    m = len(ed)
    parent = list(range(n))
    is_death = np.zeros(m, dtype=bool)
    h0 = []
    for pos in range(m):
        a, b = _find(parent, int(ei[pos])), _find(parent, int(ej[pos]))
        if a != b:
            parent[max(a, b)] = min(a, b)
            is_death[pos] = True
            if ed[pos] > 0.0:
                h0.append(float(ed[pos]))

    inside = dm <= threshold
    h1 = []
    pivot_of = {}
    reduction = {}

    def cofaces(pos):
        i, j, d = int(ei[pos]), int(ej[pos]), ed[pos]
        mask = inside[i] & inside[j]
        mask[i] = mask[j] = False
        k = np.flatnonzero(mask)
        diam = np.maximum(np.maximum(dm[i, k], dm[j, k]), d)
        lo = np.minimum(k, i)
        hi = np.maximum(k, j)
        mid = i + j + k - lo - hi
        return diam, (lo * n + mid) * n + hi

    def push_all(heap, pos):
        diam, key = cofaces(pos)
        for item in zip(diam.tolist(), key.tolist()):
            heapq.heappush(heap, item)

    def pop_pivot(heap):
        while heap:
            top = heapq.heappop(heap)
            if heap and heap[0] == top:
                heapq.heappop(heap)
                continue
            return top
        return None

    for pos in range(m - 1, -1, -1):
        if is_death[pos]:
            continue
        birth = float(ed[pos])
        diam, key = cofaces(pos)
        if key.size == 0:
            h1.append((birth, np.inf))
            continue
        first = np.lexsort((key, diam))[0]
        pivot = (float(diam[first]), int(key[first]))
        if pivot[1] not in pivot_of:
            pivot_of[pivot[1]] = pos
            if pivot[0] > birth:
                h1.append((birth, pivot[0]))
            continue
        heap = list(zip(diam.tolist(), key.tolist()))
        heapq.heapify(heap)
        used = [pos]
        while True:
            pivot = pop_pivot(heap)
            if pivot is None:
                h1.append((birth, np.inf))
                break
            other = pivot_of.get(pivot[1])
            if other is None:
                pivot_of[pivot[1]] = pos
                reduction[pos] = _cancel_pairs(used)
                if pivot[0] > birth:
                    h1.append((birth, pivot[0]))
                break
            heapq.heappush(heap, pivot)
            for q in reduction.get(other, (other,)):
                push_all(heap, q)
                used.append(q)
    h1_arr = np.array(h1, dtype=np.float64).reshape(-1, 2)
    return np.array(h0, dtype=np.float64), h1_arr, int(is_death.sum())


def _cancel_pairs(items):
    odd = {}
    for q in items:
        odd[q] = not odd.get(q, False)
    return tuple(q for q, keep in odd.items() if keep)


# ---------------------------------------------------------------- rosenstein

def nearest_neighbors(x, n_ref, theiler):
    """Index of each point's nearest neighbour among the first ``n_ref``
    points, excluding temporal neighbours ``|i - j| <= theiler``; -1 if none."""
    x = np.asarray(x, dtype=np.float64)
    pts = x[:n_ref]
    nn = np.full(n_ref, -1, dtype=np.intp)
    t = np.arange(n_ref)
    for start in range(0, n_ref, 256):
        stop = min(start + 256, n_ref)
        d2 = ((pts[start:stop, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        band = np.abs(t[start:stop, None] - t[None, :]) <= theiler
        d2[band] = np.inf
        best = np.argmin(d2, axis=1)
        ok = np.isfinite(d2[np.arange(stop - start), best])
        nn[start:stop] = np.where(ok, best, -1)
    return nn


def divergence(x, nn, k_max, floor):
    x = np.asarray(x, dtype=np.float64)
    ref = np.flatnonzero(nn >= 0)
    nbr = nn[ref]
    curve = np.empty(k_max + 1)
    for k in range(k_max + 1):
        d = np.sqrt(((x[ref + k] - x[nbr + k]) ** 2).sum(axis=1))
        curve[k] = np.log(np.maximum(d, floor)).mean()
    return curve
