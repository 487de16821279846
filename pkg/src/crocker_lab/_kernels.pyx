# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: catalog ODEs (RK4, tangent dynamics), Rips H0/H1
reduction, greedy maxmin subsampling and Rosenstein neighbour tracking."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, exp, fabs, isfinite, INFINITY, NAN
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from cython.operator cimport dereference as deref

cnp.import_array()

ctypedef long long i64
ctypedef pair[double, i64] entry   # stored negated so the max-heap pops the minimum


# ----------------------------------------------------------------- vector fields

cdef inline double _sgn(double x) noexcept nogil:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


cdef int field(int code, const double* p, double eta, const double* s, double* out) noexcept nogil:
    cdef double x, y, z
    if code == 2:
        # coupled Lorenz-Rossler: b1 b2 c2 k1 k2 k3 gamma sigma
        out[0] = -s[1] - s[2] + p[3] * (s[3] - s[0])
        out[1] = s[0] + eta * s[1] + p[4] * (s[4] - s[1])
        out[2] = p[1] + s[2] * (s[0] - p[2]) + p[5] * (s[5] - s[2])
        out[3] = p[7] * (s[4] - s[3])
        out[4] = p[6] * s[3] - s[4] - s[3] * s[5]
        out[5] = s[3] * s[4] - p[0] * s[5]
        return 0
    x = s[0]; y = s[1]; z = s[2]
    if code == 0:    # lorenz: sigma beta
        out[0] = p[0] * (y - x); out[1] = x * (eta - z) - y; out[2] = x * y - p[1] * z
    elif code == 1:  # rossler: b c
        out[0] = -y - z; out[1] = x + eta * y; out[2] = p[0] + z * (x - p[1])
    elif code == 3:  # complex butterfly
        out[0] = eta * (y - x); out[1] = 2.0 * _sgn(x); out[2] = fabs(x) - 1.0
    elif code == 4:  # hadley: b F G
        out[0] = -y * y - z * z - eta * x + eta * p[1]
        out[1] = x * y - p[0] * x * z - y + p[2]
        out[2] = p[0] * x * y + x * z - z
    elif code == 5:  # moore-spiegel: R
        out[0] = y; out[1] = z; out[2] = -z - (eta - p[0] + p[0] * x * x) * y - eta * x
    elif code == 6:  # halvorsen: b c
        out[0] = -eta * x - p[0] * y - p[1] * z - y * y
        out[1] = -eta * y - p[0] * z - p[1] * x - z * z
        out[2] = -eta * z - p[0] * x - p[1] * y - x * x
    elif code == 7:  # burke-shaw: V
        out[0] = -eta * (x + y); out[1] = -y - eta * x * z; out[2] = eta * x * z + p[0]
    elif code == 8:  # rucklidge: lambda
        out[0] = -eta * x + p[0] * y - y * z; out[1] = x; out[2] = -z + y * y
    elif code == 9:  # windmi: b
        out[0] = y; out[1] = z; out[2] = -eta * z - y + p[0] - exp(x)
    else:
        return -1
    return 0


cdef void jvp(int code, const double* p, double eta, const double* s,
              const double* v, double* out) noexcept nogil:
    """Jacobian-vector product J(s) v."""
    cdef double x, y, z
    if code == 2:
        out[0] = -p[3] * v[0] - v[1] - v[2] + p[3] * v[3]
        out[1] = v[0] + (eta - p[4]) * v[1] + p[4] * v[4]
        out[2] = s[2] * v[0] + (s[0] - p[2] - p[5]) * v[2] + p[5] * v[5]
        out[3] = p[7] * (v[4] - v[3])
        out[4] = (p[6] - s[5]) * v[3] - v[4] - s[3] * v[5]
        out[5] = s[4] * v[3] + s[3] * v[4] - p[0] * v[5]
        return
    x = s[0]; y = s[1]; z = s[2]
    if code == 0:
        out[0] = p[0] * (v[1] - v[0])
        out[1] = (eta - z) * v[0] - v[1] - x * v[2]
        out[2] = y * v[0] + x * v[1] - p[1] * v[2]
    elif code == 1:
        out[0] = -v[1] - v[2]
        out[1] = v[0] + eta * v[1]
        out[2] = z * v[0] + (x - p[1]) * v[2]
    elif code == 3:
        out[0] = eta * (v[1] - v[0])
        out[1] = 0.0
        out[2] = _sgn(x) * v[0]
    elif code == 4:
        out[0] = -eta * v[0] - 2.0 * y * v[1] - 2.0 * z * v[2]
        out[1] = (y - p[0] * z) * v[0] + (x - 1.0) * v[1] - p[0] * x * v[2]
        out[2] = (p[0] * y + z) * v[0] + p[0] * x * v[1] + (x - 1.0) * v[2]
    elif code == 5:
        out[0] = v[1]
        out[1] = v[2]
        out[2] = (-2.0 * p[0] * x * y - eta) * v[0] - (eta - p[0] + p[0] * x * x) * v[1] - v[2]
    elif code == 6:
        out[0] = -eta * v[0] + (-p[0] - 2.0 * y) * v[1] - p[1] * v[2]
        out[1] = -p[1] * v[0] - eta * v[1] + (-p[0] - 2.0 * z) * v[2]
        out[2] = (-p[0] - 2.0 * x) * v[0] - p[1] * v[1] - eta * v[2]
    elif code == 7:
        out[0] = -eta * (v[0] + v[1])
        out[1] = -eta * z * v[0] - v[1] - eta * x * v[2]
        out[2] = eta * z * v[0] + eta * x * v[2]
    elif code == 8:
        out[0] = -eta * v[0] + (p[0] - z) * v[1] - y * v[2]
        out[1] = v[0]
        out[2] = 2.0 * y * v[1] - v[2]
    elif code == 9:
        out[0] = v[1]
        out[1] = v[2]
        out[2] = -exp(x) * v[0] - v[1] - eta * v[2]


def field_eval(int code, double[::1] params, double eta, double[::1] state):
    cdef double[::1] out = np.empty(state.shape[0])
    if field(code, &params[0] if params.shape[0] else NULL, eta, &state[0], &out[0]) != 0:
        raise ValueError(f"unknown kernel id {code}")
    return np.asarray(out)


def jvp_eval(int code, double[::1] params, double eta, double[::1] state, double[::1] vec):
    cdef double[::1] out = np.empty(state.shape[0])
    jvp(code, &params[0] if params.shape[0] else NULL, eta, &state[0], &vec[0], &out[0])
    return np.asarray(out)


# ----------------------------------------------------------------- integration

def rk4_system(int code, double[::1] params, double eta, double[::1] y0,
               double dt, Py_ssize_t n_steps):
    cdef Py_ssize_t dim = y0.shape[0], i, c
    cdef cnp.ndarray[double, ndim=2] arr = np.empty((n_steps + 1, dim))
    cdef double[:, ::1] out = arr
    cdef double y[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double tmp[6]
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef const double* p = &params[0] if params.shape[0] else NULL
    cdef bint ok = True
    cdef Py_ssize_t bad = 0
    if dim > 6:
        raise ValueError("state dimension above 6")
    for c in range(dim):
        y[c] = y0[c]
        out[0, c] = y[c]
    with nogil:
        for i in range(1, n_steps + 1):
            if field(code, p, eta, y, k1) != 0:
                ok = False
                break
            for c in range(dim):
                tmp[c] = y[c] + h2 * k1[c]
            field(code, p, eta, tmp, k2)
            for c in range(dim):
                tmp[c] = y[c] + h2 * k2[c]
            field(code, p, eta, tmp, k3)
            for c in range(dim):
                tmp[c] = y[c] + dt * k3[c]
            field(code, p, eta, tmp, k4)
            for c in range(dim):
                y[c] = y[c] + h6 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
                out[i, c] = y[c]
            for c in range(dim):
                if not isfinite(y[c]):
                    bad = i
            if bad:
                break
        if bad:
            for i in range(bad + 1, n_steps + 1):
                for c in range(dim):
                    out[i, c] = NAN
    if not ok:
        raise ValueError(f"unknown kernel id {code}")
    return arr


def benettin_system(int code, double[::1] params, double eta, double[::1] y0,
                    double dt, Py_ssize_t n_steps, Py_ssize_t n_transient,
                    Py_ssize_t renorm_every):
    """Return the tangent growth rate after the transient (nan on overflow)."""
    cdef Py_ssize_t dim = y0.shape[0], i, c
    cdef double y[6]
    cdef double v[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double l1[6]
    cdef double l2[6]
    cdef double l3[6]
    cdef double l4[6]
    cdef double ys[6]
    cdef double vs[6]
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0, total = 0.0, norm
    cdef const double* p = &params[0] if params.shape[0] else NULL
    cdef bint diverged = False
    if dim > 6:
        raise ValueError("state dimension above 6")
    if field(code, p, eta, &y0[0], k1) != 0:
        raise ValueError(f"unknown kernel id {code}")
    for c in range(dim):
        y[c] = y0[c]
        v[c] = 0.0
    v[0] = 1.0
    with nogil:
        for i in range(1, n_steps + 1):
            field(code, p, eta, y, k1)
            jvp(code, p, eta, y, v, l1)
            for c in range(dim):
                ys[c] = y[c] + h2 * k1[c]
                vs[c] = v[c] + h2 * l1[c]
            field(code, p, eta, ys, k2)
            jvp(code, p, eta, ys, vs, l2)
            for c in range(dim):
                ys[c] = y[c] + h2 * k2[c]
                vs[c] = v[c] + h2 * l2[c]
            field(code, p, eta, ys, k3)
            jvp(code, p, eta, ys, vs, l3)
            for c in range(dim):
                ys[c] = y[c] + dt * k3[c]
                vs[c] = v[c] + dt * l3[c]
            field(code, p, eta, ys, k4)
            jvp(code, p, eta, ys, vs, l4)
            norm = 0.0
            for c in range(dim):
                y[c] = y[c] + h6 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
                v[c] = v[c] + h6 * (l1[c] + 2.0 * l2[c] + 2.0 * l3[c] + l4[c])
                norm += v[c] * v[c]
            norm = sqrt(norm)
            if i <= n_transient:
                if i % renorm_every == 0 or i == n_transient:
                    for c in range(dim):
                        v[c] = v[c] / norm
            elif (i - n_transient) % renorm_every == 0 or i == n_steps:
                total += log(norm)
                for c in range(dim):
                    v[c] = v[c] / norm
            if not isfinite(norm):
                diverged = True
                break
            for c in range(dim):
                if not isfinite(y[c]):
                    diverged = True
            if diverged:
                break
    if diverged:
        return float("nan")
    return total / ((n_steps - n_transient) * dt)


# ----------------------------------------------------------------- subsampling

def maxmin(double[:, ::1] x, Py_ssize_t target, Py_ssize_t seed):
    cdef Py_ssize_t n = x.shape[0], dim = x.shape[1], k, i, c, nxt
    cdef cnp.ndarray[cnp.intp_t, ndim=1] idx = np.empty(target, dtype=np.intp)
    cdef cnp.ndarray[double, ndim=1] radii = np.empty(target)
    cdef double[::1] dmin = np.empty(n)
    cdef double d, diff, best
    idx[0] = seed
    radii[0] = INFINITY
    with nogil:
        for i in range(n):
            d = 0.0
            for c in range(dim):
                diff = x[i, c] - x[seed, c]
                d = d + diff * diff
            dmin[i] = sqrt(d)
        for k in range(1, target):
            nxt = 0
            best = dmin[0]
            for i in range(1, n):
                if dmin[i] > best:
                    best = dmin[i]
                    nxt = i
            idx[k] = nxt
            radii[k] = best
            for i in range(n):
                d = 0.0
                for c in range(dim):
                    diff = x[i, c] - x[nxt, c]
                    d = d + diff * diff
                d = sqrt(d)
                if d < dmin[i]:
                    dmin[i] = d
    best = 0.0
    if n > target:
        for i in range(n):
            if dmin[i] > best:
                best = dmin[i]
    return idx, radii, best


# ----------------------------------------------------------------- persistence

cdef inline i64 _find(i64* parent, i64 a) noexcept nogil:
    cdef i64 root = a, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


cdef class _Rips:
    cdef double[:, ::1] dm
    cdef const i64[::1] ei
    cdef const i64[::1] ej
    cdef const double[::1] ed
    cdef double thr
    cdef i64 n

    cdef void push_cofaces(self, priority_queue[entry]& heap, i64 pos) noexcept nogil:
        cdef i64 i = self.ei[pos], j = self.ej[pos], k, lo, mid, hi
        cdef double d = self.ed[pos], dik, djk, diam
        cdef i64 n = self.n
        for k in range(n):
            if k == i or k == j:
                continue
            dik = self.dm[i, k]
            djk = self.dm[j, k]
            if dik > self.thr or djk > self.thr:
                continue
            diam = d
            if dik > diam:
                diam = dik
            if djk > diam:
                diam = djk
            if k < i:
                lo = k; mid = i; hi = j
            elif k < j:
                lo = i; mid = k; hi = j
            else:
                lo = i; mid = j; hi = k
            heap.push(entry(-diam, -((lo * n + mid) * n + hi)))

    cdef bint min_coface(self, i64 pos, double* out_diam, i64* out_key) noexcept nogil:
        cdef i64 i = self.ei[pos], j = self.ej[pos], k, lo, mid, hi, key
        cdef double d = self.ed[pos], dik, djk, diam
        cdef i64 n = self.n
        cdef bint found = False
        for k in range(n):
            if k == i or k == j:
                continue
            dik = self.dm[i, k]
            djk = self.dm[j, k]
            if dik > self.thr or djk > self.thr:
                continue
            diam = d
            if dik > diam:
                diam = dik
            if djk > diam:
                diam = djk
            if k < i:
                lo = k; mid = i; hi = j
            elif k < j:
                lo = i; mid = k; hi = j
            else:
                lo = i; mid = j; hi = k
            key = (lo * n + mid) * n + hi
            if not found or diam < out_diam[0] or (diam == out_diam[0] and key < out_key[0]):
                out_diam[0] = diam
                out_key[0] = key
                found = True
        return found


cdef bint _pop_pivot(priority_queue[entry]& heap, entry* out) noexcept nogil:
    cdef entry top
    while not heap.empty():
        top = heap.top()
        heap.pop()
        if not heap.empty() and heap.top() == top:
            heap.pop()
            continue
        out[0] = top
        return True
    return False


def rips_pairs(double[:, ::1] dm, const i64[::1] ei, const i64[::1] ej,
               const double[::1] ed, double threshold):
    """H0 deaths and H1 (birth, death) pairs; see the fallback for the contract."""
    cdef i64 n = dm.shape[0], m = ed.shape[0], pos, a, b, other, q
    cdef vector[i64] parent
    cdef vector[char] is_death
    cdef vector[double] h0
    cdef vector[double] h1b
    cdef vector[double] h1d
    cdef unordered_map[i64, i64] pivot_of
    cdef unordered_map[i64, vector[i64]] reduction
    cdef unordered_map[i64, vector[i64]].iterator rit
    cdef unordered_map[i64, char] parity
    cdef unordered_map[i64, char].iterator pit
    cdef vector[i64] used
    cdef vector[i64] kept
    cdef priority_queue[entry] heap
    cdef entry piv
    cdef double birth, pdiam
    cdef i64 pkey
    cdef bint alive
    cdef Py_ssize_t t
    cdef _Rips R = _Rips()
    R.dm = dm
    R.ei = ei
    R.ej = ej
    R.ed = ed
    R.thr = threshold
    R.n = n

    parent.resize(n)
    for pos in range(n):
        parent[pos] = pos
    is_death.resize(m, 0)
    for pos in range(m):
        a = _find(parent.data(), ei[pos])
        b = _find(parent.data(), ej[pos])
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
            is_death[pos] = 1
            if ed[pos] > 0.0:
                h0.push_back(ed[pos])

    for pos in range(m - 1, -1, -1):
        if is_death[pos]:
            continue
        birth = ed[pos]
        if not R.min_coface(pos, &pdiam, &pkey):
            h1b.push_back(birth)
            h1d.push_back(INFINITY)
            continue
        if pivot_of.find(pkey) == pivot_of.end():
            pivot_of[pkey] = pos
            if pdiam > birth:
                h1b.push_back(birth)
                h1d.push_back(pdiam)
            continue
        while not heap.empty():
            heap.pop()
        used.clear()
        used.push_back(pos)
        R.push_cofaces(heap, pos)
        while True:
            if not _pop_pivot(heap, &piv):
                h1b.push_back(birth)
                h1d.push_back(INFINITY)
                break
            pkey = -piv.second
            pdiam = -piv.first
            if pivot_of.find(pkey) == pivot_of.end():
                pivot_of[pkey] = pos
                parity.clear()
                for t in range(<Py_ssize_t>used.size()):
                    q = used[t]
                    pit = parity.find(q)
                    if pit == parity.end():
                        parity[q] = 1
                    else:
                        deref(pit).second = 1 - deref(pit).second
                kept.clear()
                for t in range(<Py_ssize_t>used.size()):
                    q = used[t]
                    pit = parity.find(q)
                    if deref(pit).second == 1:
                        kept.push_back(q)
                        deref(pit).second = 0
                reduction[pos] = kept
                if pdiam > birth:
                    h1b.push_back(birth)
                    h1d.push_back(pdiam)
                break
            other = pivot_of[pkey]
            heap.push(piv)
            rit = reduction.find(other)
            if rit == reduction.end():
                R.push_cofaces(heap, other)
                used.push_back(other)
            else:
                for t in range(<Py_ssize_t>deref(rit).second.size()):
                    q = deref(rit).second[t]
                    R.push_cofaces(heap, q)
                    used.push_back(q)

    h0_arr = np.array([h0[t] for t in range(<Py_ssize_t>h0.size())], dtype=np.float64)
    h1_arr = np.empty((h1b.size(), 2), dtype=np.float64)
    for t in range(<Py_ssize_t>h1b.size()):
        h1_arr[t, 0] = h1b[t]
        h1_arr[t, 1] = h1d[t]
    cdef i64 merges = 0
    for pos in range(m):
        merges += is_death[pos]
    return h0_arr, h1_arr, merges


# ----------------------------------------------------------------- rosenstein

def nearest_neighbors(double[:, ::1] x, Py_ssize_t n_ref, Py_ssize_t theiler):
    cdef Py_ssize_t dim = x.shape[1], i, j, c, best
    cdef cnp.ndarray[cnp.intp_t, ndim=1] nn = np.full(n_ref, -1, dtype=np.intp)
    cdef double d, diff, bestd
    with nogil:
        for i in range(n_ref):
            best = -1
            bestd = INFINITY
            for j in range(n_ref):
                if j - i <= theiler and i - j <= theiler:
                    continue
                d = 0.0
                for c in range(dim):
                    diff = x[i, c] - x[j, c]
                    d = d + diff * diff
                if d < bestd:
                    bestd = d
                    best = j
            nn[i] = best
    return nn


def divergence(double[:, ::1] x, cnp.intp_t[::1] nn, Py_ssize_t k_max, double floor):
    cdef Py_ssize_t n_ref = nn.shape[0], dim = x.shape[1], i, j, k, c, cnt = 0
    cdef cnp.ndarray[double, ndim=1] curve = np.zeros(k_max + 1)
    cdef double d, diff
    for i in range(n_ref):
        if nn[i] >= 0:
            cnt += 1
    if cnt == 0:
        return curve * np.nan
    for k in range(k_max + 1):
        for i in range(n_ref):
            j = nn[i]
            if j < 0:
                continue
            d = 0.0
            for c in range(dim):
                diff = x[i + k, c] - x[j + k, c]
                d = d + diff * diff
            d = sqrt(d)
            if d < floor:
                d = floor
            curve[k] += log(d)
        curve[k] /= cnt
    return curve
