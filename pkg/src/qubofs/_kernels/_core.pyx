# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled solver inner loops.

Must stay in semantic lockstep with ``qubofs._kernels.fallback``: both
backends consume the same pre-generated random arrays and evaluate the
acceptance arithmetic in the same per-element order (the extension is
built with -ffp-contract=off to keep that true).

Bit-vector encoding: assignment ``x`` corresponds to the integer code
``sum(x[i] << (n - 1 - i))``; ascending codes are lexicographic order.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t

cdef Py_ssize_t SCAN_LIMIT = 30
# Recompute the running energy from scratch this often during enumeration
# so incremental floating-point drift stays far below the tie tolerance.
cdef uint64_t RESYNC_MASK = 0xFFFF


cdef inline double _flip(const double[:, ::1] q, uint8_t* x, double* h,
                         Py_ssize_t i, double e) noexcept nogil:
    """Toggle bit i, keeping the local fields h and the energy e in sync."""
    cdef Py_ssize_t j, n = q.shape[0]
    cdef double d = 1.0 - 2.0 * x[i]
    e += d * (q[i, i] + 2.0 * h[i] - 2.0 * q[i, i] * x[i])
    for j in range(n):
        h[j] += d * q[i, j]
    x[i] ^= 1
    return e


cdef inline double _resync(const double[:, ::1] q, const uint8_t* x,
                           double* h) noexcept nogil:
    cdef Py_ssize_t i, j, n = q.shape[0]
    cdef double e = 0.0
    for j in range(n):
        h[j] = 0.0
    for i in range(n):
        if x[i]:
            for j in range(n):
                h[j] += q[i, j]
    for i in range(n):
        if x[i]:
            e += h[i]
    return e


cdef double _pass_min(const double[:, ::1] q, uint8_t* x, double* h) noexcept nogil:
    cdef Py_ssize_t n = q.shape[0]
    cdef uint64_t total = (<uint64_t>1) << n
    cdef uint64_t c
    cdef Py_ssize_t p, z
    cdef double e = 0.0
    cdef double emin = 0.0  # energy of the all-zeros state at c == 0
    for c in range(1, total):
        z = 0
        while not (c >> z) & 1:
            z += 1
        for p in range(z):
            e = _flip(q, x, h, n - 1 - p, e)
        e = _flip(q, x, h, n - 1 - z, e)
        if (c & RESYNC_MASK) == 0:
            e = _resync(q, x, h)
        if e < emin:
            emin = e
    return emin


def exhaustive_scan(const double[:, ::1] q, double tol, bint collect_all):
    """Enumerate all ``2**n`` assignments of ``x' q x``.

    Returns ``(emin, codes)``: the minimum energy and the ascending uint64
    codes of every assignment within ``tol`` of it (just the first such
    code when ``collect_all`` is false).
    """
    cdef Py_ssize_t n = q.shape[0]
    if n < 1:
        raise ValueError("need at least one variable")
    if n > SCAN_LIMIT:
        raise ValueError(f"enumeration over 2**{n} states is not feasible")

    x_arr = np.zeros(n, dtype=np.uint8)
    h_arr = np.zeros(n, dtype=np.float64)
    cdef uint8_t[::1] x = x_arr
    cdef double[::1] h = h_arr

    cdef double emin
    with nogil:
        emin = _pass_min(q, &x[0], &h[0])

    x_arr[:] = 0
    h_arr[:] = 0.0
    cdef double thresh = emin + tol
    cdef double e = 0.0
    cdef uint64_t total = (<uint64_t>1) << n
    cdef uint64_t c
    cdef Py_ssize_t p, z
    hits = []
    if e <= thresh:
        hits.append(0)
        if not collect_all:
            return emin, np.asarray(hits, dtype=np.uint64)
    for c in range(1, total):
        z = 0
        while not (c >> z) & 1:
            z += 1
        for p in range(z):
            e = _flip(q, &x[0], &h[0], n - 1 - p, e)
        e = _flip(q, &x[0], &h[0], n - 1 - z, e)
        if (c & RESYNC_MASK) == 0:
            e = _resync(q, &x[0], &h[0])
        if e <= thresh:
            hits.append(c)
            if not collect_all:
                break
    return emin, np.asarray(hits, dtype=np.uint64)


def anneal_chunk(const double[:, ::1] q, x0, const double[:, :, ::1] logu,
                 const double[::1] temps):
    """Run independent single-flip Metropolis anneals for a block of shots.

    Same contract as the fallback: ``x0`` (shots, n) uint8 starting states,
    ``logu`` (shots, sweeps, n) pre-generated log-uniforms, ``temps``
    (sweeps,) temperature ladder.  Returns the final states.
    """
    xs_arr = np.array(x0, dtype=np.uint8, copy=True)
    cdef uint8_t[:, ::1] xs = xs_arr
    cdef Py_ssize_t shots = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1]
    cdef Py_ssize_t sweeps = temps.shape[0]
    h_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] h = h_arr
    cdef Py_ssize_t s, t, i, j
    cdef double mt, d, delta

    with nogil:
        for s in range(shots):
            for j in range(n):
                h[j] = 0.0
            for i in range(n):
                if xs[s, i]:
                    for j in range(n):
                        h[j] += q[i, j]
            for t in range(sweeps):
                mt = -temps[t]
                for i in range(n):
                    d = 1.0 - 2.0 * xs[s, i]
                    delta = d * (q[i, i] + 2.0 * h[i] - 2.0 * q[i, i] * xs[s, i])
                    if delta < mt * logu[s, t, i]:
                        for j in range(n):
                            h[j] += d * q[i, j]
                        xs[s, i] ^= 1
    return xs_arr


def tabu_search(const double[:, ::1] q, x0, int tenure, int64_t max_no_improve,
                int64_t hard_cap):
    """Deterministic single-flip tabu search; see the fallback docstring."""
    cdef Py_ssize_t n = q.shape[0]
    x_arr = np.array(x0, dtype=np.uint8, copy=True)
    best_arr = np.array(x0, dtype=np.uint8, copy=True)
    deltas_arr = np.zeros(n, dtype=np.float64)
    h_arr = np.zeros(n, dtype=np.float64)
    tabu_arr = np.zeros(n, dtype=np.int64)
    cdef uint8_t[::1] x = x_arr
    cdef uint8_t[::1] x_best = best_arr
    cdef double[::1] deltas = deltas_arr
    cdef double[::1] h = h_arr
    cdef int64_t[::1] tabu_until = tabu_arr
    cdef Py_ssize_t i, j, i_star, i_any
    cdef int64_t it = 0, no_improve = 0
    cdef double d, e_cur, e_best, best_delta, any_delta
    cdef bint has_cand

    with nogil:
        for i in range(n):
            if x[i]:
                for j in range(n):
                    h[j] += q[i, j]
        e_cur = 0.0
        for i in range(n):
            if x[i]:
                e_cur += h[i]
        e_best = e_cur

        while no_improve < max_no_improve and it < hard_cap:
            has_cand = False
            i_star = 0
            i_any = 0
            best_delta = 0.0
            any_delta = 0.0
            for i in range(n):
                d = 1.0 - 2.0 * x[i]
                deltas[i] = d * (q[i, i] + 2.0 * h[i] - 2.0 * q[i, i] * x[i])
                if i == 0 or deltas[i] < any_delta:
                    any_delta = deltas[i]
                    i_any = i
                if tabu_until[i] <= it or e_cur + deltas[i] < e_best:
                    if not has_cand or deltas[i] < best_delta:
                        best_delta = deltas[i]
                        i_star = i
                    has_cand = True
            if not has_cand:
                i_star = i_any
            d = 1.0 - 2.0 * x[i_star]
            e_cur = e_cur + deltas[i_star]
            for j in range(n):
                h[j] += d * q[i_star, j]
            x[i_star] ^= 1
            tabu_until[i_star] = it + 1 + tenure
            if e_cur < e_best:
                e_best = e_cur
                for j in range(n):
                    x_best[j] = x[j]
                no_improve = 0
            else:
                no_improve += 1
            it += 1
    return best_arr
