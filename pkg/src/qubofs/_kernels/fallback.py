"""NumPy implementations of the solver inner loops.

These mirror ``qubofs._kernels._core`` operation for operation.  Both
backends consume the same pre-generated random arrays and evaluate the
acceptance arithmetic in the same per-element order, so swapping one for
the other never changes a result.

Bit-vector encoding used throughout: an assignment ``x`` of ``n`` binary
variables is identified with the integer code ``sum(x[i] << (n - 1 - i))``,
i.e. ``x[0]`` is the most significant bit.  Ascending codes therefore
enumerate assignments in lexicographic order, and the smallest code among
ties is the lexicographically smallest assignment.
"""

from __future__ import annotations

import numpy as np

# Hard cap for full enumeration inside the kernels. Callers enforce their
# own (tighter) limits; this one only guards against absurd requests.
_SCAN_LIMIT = 30

# Width of the inner enumeration block: energies for all 2**16 settings of
# the trailing variables are computed with one matrix product per block.
_BLOCK_BITS = 16


def _bit_table(bits):
    """(2**bits, bits) float64 table; row r, column j holds bit (bits-1-j) of r."""
    if bits == 0:
        return np.zeros((1, 0), dtype=np.float64)
    codes = np.arange(1 << bits, dtype=np.int64)[:, None]
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)[None, :]
    return ((codes >> shifts) & 1).astype(np.float64)


def exhaustive_scan(q, tol, collect_all):
    """Enumerate all ``2**n`` assignments of ``x' q x``.

    Returns ``(emin, codes)`` where ``emin`` is the minimum energy and
    ``codes`` (uint64, ascending) are the assignments with energy within
    ``tol`` of it -- all of them when ``collect_all`` is true, otherwise
    just the first, i.e. the lexicographically smallest minimizer.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    if n < 1:
        raise ValueError("need at least one variable")
    if n > _SCAN_LIMIT:
        raise ValueError(f"enumeration over 2**{n} states is not feasible")

    lo = min(n, _BLOCK_BITS)
    hi = n - lo
    xlo = _bit_table(lo)
    e_lo = np.einsum("ri,ij,rj->r", xlo, q[hi:, hi:], xlo)
    q_cross = xlo @ (2.0 * q[hi:, :hi])  # (2**lo, hi)
    q_hh = q[:hi, :hi]
    hi_shifts = np.arange(hi - 1, -1, -1, dtype=np.int64)

    def block(m):
        xh = ((m >> hi_shifts) & 1).astype(np.float64)
        return (float(xh @ q_hh @ xh) + e_lo) + q_cross @ xh

    emin = np.inf
    for m in range(1 << hi):
        emin = min(emin, float(block(m).min()))

    thresh = emin + tol
    hits = []
    for m in range(1 << hi):
        idx = np.nonzero(block(m) <= thresh)[0]
        if idx.size:
            codes = ((m << lo) + idx).astype(np.uint64)
            if not collect_all:
                return emin, codes[:1]
            hits.append(codes)
    return emin, np.concatenate(hits)


def anneal_chunk(q, x0, logu, temps):
    """Run independent single-flip Metropolis anneals for a block of shots.

    Parameters
    ----------
    q : (n, n) float64
        Symmetric QUBO matrix.
    x0 : (shots, n) uint8
        Starting states, one row per shot.
    logu : (shots, sweeps, n) float64
        Pre-generated ``log(uniform)`` values, one per proposal: a flip
        with energy change ``delta`` at temperature ``T`` is accepted iff
        ``delta < -T * logu``.
    temps : (sweeps,) float64
        Temperature ladder; sweep ``t`` proposes flipping each variable
        once, in index order, at ``temps[t]``.

    Returns the final states, (shots, n) uint8.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    qd = np.ascontiguousarray(q.diagonal())
    xf = x0.astype(np.float64)

    # local fields h[s, j] = sum_i q[i, j] * x[s, i], built in index order
    h = np.zeros_like(xf)
    for i in range(n):
        on = xf[:, i] == 1.0
        if on.any():
            h[on] += q[i]

    for t in range(temps.shape[0]):
        mt = -temps[t]
        for i in range(n):
            d = 1.0 - 2.0 * xf[:, i]
            delta = d * (qd[i] + 2.0 * h[:, i] - 2.0 * qd[i] * xf[:, i])
            acc = delta < mt * logu[:, t, i]
            if acc.any():
                h[acc] += d[acc, None] * q[i]
                xf[acc, i] = 1.0 - xf[acc, i]
    return xf.astype(np.uint8)


def tabu_search(q, x0, tenure, max_no_improve, hard_cap):
    """Deterministic single-flip tabu search.

    Starting from ``x0``, repeatedly applies the best non-tabu flip (ties
    broken toward the lowest index), marking each flipped variable tabu
    for ``tenure`` subsequent iterations.  A tabu flip is still allowed
    when it would improve on the best energy seen (aspiration).  Stops
    after ``max_no_improve`` consecutive non-improving flips or
    ``hard_cap`` iterations, whichever comes first, and returns the best
    state visited, (n,) uint8.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    qd = np.ascontiguousarray(q.diagonal())
    xf = x0.astype(np.float64)

    h = np.zeros(n)
    for i in range(n):
        if xf[i] == 1.0:
            h += q[i]
    e_cur = 0.0
    for i in range(n):
        if xf[i] == 1.0:
            e_cur += float(h[i])

    e_best = e_cur
    x_best = xf.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    it = 0
    no_improve = 0
    while no_improve < max_no_improve and it < hard_cap:
        d = 1.0 - 2.0 * xf
        deltas = d * (qd + 2.0 * h - 2.0 * qd * xf)
        cand = (tabu_until <= it) | (e_cur + deltas < e_best)
        masked = np.where(cand, deltas, np.inf) if cand.any() else deltas
        i_star = int(np.argmin(masked))
        e_cur = e_cur + float(deltas[i_star])
        h += d[i_star] * q[i_star]
        xf[i_star] = 1.0 - xf[i_star]
        tabu_until[i_star] = it + 1 + tenure
        if e_cur < e_best:
            e_best = e_cur
            x_best = xf.copy()
            no_improve = 0
        else:
            no_improve += 1
        it += 1
    return x_best.astype(np.uint8)
