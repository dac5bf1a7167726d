"""Feature selection by bisection on the importance/redundancy trade-off.

The optimal subset size of the selection QUBO grows with alpha: at
``alpha = 0`` the empty set is optimal (only redundancy penalties remain),
at ``alpha = 1`` every feature with positive importance is rewarded and
the full set wins.  :func:`select_k` exploits that staircase with a
binary search for the alpha whose minimizer has exactly ``k`` features;
:func:`verify_proposition1` checks attainability of every size on a given
instance by enumerating the energy lines ``E_x(alpha)`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EnumerationLimitError, NonMonotoneTraceError, UnreachableKError
from .qubo import apply_epsilon_mu, build, energy
from .solve import (
    MINIMIZER_TOL,
    SolverConfig,
    _codes_to_states,
    solve_exhaustive,
    solve_sampling,
)

# Bisection stops (with an error) once the alpha bracket is this narrow.
BRACKET_LIMIT = 2.0**-32

# verify_proposition1 enumerates all subsets; keep that cheap.
_VERIFY_LIMIT = 12


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of :func:`select_k`.

    ``trace`` lists every probe as ``(alpha, minimizer size)`` in probe
    order, ending with the successful one.
    """

    alpha_star: float
    x_star: np.ndarray
    k: int
    trace: tuple
    solver: str

    def to_json_dict(self):
        return {
            "alpha_star": self.alpha_star,
            "x_star": [int(b) for b in self.x_star],
            "k": self.k,
            "trace": [[float(a), int(s)] for a, s in self.trace],
            "solver": self.solver,
        }


@dataclass(frozen=True)
class Prop1Report:
    """Attainability table: for each size ``k``, an alpha that attains it.

    ``witnesses[k]`` is ``None`` when no attaining alpha was found, in
    which case ``ok`` is false.
    """

    ok: bool
    witnesses: dict

    def to_json_dict(self):
        return {
            "ok": self.ok,
            "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())},
        }


def _measure_arrays(importance, redundancy):
    imp = np.asarray(getattr(importance, "values", importance), dtype=np.float64)
    red = np.asarray(getattr(redundancy, "values", redundancy), dtype=np.float64)
    if imp.ndim != 1 or imp.shape[0] < 1:
        raise ValueError("importance must be a non-empty vector")
    if red.shape != (imp.shape[0],) * 2:
        raise ValueError(
            f"redundancy shape {red.shape} does not match {imp.shape[0]} features"
        )
    if (imp < 0).any() or (red < 0).any():
        raise ValueError("importance and redundancy must be non-negative")
    if not np.array_equal(red, red.T) or np.any(red.diagonal() != 0.0):
        raise ValueError("redundancy must be symmetric with zero diagonal")
    return imp, red


def _probe(imp, red, alpha, epsilon, mu, config):
    """Minimizers of the (guarded) QUBO at one alpha, lexicographic order."""
    instance = build(imp, red, alpha)
    if (alpha * imp < epsilon).any():
        instance = apply_epsilon_mu(instance, imp, alpha, epsilon, mu)
    if config.kind == "exhaustive":
        return solve_exhaustive(instance).minimizers
    samples = solve_sampling(instance, config)
    cutoff = samples.energies[0] + MINIMIZER_TOL
    return samples.states[samples.energies <= cutoff]


def _check_monotone(trace):
    alpha_new, size_new = trace[-1]
    for alpha_old, size_old in trace[:-1]:
        if (alpha_old < alpha_new and size_old > size_new) or (
            alpha_old > alpha_new and size_old < size_new
        ):
            raise NonMonotoneTraceError(
                "probe sizes are not nondecreasing in alpha "
                f"({size_old} at alpha={alpha_old!r} vs {size_new} at "
                f"alpha={alpha_new!r}); retry with more shots or the "
                "exhaustive solver",
                trace,
            )


def select_k(importance, redundancy, k, solver=None, epsilon=1e-8, mu=None):
    """Find an alpha whose QUBO minimizer selects exactly ``k`` features.

    Binary search on ``[0, 1]`` starting at ``alpha = 0.5``: probe the
    minimizer size, recurse into the half that still brackets ``k``.  A
    minimizer of size exactly ``k`` at a probe is returned immediately
    (preferring it over the canonical one among ties).  Features whose
    diagonal reward ``alpha * I_i`` falls below ``epsilon`` get their
    diagonal replaced by the positive penalty ``mu`` (default: the largest
    matrix entry), so they never enter a minimizer.

    Raises :class:`UnreachableKError` when the bracket collapses without
    hitting ``k`` (the size staircase jumps past it), and
    :class:`NonMonotoneTraceError` when a heuristic solver returns sizes
    that decrease with alpha.
    """
    imp, red = _measure_arrays(importance, redundancy)
    n = imp.shape[0]
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= n:
        raise ValueError(f"k must be an integer in [0, {n}], got {k}")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    config = solver if solver is not None else SolverConfig.exhaustive()

    lo, hi = 0.0, 1.0
    alpha = 0.5
    trace = []
    below = None
    above = None
    while True:
        minimizers = _probe(imp, red, alpha, epsilon, mu, config)
        sizes = minimizers.sum(axis=1)
        match = np.flatnonzero(sizes == k)
        if match.size:
            trace.append((alpha, int(k)))
            return SelectionResult(
                alpha_star=alpha,
                x_star=minimizers[match[0]].copy(),
                k=int(k),
                trace=tuple(trace),
                solver=config.kind,
            )
        size = int(sizes[0])
        trace.append((alpha, size))
        if config.kind != "exhaustive":
            _check_monotone(trace)
        if size > k:
            hi = alpha
            above = (alpha, size)
        else:
            lo = alpha
            below = (alpha, size)
        if hi - lo < BRACKET_LIMIT:
            raise UnreachableKError(
                f"no alpha yields a minimizer with exactly {k} features; "
                f"the size staircase jumps over it near alpha={lo!r} "
                f"(bracketed by {below} and {above})",
                trace,
                lower=below,
                upper=above,
            )
        alpha = (lo + hi) / 2.0


def sweep_alpha(importance, redundancy, alphas, solver=None):
    """Solve the selection QUBO at each alpha in ``alphas``.

    Returns a list of ``(alpha, size, energy)`` tuples for the canonical
    minimizer (exhaustive solver) or best sampled state (heuristics).
    The size sequence is nondecreasing in alpha when solved exactly.
    """
    imp, red = _measure_arrays(importance, redundancy)
    config = solver if solver is not None else SolverConfig.exhaustive()
    results = []
    for alpha in alphas:
        instance = build(imp, red, float(alpha))
        if config.kind == "exhaustive":
            result = solve_exhaustive(instance)
            x, e = result.x, result.energy
        else:
            x, e = solve_sampling(instance, config).best()
        results.append((float(alpha), int(x.sum()), float(e)))
    return results


def verify_proposition1(importance, redundancy, grid_points=1025, tol=1e-9):
    """Check that every subset size is optimal at some alpha in ``[0, 1]``.

    Each assignment ``x`` contributes the line ``E_x(alpha) = r(x) -
    alpha * (r(x) + i(x))`` where ``i`` and ``r`` are its importance and
    redundancy sums; size ``k`` is attained wherever some size-``k`` line
    touches the lower envelope of all lines.  The check scans a uniform
    alpha grid and then refines candidate crossings exactly, so regions
    narrower than the grid spacing (down to single points) are still
    found.
    """
    imp, red = _measure_arrays(importance, redundancy)
    n = imp.shape[0]
    if n > _VERIFY_LIMIT:
        raise EnumerationLimitError(
            f"attainability check enumerates all subsets; n={n} exceeds "
            f"the limit of {_VERIFY_LIMIT}"
        )
    states = _codes_to_states(np.arange(1 << n, dtype=np.uint64), n).astype(np.float64)
    r_sum = np.einsum("ri,ij,rj->r", states, red, states)
    slope = r_sum + states @ imp  # E_x(alpha) = r_sum - alpha * slope
    sizes = states.sum(axis=1).astype(np.int64)

    alphas = np.linspace(0.0, 1.0, grid_points)
    table = r_sum[:, None] - np.outer(slope, alphas)
    lower = table.min(axis=0)
    tol_abs = tol * max(1.0, float(np.abs(table).max()))

    witnesses = {}
    per_size = {}
    for k in range(n + 1):
        rows = np.flatnonzero(sizes == k)
        per_size[k] = rows
        best_k = table[rows].min(axis=0)
        hit = np.flatnonzero(best_k <= lower + tol_abs)
        if hit.size:
            witnesses[k] = float(alphas[hit[hit.size // 2]])

    missing = [k for k in range(n + 1) if k not in witnesses]
    if missing:
        lower_arg = table.argmin(axis=0)
        for k in missing:
            alpha_star = _refine_crossing(
                r_sum, slope, per_size[k], table, lower_arg, alphas, tol_abs
            )
            if alpha_star is not None:
                witnesses[k] = alpha_star

    full = {k: witnesses.get(k) for k in range(n + 1)}
    return Prop1Report(ok=all(v is not None for v in full.values()), witnesses=full)


def _refine_crossing(r_sum, slope, rows, table, lower_arg, alphas, tol_abs):
    """Hunt for an off-grid alpha where a size class touches the envelope.

    Within one grid interval the envelope and the per-size minimum follow
    the lines active at its endpoints, so their crossings are the only
    candidates; each candidate is then verified against every line.
    """
    k_arg = rows[table[rows].argmin(axis=0)]
    for t in range(alphas.size - 1):
        lines_k = {k_arg[t], k_arg[t + 1]}
        lines_g = {lower_arg[t], lower_arg[t + 1]}
        for a in lines_k:
            for g in lines_g:
                if slope[a] == slope[g]:
                    continue
                alpha = (r_sum[a] - r_sum[g]) / (slope[a] - slope[g])
                if not (alphas[t] - 1e-15 <= alpha <= alphas[t + 1] + 1e-15):
                    continue
                alpha = min(max(alpha, 0.0), 1.0)
                values = r_sum - alpha * slope
                if values[rows].min() <= values.min() + tol_abs:
                    return float(alpha)
    return None


def selection_energy(importance, redundancy, result, epsilon=1e-8, mu=None):
    """Re-evaluate a selection result on its defining instance.

    Rebuilds the (guarded) QUBO at ``result.alpha_star`` and returns the
    energy of ``result.x_star`` -- useful for audits: it must equal the
    probe minimum that produced the result.
    """
    imp, red = _measure_arrays(importance, redundancy)
    instance = build(imp, red, result.alpha_star)
    if (result.alpha_star * imp < epsilon).any():
        instance = apply_epsilon_mu(instance, imp, result.alpha_star, epsilon, mu)
    return energy(instance, result.x_star)
