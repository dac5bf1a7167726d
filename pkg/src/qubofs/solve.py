"""Classical QUBO solvers and multi-shot sample statistics.

Three strategies share one interface:

* exhaustive enumeration -- exact, the reference for everything else;
* simulated annealing -- independent multi-shot single-flip Metropolis
  with a geometric temperature ladder;
* tabu-decomposition -- repeated exact (or tabu) solves of small
  sub-problems chosen by flip impact, with the remaining variables
  clamped.

All randomness is drawn up front from per-shot substreams of the
configured seed, so results are reproducible bit for bit and independent
of chunking or execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EnumerationLimitError
from .qubo import energy

# Assignments within this of the minimum count as minimizers (ties).
MINIMIZER_TOL = 1e-12

# Exhaustive enumeration refuses beyond this many variables.
EXHAUSTIVE_LIMIT = 30

KINDS = ("exhaustive", "annealing", "tabu")

# Target bytes of pre-generated log-uniforms per annealing chunk.
_CHUNK_BUDGET = 64 * 2**20


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the heuristic solvers.

    ``shots`` counts independent annealing runs, or restarts of the
    tabu-decomposition descent.  Temperatures default to a schedule
    derived from the instance (see :func:`default_temperatures`).
    ``chunk_size`` only groups annealing shots into batches for the
    kernel; it never changes results.
    """

    kind: str = "exhaustive"
    shots: int = 100
    seed: int = 0
    sweeps: int = 1000
    t_start: float | None = None
    t_end: float | None = None
    sub_size: int = 20
    tenure: int = 10
    non_improving_rounds: int = 3
    chunk_size: int | None = None

    def __post_init__(self):
        if self.kind == "tabu-decomposition":
            object.__setattr__(self, "kind", "tabu")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if self.sub_size < 1:
            raise ValueError("sub_size must be at least 1")
        if self.tenure < 0:
            raise ValueError("tenure must be non-negative")
        if self.non_improving_rounds < 1:
            raise ValueError("non_improving_rounds must be at least 1")
        if self.chunk_size is not None and self.chunk_size < 1:
            raise ValueError("chunk_size must be at least 1 when given")

    @classmethod
    def exhaustive(cls):
        return cls(kind="exhaustive")

    @classmethod
    def annealing(cls, shots=100, seed=0, **kwargs):
        return cls(kind="annealing", shots=shots, seed=seed, **kwargs)

    @classmethod
    def tabu(cls, shots=10, seed=0, **kwargs):
        return cls(kind="tabu", shots=shots, seed=seed, **kwargs)


@dataclass(frozen=True)
class ExhaustiveResult:
    """Exact solution: canonical minimizer, its energy, and all ties.

    ``minimizers`` rows are every assignment within :data:`MINIMIZER_TOL`
    of the minimum, in lexicographic order; ``x`` is the first of them.
    """

    x: np.ndarray
    energy: float
    minimizers: np.ndarray


@dataclass(frozen=True)
class SampleSet:
    """Aggregated states from a multi-shot heuristic run.

    ``states`` holds each distinct final state once, sorted by
    ``(energy, lexicographic)``; ``energies`` and ``multiplicities`` align
    with it.  ``sorted_energies`` is the per-shot energy list,
    nondecreasing, and ``bit_counts[i]`` counts shots whose final state
    sets bit ``i``.
    """

    states: np.ndarray
    energies: np.ndarray
    multiplicities: np.ndarray
    sorted_energies: np.ndarray
    bit_counts: np.ndarray

    @property
    def n(self):
        return self.states.shape[1]

    @property
    def shots(self):
        return int(self.multiplicities.sum())

    @property
    def samples(self):
        """List of ``(state, energy, multiplicity)`` tuples, best first."""
        return [
            (self.states[i].copy(), float(self.energies[i]), int(self.multiplicities[i]))
            for i in range(self.states.shape[0])
        ]

    def best(self):
        """Lowest-energy state (lexicographically smallest among ties)."""
        return self.states[0].copy(), float(self.energies[0])


def _codes_to_states(codes, n):
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((codes[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


def _shot_rng(seed, shot):
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(shot,)))
    )


def _assemble_sample_set(instance, finals):
    shots = finals.shape[0]
    per_shot = np.array([energy(instance, f) for f in finals])
    groups = {}
    for s in range(shots):
        key = finals[s].tobytes()
        if key in groups:
            groups[key][2] += 1
        else:
            groups[key] = [finals[s], float(per_shot[s]), 1]
    rows = sorted(groups.values(), key=lambda row: (row[1], tuple(row[0])))
    return SampleSet(
        states=np.array([row[0] for row in rows], dtype=np.uint8),
        energies=np.array([row[1] for row in rows]),
        multiplicities=np.array([row[2] for row in rows], dtype=np.int64),
        sorted_energies=np.sort(per_shot),
        bit_counts=finals.sum(axis=0).astype(np.int64),
    )


def solve_exhaustive(instance):
    """Enumerate every assignment; exact for up to 30 variables."""
    if instance.n > EXHAUSTIVE_LIMIT:
        raise EnumerationLimitError(
            f"exhaustive enumeration supports at most {EXHAUSTIVE_LIMIT} variables, "
            f"got {instance.n}"
        )
    _, codes = _kernels.exhaustive_scan(instance.q, MINIMIZER_TOL, True)
    minimizers = _codes_to_states(codes, instance.n)
    canonical = minimizers[0]
    return ExhaustiveResult(
        x=canonical, energy=energy(instance, canonical), minimizers=minimizers
    )


def default_temperatures(q, sweeps):
    """Geometric ladder from ``max|q| * n`` down to ``1e-3 * min nonzero |q|``.

    The start temperature makes almost every proposal acceptable; the end
    temperature is far below the smallest energy scale, so the final
    sweeps are effectively greedy descent.  Degenerate (all-zero)
    instances fall back to a 1.0 -> 1e-3 ladder.
    """
    mags = np.abs(np.asarray(q))
    top = float(mags.max()) if mags.size else 0.0
    t_start = top * q.shape[0] if top > 0 else 1.0
    nonzero = mags[mags > 0]
    t_end = 1e-3 * float(nonzero.min()) if nonzero.size else 1e-3 * t_start
    t_end = min(t_end, t_start)
    if sweeps == 1:
        return np.array([t_end])
    return np.geomspace(t_start, t_end, sweeps)


def solve_annealing(instance, config):
    """Multi-shot simulated annealing; returns a :class:`SampleSet`.

    Each shot starts from its own uniformly random state and runs
    ``config.sweeps`` sweeps of single-flip Metropolis proposals in index
    order.  Shot ``s`` draws everything from substream ``s`` of the seed,
    so the set of final states does not depend on ``chunk_size``.
    """
    n = instance.n
    sweeps = config.sweeps
    if config.t_start is None and config.t_end is None:
        temps = default_temperatures(instance.q, sweeps)
    else:
        t_hi = config.t_start if config.t_start is not None else 1.0
        t_lo = config.t_end if config.t_end is not None else 1e-3 * t_hi
        if t_hi <= 0 or t_lo <= 0:
            raise ValueError("temperatures must be positive")
        temps = np.geomspace(t_hi, t_lo, sweeps) if sweeps > 1 else np.array([t_lo])

    chunk = config.chunk_size
    if chunk is None:
        chunk = max(1, min(config.shots, _CHUNK_BUDGET // (sweeps * n * 8)))
    finals = np.empty((config.shots, n), dtype=np.uint8)
    for start in range(0, config.shots, chunk):
        stop = min(start + chunk, config.shots)
        x0 = np.empty((stop - start, n), dtype=np.uint8)
        logu = np.empty((stop - start, sweeps, n))
        for row, shot in enumerate(range(start, stop)):
            rng = _shot_rng(config.seed, shot)
            x0[row] = rng.integers(0, 2, n, dtype=np.uint8)
            with np.errstate(divide="ignore"):
                logu[row] = np.log(rng.random((sweeps, n)))
        finals[start:stop] = _kernels.anneal_chunk(instance.q, x0, logu, temps)
    return _assemble_sample_set(instance, finals)


def clamp_subproblem(instance, x, free):
    """Project onto ``free`` variables with the rest clamped at ``x``.

    Returns ``(sub_q, const)`` such that for any assignment ``z`` of the
    free variables, ``z' sub_q z + const`` equals the full-instance energy
    of ``x`` with the free positions overwritten by ``z``.  Cross terms
    against clamped ones fold onto the sub-diagonal (``z_a**2 == z_a``).
    """
    free = np.asarray(free, dtype=np.intp)
    if free.size == 0 or np.unique(free).size != free.size:
        raise ValueError("free must be a non-empty set of distinct indices")
    clamped = np.asarray(x, dtype=np.float64).copy()
    clamped[free] = 0.0
    sub_q = instance.q[np.ix_(free, free)].copy()
    sub_q[np.diag_indices_from(sub_q)] += 2.0 * (instance.q[free] @ clamped)
    const = float(clamped @ instance.q @ clamped) + instance.offset
    return sub_q, const


# Sub-problems up to this size are solved exactly; larger ones by tabu search.
_EXACT_SUB_LIMIT = 20


def _solve_subproblem(sub_q, z0, config):
    s = sub_q.shape[0]
    if s <= _EXACT_SUB_LIMIT:
        _, codes = _kernels.exhaustive_scan(sub_q, MINIMIZER_TOL, False)
        return _codes_to_states(codes, s)[0]
    return _kernels.tabu_search(
        sub_q, z0, config.tenure, max(20, 2 * s), max(500, 50 * s)
    )


def _descend(instance, config, x):
    """One restart of the decomposition descent from state ``x``."""
    q = instance.q
    n = instance.n
    s = min(config.sub_size, n)
    diag = q.diagonal().copy()
    xf = x.astype(np.float64)
    e_cur = energy(instance, xf)
    streak = 0
    rounds = 0
    while streak < config.non_improving_rounds and rounds < 200:
        # impact of negating each bit = energy increase it would cause
        h = q @ xf
        d = 1.0 - 2.0 * xf
        impacts = d * (diag + 2.0 * h - 2.0 * diag * xf)
        order = np.argsort(-impacts, kind="stable")
        # rotate the rank window on non-improving rounds so repeated
        # rounds do not re-solve the identical subproblem
        offset = (streak * s) % n
        free = np.sort(order.take(np.arange(offset, offset + s), mode="wrap"))
        sub_q, _ = clamp_subproblem(instance, xf, free)
        z = _solve_subproblem(sub_q, xf[free].astype(np.uint8), config)
        candidate = xf.copy()
        candidate[free] = z
        e_new = energy(instance, candidate)
        if e_new < e_cur:
            xf = candidate
            e_cur = e_new
            streak = 0
        else:
            streak += 1
        rounds += 1
    return xf.astype(np.uint8)


def solve_tabu_decomposed(instance, config):
    """Tabu-decomposition solver; returns a :class:`SampleSet`.

    Each shot is an independent restart from a random state: rank bits by
    the energy increase their negation would cause, free the ``sub_size``
    highest-impact bits, clamp the rest, solve the sub-problem exactly
    (or by tabu search past 20 variables), and accept strict
    improvements.  A restart stops after ``non_improving_rounds``
    consecutive rounds without improvement.
    """
    finals = np.empty((config.shots, instance.n), dtype=np.uint8)
    for shot in range(config.shots):
        rng = _shot_rng(config.seed, shot)
        x0 = rng.integers(0, 2, instance.n, dtype=np.uint8)
        finals[shot] = _descend(instance, config, x0)
    return _assemble_sample_set(instance, finals)


def solve_sampling(instance, config):
    """Dispatch to the heuristic named by ``config.kind``."""
    if config.kind == "annealing":
        return solve_annealing(instance, config)
    if config.kind == "tabu":
        return solve_tabu_decomposed(instance, config)
    raise ValueError(f"not a sampling solver: {config.kind!r}")


def summarize(sample_set, reference_energy=None):
    """JSON-ready digest of a :class:`SampleSet`.

    ``optimum_fraction`` is the fraction of shots whose energy is within
    :data:`MINIMIZER_TOL` of ``reference_energy`` (the best sampled energy
    when no external reference, e.g. an exhaustive optimum, is supplied).
    """
    best_x, best_e = sample_set.best()
    reference = (
        float(sample_set.sorted_energies[0])
        if reference_energy is None
        else float(reference_energy)
    )
    hits = np.count_nonzero(sample_set.sorted_energies <= reference + MINIMIZER_TOL)
    return {
        "sorted_energies": [float(e) for e in sample_set.sorted_energies],
        "bit_counts": [int(c) for c in sample_set.bit_counts],
        "best": {"x": [int(b) for b in best_x], "energy": best_e},
        "reference_energy": reference,
        "optimum_fraction": hits / sample_set.shots,
    }
