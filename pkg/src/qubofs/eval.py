"""Subset-quality metrics: edit distance, recovery reports, distance graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FeatureSubset:
    """A subset of feature indices within an ambient dimension ``n``.

    ``indices`` is normalized to a strictly increasing tuple.
    """

    indices: tuple
    n: int

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("ambient dimension must be at least 1")
        cleaned = sorted({int(i) for i in self.indices})
        if cleaned and not 0 <= cleaned[0] <= cleaned[-1] < n:
            raise ValueError(f"indices must lie in 0..{n - 1}, got {cleaned}")
        object.__setattr__(self, "indices", tuple(cleaned))
        object.__setattr__(self, "n", n)

    @classmethod
    def from_bits(cls, bits):
        bits = np.asarray(bits)
        return cls(indices=tuple(np.flatnonzero(bits).tolist()), n=bits.shape[0])

    @property
    def bits(self):
        out = np.zeros(self.n, dtype=np.uint8)
        out[list(self.indices)] = 1
        return out

    @property
    def size(self):
        return len(self.indices)


def _check_ambient(a, b):
    if a.n != b.n:
        raise ValueError(f"ambient dimensions differ: {a.n} vs {b.n}")


def is_swap_comparison(a, b):
    """True when the two subsets have equal size, so swaps alone map one
    onto the other and :func:`edit_distance` is a true swap count."""
    _check_ambient(a, b)
    return a.size == b.size


def edit_distance(a, b):
    """Number of element swaps turning subset ``a`` into subset ``b``.

    For equal-size subsets this is ``|a - b|``, i.e. half the Hamming
    distance between the indicator vectors.  For unequal sizes (where no
    sequence of swaps suffices) the half-Hamming value is rounded up;
    :func:`is_swap_comparison` distinguishes the two cases.
    """
    _check_ambient(a, b)
    hamming = len(set(a.indices) ^ set(b.indices))
    return -(-hamming // 2)


def recovery_report(selected, truth):
    """Compare a selected subset against a ground truth.

    Returns a JSON-ready dict with the intersection size, the edit
    distance, and whether the selection recovered the truth exactly.
    """
    _check_ambient(selected, truth)
    overlap = sorted(set(selected.indices) & set(truth.indices))
    return {
        "n": selected.n,
        "selected": list(selected.indices),
        "truth": list(truth.indices),
        "intersection": len(overlap),
        "edit_distance": edit_distance(selected, truth),
        "exact_recovery": selected.indices == truth.indices,
        "swap_metric": is_swap_comparison(selected, truth),
    }


def distance_graph(named_subsets):
    """Complete weighted graph of pairwise edit distances.

    ``named_subsets`` maps names to :class:`FeatureSubset` (a mapping or a
    sequence of ``(name, subset)`` pairs); at least two are required, all
    with the same size and ambient dimension.  Subsets at distance zero
    are merged into a single cluster node whose ``members`` lists the
    original names; edges connect distinct clusters.
    """
    if hasattr(named_subsets, "items"):
        pairs = list(named_subsets.items())
    else:
        pairs = [(str(name), subset) for name, subset in named_subsets]
    if len(pairs) < 2:
        raise ValueError("need at least two subsets to compare")
    names = [name for name, _ in pairs]
    if len(set(names)) != len(names):
        raise ValueError("subset names must be distinct")
    first = pairs[0][1]
    for name, subset in pairs[1:]:
        _check_ambient(first, subset)
        if subset.size != first.size:
            raise ValueError(
                f"subset sizes differ: {name!r} has {subset.size}, "
                f"{pairs[0][0]!r} has {first.size}"
            )

    clusters = []  # (representative subset, member names)
    for name, subset in pairs:
        for rep, members in clusters:
            if rep.indices == subset.indices:
                members.append(name)
                break
        else:
            clusters.append((subset, [name]))

    nodes = [
        {"name": "+".join(members), "members": list(members)}
        for _, members in clusters
    ]
    edges = []
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            edges.append(
                {
                    "a": nodes[i]["name"],
                    "b": nodes[j]["name"],
                    "w": edit_distance(clusters[i][0], clusters[j][0]),
                }
            )
    return {"nodes": nodes, "edges": edges}
