"""Construction of the feature-selection QUBO and related conversions.

The central object couples a per-feature importance vector ``I`` and a
pairwise redundancy matrix ``R`` through a trade-off weight ``alpha``::

    Q(alpha) = R - alpha * (R + diag(I))

so the diagonal rewards important features (``-alpha * I_i``) and the
off-diagonal penalizes redundant pairs (``(1 - alpha) * R_ij``).  The
module also provides the zero-importance guard (epsilon/mu substitution),
a cardinality-penalty baseline, energy evaluation, the Ising form, and
two interchange formats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


def _as_values(obj, ndim):
    """Accept a bare array or a wrapper with a ``values`` attribute."""
    arr = np.asarray(getattr(obj, "values", obj), dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    return arr


def _frozen(arr):
    out = np.array(arr, dtype=np.float64, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class QuboInstance:
    """A QUBO ``E(x) = x' q x + offset`` over binary variables.

    ``q`` is symmetric, so an off-diagonal pair coefficient ``c * x_i x_j``
    is stored as ``q[i, j] = q[j, i] = c / 2``.  ``provenance`` records the
    construction parameters (alpha, epsilon/mu, penalty weights) for
    reporting; it does not affect the energy.
    """

    q: np.ndarray
    offset: float = 0.0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"q must be square, got shape {q.shape}")
        if q.shape[0] < 1:
            raise ValueError("q must have at least one variable")
        if not np.isfinite(q).all():
            raise ValueError("q contains non-finite entries")
        if not np.array_equal(q, q.T):
            raise ValueError("q must be symmetric")
        object.__setattr__(self, "q", _frozen(q))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self):
        return self.q.shape[0]


@dataclass(frozen=True)
class IsingInstance:
    """Spin form ``E(s) = sum_{i<j} couplings[i,j] s_i s_j + fields . s + offset``.

    ``couplings`` is symmetric with zero diagonal and each bond counted
    once (only the upper triangle enters the energy sum).
    """

    couplings: np.ndarray
    fields: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "couplings", _frozen(self.couplings))
        object.__setattr__(self, "fields", _frozen(self.fields))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self):
        return self.fields.shape[0]


def build(importance, redundancy, alpha):
    """Assemble ``Q(alpha) = R - alpha * (R + diag(I))``.

    Parameters
    ----------
    importance : (n,) array or ImportanceVector
        Non-negative per-feature relevance scores.
    redundancy : (n, n) array or RedundancyMatrix
        Symmetric non-negative pairwise scores with zero diagonal.
    alpha : float in [0, 1]
        Trade-off weight; 0 is all-redundancy, 1 all-importance.
    """
    imp = _as_values(importance, 1)
    red = _as_values(redundancy, 2)
    n = imp.shape[0]
    if red.shape != (n, n):
        raise ValueError(
            f"redundancy shape {red.shape} does not match {n} importance scores"
        )
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    q = red - alpha * (red + np.diag(imp))
    return QuboInstance(q, provenance={"alpha": float(alpha)})


def apply_epsilon_mu(instance, importance, alpha, epsilon=1e-8, mu=None):
    """Replace near-zero diagonal reward with a positive exclusion penalty.

    Wherever ``alpha * I_i < epsilon`` the diagonal entry (``-alpha * I_i``,
    a vanishing reward) is overwritten with ``mu > 0``, so selecting that
    feature strictly increases the energy and it can never appear in a
    minimizer.  ``mu`` defaults to :func:`default_mu` of the instance.
    """
    imp = _as_values(importance, 1)
    if imp.shape[0] != instance.n:
        raise ValueError("importance length does not match instance size")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if mu is None:
        mu = default_mu(instance)
    mu = float(mu)
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    excluded = alpha * imp < epsilon
    q = np.array(instance.q)
    diag = q.diagonal().copy()
    diag[excluded] = mu
    np.fill_diagonal(q, diag)
    provenance = dict(instance.provenance)
    provenance.update(
        {"epsilon": float(epsilon), "mu": mu, "excluded": np.flatnonzero(excluded).tolist()}
    )
    return QuboInstance(q, instance.offset, provenance)


def default_mu(instance):
    """Largest matrix entry, or 1.0 when no entry is positive.

    Any positive value keeps excluded features out of every minimizer;
    taking the largest coefficient just keeps the penalty on the scale of
    the instance.
    """
    top = float(instance.q.max())
    return top if top > 0 else 1.0


def build_penalty(importance, redundancy, alpha, k, penalty_weight):
    """Cardinality-penalty baseline: ``Q(alpha) + penalty_weight * (1'x - k)^2``.

    Expanding the square adds ``penalty_weight`` to every pair coefficient,
    ``penalty_weight * (1 - 2k)`` to each diagonal entry, and a constant
    ``penalty_weight * k**2`` which is stored as the instance offset.  The
    subset size is only softly constrained, which is why the bisection on
    alpha is preferred; this form exists for comparison.
    """
    base = build(importance, redundancy, alpha)
    n = base.n
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= n:
        raise ValueError(f"k must be an integer in [0, {n}], got {k}")
    if penalty_weight <= 0:
        raise ValueError("penalty_weight must be positive")
    pen = np.full((n, n), float(penalty_weight))
    np.fill_diagonal(pen, penalty_weight * (1.0 - 2.0 * k))
    provenance = dict(base.provenance)
    provenance.update({"k": int(k), "penalty_weight": float(penalty_weight)})
    return QuboInstance(base.q + pen, penalty_weight * float(k) ** 2, provenance)


def energy(instance, x):
    """Evaluate ``x' q x + offset`` for a 0/1 assignment ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (instance.n,):
        raise ValueError(f"x must have shape ({instance.n},), got {x.shape}")
    return float(x @ instance.q @ x) + instance.offset


def to_ising(instance):
    """Convert to spin variables via ``x_i = (1 - s_i) / 2``.

    Returns an :class:`IsingInstance` whose energy matches
    :func:`energy` exactly for every assignment under that mapping
    (``x_i = 0`` is ``s_i = +1``).
    """
    q = instance.q
    diag = q.diagonal()
    row_off = q.sum(axis=1) - diag
    couplings = (q - np.diag(diag)) / 2.0
    fields = -(diag + row_off) / 2.0
    const = diag.sum() / 2.0 + (q.sum() - diag.sum()) / 4.0 + instance.offset
    return IsingInstance(couplings, fields, const)


def ising_energy(ising, s):
    """Evaluate the spin energy for ``s`` with entries in {-1, +1}."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (ising.n,):
        raise ValueError(f"s must have shape ({ising.n},), got {s.shape}")
    upper = np.triu(ising.couplings, 1)
    return float(s @ upper @ s + ising.fields @ s + ising.offset)


def to_json_dict(instance):
    """JSON form: ``{"n", "offset", "entries": [[i, j, coeff], ...]}``.

    Entries cover the upper triangle in row-major order; an off-diagonal
    entry carries the full pair coefficient ``2 * q[i, j]``.  Exact zeros
    are omitted.
    """
    q = instance.q
    entries = []
    for i in range(instance.n):
        if q[i, i] != 0.0:
            entries.append([i, i, float(q[i, i])])
        for j in range(i + 1, instance.n):
            if q[i, j] != 0.0:
                entries.append([i, j, float(2.0 * q[i, j])])
    return {"n": instance.n, "offset": instance.offset, "entries": entries}


def from_json_dict(data):
    try:
        n = int(data["n"])
        offset = float(data.get("offset", 0.0))
        entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed QUBO JSON: {exc}") from exc
    if n < 1:
        raise ValueError("QUBO JSON must declare at least one variable")
    q = np.zeros((n, n))
    for entry in entries:
        i, j, coeff = int(entry[0]), int(entry[1]), float(entry[2])
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"entry index ({i}, {j}) out of range for n={n}")
        if i == j:
            q[i, i] += coeff
        else:
            q[i, j] += coeff / 2.0
            q[j, i] += coeff / 2.0
    return QuboInstance(q, offset)


def to_coordinate_string(instance):
    """Plain-text form: one ``i j coeff`` line per upper-triangle entry.

    The same coefficient convention as the JSON form.  This format has no
    slot for the constant offset, which is dropped (minimizers are
    unaffected); use the JSON form to preserve it.
    """
    lines = []
    for i in range(instance.n):
        if instance.q[i, i] != 0.0:
            lines.append(f"{i} {i} {float(instance.q[i, i])!r}")
        for j in range(i + 1, instance.n):
            if instance.q[i, j] != 0.0:
                lines.append(f"{i} {j} {float(2.0 * instance.q[i, j])!r}")
    return "\n".join(lines) + "\n" if lines else ""


def from_coordinate_string(text, n=None):
    """Parse the coordinate format; ``n`` defaults to 1 + largest index."""
    triples = []
    top = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'i j coeff', got {line!r}")
        try:
            i, j, coeff = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if i < 0 or j < 0:
            raise ValueError(f"line {lineno}: negative index")
        triples.append((i, j, coeff))
        top = max(top, i, j)
    if n is None:
        if top < 0:
            raise ValueError("empty coordinate data and no explicit n")
        n = top + 1
    elif top >= n:
        raise ValueError(f"index {top} out of range for n={n}")
    q = np.zeros((n, n))
    for i, j, coeff in triples:
        if i == j:
            q[i, i] += coeff
        else:
            q[i, j] += coeff / 2.0
            q[j, i] += coeff / 2.0
    return QuboInstance(q)


def export_file(instance, path, fmt="json"):
    """Write the instance to ``path`` as ``json`` or ``coord`` text."""
    if fmt == "json":
        payload = json.dumps(to_json_dict(instance), indent=2, sort_keys=True) + "\n"
    elif fmt == "coord":
        payload = to_coordinate_string(instance)
    else:
        raise ValueError(f"unknown QUBO format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)


def import_file(path, fmt=None):
    """Read an instance written by :func:`export_file`.

    When ``fmt`` is omitted it is sniffed: JSON content starts with ``{``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "coord"
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
        return from_json_dict(data)
    if fmt == "coord":
        return from_coordinate_string(text)
    raise ValueError(f"unknown QUBO format {fmt!r}")


def weight(x):
    """Hamming weight of a bit vector (number of selected features)."""
    return int(np.asarray(x).sum())
