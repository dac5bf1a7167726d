"""Plug-in mutual information on binned data.

Importance is the mutual information between each feature's bin variable
and the class label; redundancy is the pairwise mutual information between
feature bin variables.  Everything is estimated from empirical joint
frequencies and measured in nats, with ``0 * log 0 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen(arr):
    out = np.array(arr, dtype=np.float64, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ImportanceVector:
    """Per-feature relevance scores; non-negative, in nats."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] < 1:
            raise ValueError("importance must be a non-empty vector")
        if (values < 0).any() or not np.isfinite(values).all():
            raise ValueError("importance scores must be finite and non-negative")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class RedundancyMatrix:
    """Pairwise feature overlap scores; symmetric, non-negative, zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("redundancy must be a square matrix")
        if not np.isfinite(values).all() or (values < 0).any():
            raise ValueError("redundancy scores must be finite and non-negative")
        if not np.array_equal(values, values.T):
            raise ValueError("redundancy must be symmetric")
        if np.any(values.diagonal() != 0.0):
            raise ValueError("redundancy diagonal must be zero")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def n(self):
        return self.values.shape[0]


def _check_index(disc, i):
    if not 0 <= i < disc.n_features:
        raise IndexError(f"feature index {i} out of range for {disc.n_features} features")


def joint_pmf_feature_label(disc, i):
    """(B, c) empirical joint distribution of feature ``i``'s bin and the label."""
    _check_index(disc, i)
    c = disc.n_classes
    codes = (disc.bins[:, i] - 1) * c + disc.labels
    counts = np.bincount(codes, minlength=disc.B * c).reshape(disc.B, c)
    return counts / disc.n_samples


def joint_pmf_feature_pair(disc, i, j):
    """(B, B) empirical joint distribution of the bins of features ``i`` and ``j``."""
    _check_index(disc, i)
    _check_index(disc, j)
    if i == j:
        raise ValueError("feature pair must be distinct")
    codes = (disc.bins[:, i] - 1) * disc.B + (disc.bins[:, j] - 1)
    counts = np.bincount(codes, minlength=disc.B * disc.B).reshape(disc.B, disc.B)
    return counts / disc.n_samples


def mutual_information(joint):
    """Plug-in mutual information (nats) of a joint probability table.

    Sums ``p * log(p / (p_row * p_col))`` over cells with positive mass;
    clamped at zero to absorb roundoff on (near-)independent tables.
    """
    joint = np.asarray(joint, dtype=np.float64)
    total = joint.sum()
    if joint.ndim != 2 or (joint < 0).any() or not np.isclose(total, 1.0):
        raise ValueError("joint must be a 2-d probability table summing to 1")
    rows = joint.sum(axis=1)
    cols = joint.sum(axis=0)
    mask = joint > 0
    contrib = joint[mask] * np.log(joint[mask] / np.outer(rows, cols)[mask])
    return max(float(contrib.sum()), 0.0)


def importance(disc):
    """Mutual information between each feature's bin variable and the label."""
    values = [
        mutual_information(joint_pmf_feature_label(disc, i))
        for i in range(disc.n_features)
    ]
    return ImportanceVector(np.array(values))


def redundancy(disc):
    """Mutual information between the bin variables of every feature pair."""
    n = disc.n_features
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mi = mutual_information(joint_pmf_feature_pair(disc, i, j))
            values[i, j] = mi
            values[j, i] = mi
    return RedundancyMatrix(values)


def to_json_dict(imp, red):
    """JSON form of the measure pair: ``{"importance", "redundancy"}``."""
    imp_values = np.asarray(getattr(imp, "values", imp), dtype=np.float64)
    red_values = np.asarray(getattr(red, "values", red), dtype=np.float64)
    if red_values.shape != (imp_values.shape[0],) * 2:
        raise ValueError("importance and redundancy sizes do not match")
    return {
        "importance": imp_values.tolist(),
        "redundancy": red_values.tolist(),
    }


def from_json_dict(data):
    try:
        imp = ImportanceVector(np.asarray(data["importance"], dtype=np.float64))
        red = RedundancyMatrix(np.asarray(data["redundancy"], dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed measures JSON: {exc}") from exc
    if red.n != imp.n:
        raise ValueError("importance and redundancy sizes do not match")
    return imp, red
