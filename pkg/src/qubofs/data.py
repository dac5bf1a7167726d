"""Datasets: CSV ingestion, quantile discretization, synthetic generation.

All downstream information measures work on quantile-binned integer data,
so the continuous-to-discrete step lives here, together with a labelled
synthetic generator (correlated Gaussian features, linear rule on an
informative subset) used to exercise the full selection pipeline against
a known ground truth.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CovarianceError, CsvFormatError


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, order="C")
    out.setflags(write=False)
    return out


def _check_labels(labels):
    classes = np.unique(labels)
    if labels.size and not np.array_equal(classes, np.arange(classes.size)):
        raise ValueError(
            "labels must form a contiguous range 0..c-1; "
            f"got values {classes.tolist()}"
        )


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with integer class labels.

    ``labels`` must already be codes in a contiguous range ``0..c-1``;
    ``label_mapping`` optionally records the original class values in code
    order.  Arrays are copied and frozen.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple | None = None
    label_mapping: tuple | None = None

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels)
        if feats.ndim != 2:
            raise ValueError(f"features must be 2-dimensional, got shape {feats.shape}")
        if feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError("need at least one sample and one feature")
        if labels.shape != (feats.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {feats.shape[0]} samples"
            )
        if not np.isfinite(feats).all():
            raise ValueError("features contain non-finite values")
        labels = labels.astype(np.int64)
        _check_labels(labels)
        if self.feature_names is not None and len(self.feature_names) != feats.shape[1]:
            raise ValueError("feature_names length does not match feature count")
        object.__setattr__(self, "features", _frozen(feats, np.float64))
        object.__setattr__(self, "labels", _frozen(labels, np.int64))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def n_classes(self):
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class DiscretizedDataset:
    """Quantile-binned view of a dataset.

    ``bins`` holds integer bin indices in ``1..B`` (row = sample, column =
    feature); ``bin_edges`` keeps the ``B + 1`` quantile edges per feature
    that produced them.  Labels pass through unchanged.
    """

    bins: np.ndarray
    labels: np.ndarray
    B: int
    bin_edges: np.ndarray

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.int64)
        labels = np.asarray(self.labels, dtype=np.int64)
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        if self.B < 2:
            raise ValueError("need at least two bins")
        if bins.ndim != 2 or labels.shape != (bins.shape[0],):
            raise ValueError("bins must be (samples, features) with matching labels")
        if bins.min() < 1 or bins.max() > self.B:
            raise ValueError(f"bin values must lie in 1..{self.B}")
        if edges.shape != (bins.shape[1], self.B + 1):
            raise ValueError(
                f"bin_edges must have shape ({bins.shape[1]}, {self.B + 1})"
            )
        if (np.diff(edges, axis=1) < 0).any():
            raise ValueError("bin edges must be nondecreasing per feature")
        _check_labels(labels)
        object.__setattr__(self, "bins", _frozen(bins, np.int64))
        object.__setattr__(self, "labels", _frozen(labels, np.int64))
        object.__setattr__(self, "bin_edges", _frozen(edges, np.float64))
        object.__setattr__(self, "B", int(self.B))

    @property
    def n_samples(self):
        return self.bins.shape[0]

    @property
    def n_features(self):
        return self.bins.shape[1]

    @property
    def n_classes(self):
        return int(self.labels.max()) + 1

    def to_json_dict(self):
        return {
            "B": self.B,
            "bin_edges": self.bin_edges.tolist(),
            "bins": self.bins.tolist(),
            "labels": self.labels.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            return cls(
                bins=np.asarray(data["bins"], dtype=np.int64),
                labels=np.asarray(data["labels"], dtype=np.int64),
                B=int(data["B"]),
                bin_edges=np.asarray(data["bin_edges"], dtype=np.float64),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed discretized-dataset JSON: {exc}") from exc


def load_csv(path, label_column=None):
    """Read a dataset from CSV: first row header, ``.`` decimal point.

    ``label_column`` selects the class column by header name or 0-based
    position; by default the last column is the label.  Distinct label
    values are remapped to ``0..c-1`` in ascending order (numeric order
    when every label parses as a number, lexicographic otherwise); the
    original values are kept on ``Dataset.label_mapping``.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = [name.strip() for name in rows[0]]
    data_rows = rows[1:]
    if not data_rows:
        raise CsvFormatError(f"{path}: no data rows after the header")
    if len(header) < 2:
        raise CsvFormatError(f"{path}: need at least one feature and a label column")

    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int):
        if not 0 <= label_column < len(header):
            raise CsvFormatError(
                f"{path}: label column index {label_column} out of range"
            )
        label_idx = label_column
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise CsvFormatError(
                f"{path}: no column named {label_column!r} in header {header}"
            ) from None

    feature_idx = [i for i in range(len(header)) if i != label_idx]
    n = len(feature_idx)
    features = np.empty((len(data_rows), n))
    raw_labels = []
    for r, row in enumerate(data_rows):
        line = r + 2  # 1-based, counting the header line
        if len(row) != len(header):
            raise CsvFormatError(
                f"{path}: line {line} has {len(row)} fields, expected {len(header)}"
            )
        for c, col in enumerate(feature_idx):
            cell = row[col].strip()
            try:
                features[r, c] = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: line {line}, column {header[col]!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
        raw_labels.append(row[label_idx].strip())

    try:
        keys = sorted({float(s) for s in raw_labels})
        code_of = {key: code for code, key in enumerate(keys)}
        labels = np.array([code_of[float(s)] for s in raw_labels], dtype=np.int64)
    except ValueError:
        keys = sorted(set(raw_labels))
        code_of = {key: code for code, key in enumerate(keys)}
        labels = np.array([code_of[s] for s in raw_labels], dtype=np.int64)

    return Dataset(
        features=features,
        labels=labels,
        feature_names=tuple(header[i] for i in feature_idx),
        label_mapping=tuple(keys),
    )


def write_csv(dataset, path, label_name="y"):
    """Write a dataset back to CSV (header row, floats via ``repr``)."""
    names = dataset.feature_names or tuple(f"f{i}" for i in range(dataset.n_features))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [label_name])
        for row, label in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def discretize(dataset, B=20):
    """Bin each feature into ``B`` equal-mass bins.

    Edges are the empirical quantiles at fractions ``l / B`` for
    ``l = 0..B`` (linear interpolation).  Bin ``l`` is the half-open
    interval between edges ``l - 1`` and ``l``; the final bin is closed,
    so values at or above the last inner edge land in bin ``B``.  The
    resulting bins depend only on the ranks of the values, so any strictly
    increasing per-feature transform leaves them unchanged.
    """
    if B < 2:
        raise ValueError("need at least two bins")
    n = dataset.n_features
    fractions = np.arange(B + 1) / B
    edges = np.empty((n, B + 1))
    bins = np.empty((dataset.n_samples, n), dtype=np.int64)
    for j in range(n):
        col = dataset.features[:, j]
        ej = np.maximum.accumulate(np.quantile(col, fractions))
        edges[j] = ej
        bins[:, j] = np.searchsorted(ej[1:B], col, side="right") + 1
    return DiscretizedDataset(bins=bins, labels=dataset.labels, B=B, bin_edges=edges)


def gen_correlation_matrix(dim, seed):
    """Draw a random correlation matrix, uniform over the space of valid ones.

    Uses the onion construction: grow the matrix one dimension at a time,
    drawing the new column from a Beta-distributed radius and a uniform
    direction inside the unit ball of the current matrix.  ``seed`` may be
    an integer or a ``numpy.random.Generator``.

    The result is exactly symmetric with unit diagonal, and positive
    semidefinite up to roundoff.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if dim == 1:
        return np.eye(1)
    shape = 1.0 + (dim - 2) / 2.0
    r = 2.0 * rng.beta(shape, shape) - 1.0
    m = np.array([[1.0, r], [r, 1.0]])
    for k in range(2, dim):
        shape -= 0.5
        radius_sq = rng.beta(k / 2.0, shape)
        u = rng.standard_normal(k)
        u /= np.linalg.norm(u)
        z = _cholesky_psd(m) @ (np.sqrt(radius_sq) * u)
        m = np.block([[m, z[:, None]], [z[None, :], np.ones((1, 1))]])
    return m


def _cholesky_psd(m):
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * max(1.0, float(np.abs(m).max()))
        return np.linalg.cholesky(m + jitter * np.eye(m.shape[0]))


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for :func:`gen_synth`.

    ``n`` features total, of which a random subset of ``d_inf`` determines
    the label; ``n_samples`` rows; everything derived from ``seed``.
    """

    n: int
    d_inf: int
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 1 <= self.d_inf <= self.n:
            raise ValueError(f"d_inf must lie in 1..{self.n}, got {self.d_inf}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")


def gen_synth(spec):
    """Generate a labelled dataset with a known informative subset.

    Feature blocks: the informative features and the remaining features
    are each multivariate Gaussian with a random correlation matrix,
    means ~ Normal(0, 10) and scales ~ exp(Normal(0, 1)); the two blocks
    are independent of each other.  The label thresholds a random linear
    score of the informative features at its empirical mean, giving
    roughly balanced classes.

    Returns ``(dataset, informative)`` where ``informative`` is the sorted
    tuple of ground-truth feature indices.  All randomness flows from
    ``spec.seed`` through fixed named substreams, so equal specs give
    identical output regardless of how many samples or features other
    calls have drawn.
    """
    streams = [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(t,))))
        for t in range(7)
    ]
    rng_subset, rng_corr_inf, rng_corr_rest, rng_means, rng_scales, rng_x, rng_w = streams

    informative = np.sort(rng_subset.choice(spec.n, size=spec.d_inf, replace=False))
    rest = np.setdiff1d(np.arange(spec.n), informative)
    means = rng_means.normal(0.0, np.sqrt(10.0), spec.n)
    scales = np.exp(rng_scales.standard_normal(spec.n))

    features = np.empty((spec.n_samples, spec.n))
    corr_inf = gen_correlation_matrix(spec.d_inf, rng_corr_inf)
    chol_inf = _chol_cov(scales[informative], corr_inf)
    noise = rng_x.standard_normal((spec.n_samples, spec.d_inf))
    features[:, informative] = means[informative] + noise @ chol_inf.T
    if rest.size:
        corr_rest = gen_correlation_matrix(rest.size, rng_corr_rest)
        chol_rest = _chol_cov(scales[rest], corr_rest)
        noise = rng_x.standard_normal((spec.n_samples, rest.size))
        features[:, rest] = means[rest] + noise @ chol_rest.T

    score = features[:, informative] @ rng_w.standard_normal(spec.d_inf)
    labels = (score > score.mean()).astype(np.int64)
    dataset = Dataset(
        features=features,
        labels=labels,
        feature_names=tuple(f"f{i}" for i in range(spec.n)),
        label_mapping=(0, 1) if labels.max() == 1 else (0,),
    )
    return dataset, tuple(int(i) for i in informative)


def _chol_cov(scales, corr):
    """Cholesky factor of ``diag(scales) @ corr @ diag(scales)``."""
    cov = np.outer(scales, scales) * corr
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-10 * float(cov.diagonal().max())
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise CovarianceError(
                "synthetic covariance is not positive semidefinite"
            ) from exc
