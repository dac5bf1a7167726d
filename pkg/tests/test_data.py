"""Tests for dataset ingestion, discretization, and synthetic generation."""

import json

import numpy as np
import pytest

from qubofs import (
    CsvFormatError,
    Dataset,
    DiscretizedDataset,
    SynthSpec,
    discretize,
    gen_correlation_matrix,
    gen_synth,
    load_csv,
    write_csv,
)


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Dataset / DiscretizedDataset construction
# ---------------------------------------------------------------------------


def test_dataset_basic_properties():
    ds = Dataset(features=[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], labels=[0, 1, 0])
    assert ds.n_samples == 3
    assert ds.n_features == 2
    assert ds.n_classes == 2
    assert not ds.features.flags.writeable
    assert not ds.labels.flags.writeable


def test_dataset_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Dataset(features=[1.0, 2.0], labels=[0, 1])
    with pytest.raises(ValueError):
        Dataset(features=[[1.0], [2.0]], labels=[0])
    with pytest.raises(ValueError):
        Dataset(features=np.empty((0, 2)), labels=np.empty(0, dtype=int))


def test_dataset_rejects_noncontiguous_labels():
    with pytest.raises(ValueError):
        Dataset(features=[[1.0], [2.0]], labels=[0, 2])


def test_dataset_rejects_nonfinite_features():
    with pytest.raises(ValueError):
        Dataset(features=[[1.0], [np.nan]], labels=[0, 1])


def test_discretized_dataset_validates_bin_range():
    with pytest.raises(ValueError):
        DiscretizedDataset(
            bins=[[0]], labels=[0], B=2, bin_edges=[[0.0, 0.5, 1.0]]
        )
    with pytest.raises(ValueError):
        DiscretizedDataset(
            bins=[[3]], labels=[0], B=2, bin_edges=[[0.0, 0.5, 1.0]]
        )


def test_discretized_dataset_json_round_trip():
    rng = np.random.default_rng(3)
    ds = Dataset(features=rng.normal(size=(40, 3)), labels=rng.integers(0, 2, 40))
    disc = discretize(ds, B=4)
    blob = json.dumps(disc.to_json_dict())
    back = DiscretizedDataset.from_json_dict(json.loads(blob))
    np.testing.assert_array_equal(back.bins, disc.bins)
    np.testing.assert_array_equal(back.labels, disc.labels)
    np.testing.assert_array_equal(back.bin_edges, disc.bin_edges)
    assert back.B == disc.B


def test_discretized_dataset_json_rejects_garbage():
    with pytest.raises(ValueError):
        DiscretizedDataset.from_json_dict({"B": 3})


# ---------------------------------------------------------------------------
# load_csv / write_csv
# ---------------------------------------------------------------------------


def test_load_csv_remaps_labels_contiguously(tmp_path):
    path = _write(tmp_path, "a,b,y\n1.0,2.0,2\n3.0,4.0,5\n5.0,6.0,5\n")
    ds = load_csv(path)
    np.testing.assert_array_equal(ds.labels, [0, 1, 1])
    assert ds.label_mapping == (2.0, 5.0)
    assert ds.feature_names == ("a", "b")
    np.testing.assert_allclose(ds.features, [[1, 2], [3, 4], [5, 6]])


def test_load_csv_single_row(tmp_path):
    path = _write(tmp_path, "a,y\n7.5,1\n")
    ds = load_csv(path)
    assert ds.n_samples == 1
    assert ds.labels[0] == 0


def test_load_csv_reports_row_and_column_of_bad_cell(tmp_path):
    path = _write(tmp_path, "a,b,y\n1.0,2.0,0\n1.0,oops,1\n")
    with pytest.raises(CsvFormatError) as err:
        load_csv(path)
    assert "line 3" in str(err.value)
    assert "'b'" in str(err.value)


def test_load_csv_label_by_name_and_index(tmp_path):
    path = _write(tmp_path, "y,a\n0,1.5\n1,2.5\n")
    by_name = load_csv(path, label_column="y")
    by_index = load_csv(path, label_column=0)
    np.testing.assert_array_equal(by_name.labels, by_index.labels)
    np.testing.assert_allclose(by_name.features, [[1.5], [2.5]])
    assert by_name.feature_names == ("a",)


def test_load_csv_missing_label_column(tmp_path):
    path = _write(tmp_path, "a,b\n1,2\n")
    with pytest.raises(CsvFormatError):
        load_csv(path, label_column="nope")


def test_load_csv_ragged_row(tmp_path):
    path = _write(tmp_path, "a,b,y\n1,2,0\n1,2\n")
    with pytest.raises(CsvFormatError) as err:
        load_csv(path)
    assert "line 3" in str(err.value)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(CsvFormatError):
        load_csv(tmp_path / "absent.csv")


def test_load_csv_string_labels_sort_lexicographically(tmp_path):
    path = _write(tmp_path, "a,y\n1,good\n2,bad\n3,good\n")
    ds = load_csv(path)
    assert ds.label_mapping == ("bad", "good")
    np.testing.assert_array_equal(ds.labels, [1, 0, 1])


def test_write_csv_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    ds = Dataset(
        features=rng.normal(size=(25, 4)),
        labels=rng.integers(0, 3, 25),
        feature_names=("w", "x", "y2", "z"),
    )
    path = tmp_path / "out.csv"
    write_csv(ds, path)
    back = load_csv(path)
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.labels, ds.labels)
    assert back.feature_names == ds.feature_names


# ---------------------------------------------------------------------------
# discretize
# ---------------------------------------------------------------------------


def test_discretize_median_split():
    ds = Dataset(features=np.array([[1.0], [2.0], [3.0], [4.0]]), labels=[0, 0, 1, 1])
    disc = discretize(ds, B=2)
    np.testing.assert_array_equal(disc.bins[:, 0], [1, 1, 2, 2])


def test_discretize_constant_feature_lands_in_one_bin():
    ds = Dataset(features=np.array([[7.0], [7.0], [7.0]]), labels=[0, 1, 0])
    for B in (2, 5, 20):
        disc = discretize(ds, B=B)
        assert len(set(disc.bins[:, 0].tolist())) == 1


def test_discretize_single_sample_lands_in_final_bin():
    ds = Dataset(features=np.array([[3.5]]), labels=[0])
    disc = discretize(ds, B=4)
    assert disc.bins[0, 0] == 4


def test_discretize_requires_two_bins():
    ds = Dataset(features=np.array([[1.0], [2.0]]), labels=[0, 1])
    with pytest.raises(ValueError):
        discretize(ds, B=1)


def test_discretize_edges_span_min_to_max():
    rng = np.random.default_rng(0)
    ds = Dataset(features=rng.normal(size=(50, 2)), labels=rng.integers(0, 2, 50))
    disc = discretize(ds, B=5)
    np.testing.assert_allclose(disc.bin_edges[:, 0], ds.features.min(axis=0))
    np.testing.assert_allclose(disc.bin_edges[:, -1], ds.features.max(axis=0))
    assert (np.diff(disc.bin_edges, axis=1) >= 0).all()


def test_discretize_equal_mass_on_distinct_values():
    # 100 distinct values into 5 bins: exactly 20 per bin.
    ds = Dataset(features=np.arange(100.0)[:, None], labels=[0] * 100)
    disc = discretize(ds, B=5)
    counts = np.bincount(disc.bins[:, 0], minlength=6)[1:]
    np.testing.assert_array_equal(counts, [20] * 5)


def test_discretize_invariant_under_monotone_transforms():
    rng = np.random.default_rng(42)
    maps = [
        lambda v: v,
        lambda v: 3.0 * v + 11.0,
        lambda v: v**3,
        np.exp,
        lambda v: np.arctan(v / 2.0),
    ]
    for trial in range(20):
        feats = rng.normal(size=(60, 3))
        labels = rng.integers(0, 2, 60)
        base = discretize(Dataset(features=feats, labels=labels), B=6)
        transform = maps[trial % len(maps)]
        mapped = discretize(Dataset(features=transform(feats), labels=labels), B=6)
        np.testing.assert_array_equal(mapped.bins, base.bins)


def test_discretize_preserves_labels():
    rng = np.random.default_rng(9)
    labels = rng.integers(0, 3, 30)
    ds = Dataset(features=rng.normal(size=(30, 2)), labels=labels)
    np.testing.assert_array_equal(discretize(ds, B=3).labels, labels)


# ---------------------------------------------------------------------------
# gen_correlation_matrix
# ---------------------------------------------------------------------------


def test_correlation_matrix_dim_1():
    np.testing.assert_array_equal(gen_correlation_matrix(1, seed=0), [[1.0]])


def test_correlation_matrix_is_valid():
    for seed in range(30):
        dim = 2 + seed % 9
        m = gen_correlation_matrix(dim, seed=seed)
        assert m.shape == (dim, dim)
        np.testing.assert_array_equal(m.diagonal(), np.ones(dim))
        np.testing.assert_array_equal(m, m.T)
        assert np.linalg.eigvalsh(m).min() >= -1e-9
        assert np.abs(m).max() <= 1.0 + 1e-12


def test_correlation_matrix_deterministic():
    a = gen_correlation_matrix(6, seed=123)
    b = gen_correlation_matrix(6, seed=123)
    np.testing.assert_array_equal(a, b)
    c = gen_correlation_matrix(6, seed=124)
    assert not np.array_equal(a, c)


def test_correlation_matrix_rejects_dim_0():
    with pytest.raises(ValueError):
        gen_correlation_matrix(0, seed=0)


# ---------------------------------------------------------------------------
# gen_synth
# ---------------------------------------------------------------------------


def test_synth_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(n=0, d_inf=1, n_samples=10, seed=0)
    with pytest.raises(ValueError):
        SynthSpec(n=5, d_inf=6, n_samples=10, seed=0)
    with pytest.raises(ValueError):
        SynthSpec(n=5, d_inf=0, n_samples=10, seed=0)
    with pytest.raises(ValueError):
        SynthSpec(n=5, d_inf=2, n_samples=0, seed=0)


def test_gen_synth_shapes_and_truth():
    ds, truth = gen_synth(SynthSpec(n=10, d_inf=4, n_samples=500, seed=1))
    assert ds.features.shape == (500, 10)
    assert len(truth) == 4
    assert truth == tuple(sorted(truth))
    assert all(0 <= i < 10 for i in truth)


def test_gen_synth_labels_roughly_balanced():
    ds, _ = gen_synth(SynthSpec(n=10, d_inf=4, n_samples=10_000, seed=7))
    frac = ds.labels.mean()
    assert 0.45 <= frac <= 0.55


def test_gen_synth_balance_across_seeds():
    for seed in range(5):
        ds, _ = gen_synth(SynthSpec(n=8, d_inf=3, n_samples=10_000, seed=seed))
        assert abs(ds.labels.mean() - 0.5) <= 0.05


def test_gen_synth_all_informative():
    ds, truth = gen_synth(SynthSpec(n=4, d_inf=4, n_samples=200, seed=3))
    assert truth == (0, 1, 2, 3)
    assert ds.features.shape == (200, 4)


def test_gen_synth_deterministic():
    spec = SynthSpec(n=6, d_inf=2, n_samples=100, seed=99)
    ds1, t1 = gen_synth(spec)
    ds2, t2 = gen_synth(spec)
    np.testing.assert_array_equal(ds1.features, ds2.features)
    np.testing.assert_array_equal(ds1.labels, ds2.labels)
    assert t1 == t2


def test_gen_synth_seed_changes_output():
    ds1, _ = gen_synth(SynthSpec(n=6, d_inf=2, n_samples=100, seed=0))
    ds2, _ = gen_synth(SynthSpec(n=6, d_inf=2, n_samples=100, seed=1))
    assert not np.array_equal(ds1.features, ds2.features)
