"""Tests for QUBO assembly, energy evaluation, Ising form, and exchange formats."""

import json

import numpy as np
import pytest

from qubofs import (
    IsingInstance,
    QuboInstance,
    apply_epsilon_mu,
    build,
    build_penalty,
    energy,
    ising_energy,
    to_ising,
)
from qubofs.qubo import (
    default_mu,
    export_file,
    from_coordinate_string,
    from_json_dict,
    import_file,
    to_coordinate_string,
    to_json_dict,
    weight,
)

from oracles import all_states, brute_min, random_measures, random_symmetric


# ---------------------------------------------------------------------------
# QuboInstance
# ---------------------------------------------------------------------------


def test_instance_rejects_asymmetric_or_nonfinite():
    with pytest.raises(ValueError):
        QuboInstance(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        QuboInstance(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        QuboInstance(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        QuboInstance(np.zeros((0, 0)))


def test_instance_matrix_is_frozen():
    inst = QuboInstance(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        inst.q[0, 0] = 1.0


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------


def test_build_alpha_one_is_negated_importance_diagonal():
    imp = np.array([1.0, 2.0, 3.0])
    red = np.array([[0.0, 0.4, 0.1], [0.4, 0.0, 0.2], [0.1, 0.2, 0.0]])
    q = build(imp, red, alpha=1.0).q
    np.testing.assert_array_equal(q, np.diag([-1.0, -2.0, -3.0]))


def test_build_alpha_zero_is_redundancy():
    imp = np.array([1.0, 2.0])
    red = np.array([[0.0, 0.7], [0.7, 0.0]])
    q = build(imp, red, alpha=0.0).q
    np.testing.assert_array_equal(q, red)


def test_build_halfway_hand_values():
    q = build(np.array([1.0, 2.0]), np.array([[0.0, 0.5], [0.5, 0.0]]), alpha=0.5).q
    np.testing.assert_allclose(q, [[-0.5, 0.25], [0.25, -1.0]])


def test_build_rejects_bad_inputs():
    imp = np.array([1.0, 2.0])
    red = np.zeros((2, 2))
    with pytest.raises(ValueError):
        build(imp, red, alpha=1.5)
    with pytest.raises(ValueError):
        build(imp, red, alpha=-0.1)
    with pytest.raises(ValueError):
        build(imp, np.zeros((3, 3)), alpha=0.5)


def test_build_records_alpha():
    assert build(np.ones(2), np.zeros((2, 2)), alpha=0.25).provenance["alpha"] == 0.25


# ---------------------------------------------------------------------------
# apply_epsilon_mu
# ---------------------------------------------------------------------------


def test_epsilon_mu_substitutes_vanishing_diagonal():
    inst = build(np.array([0.0, 1.0]), np.zeros((2, 2)), alpha=0.5)
    out = apply_epsilon_mu(inst, np.array([0.0, 1.0]), alpha=0.5, epsilon=1e-8, mu=2.0)
    assert out.q[0, 0] == 2.0
    assert out.q[1, 1] == -0.5
    assert out.provenance["excluded"] == [0]


def test_epsilon_mu_zero_epsilon_changes_nothing():
    imp = np.array([0.0, 3.0])
    inst = build(imp, np.zeros((2, 2)), alpha=0.5)
    out = apply_epsilon_mu(inst, imp, alpha=0.5, epsilon=0.0, mu=1.0)
    np.testing.assert_array_equal(out.q, inst.q)


def test_epsilon_mu_alpha_zero_substitutes_every_diagonal():
    imp = np.array([1.0, 2.0, 3.0])
    red = np.array([[0.0, 0.2, 0.1], [0.2, 0.0, 0.3], [0.1, 0.3, 0.0]])
    inst = build(imp, red, alpha=0.0)
    out = apply_epsilon_mu(inst, imp, alpha=0.0, epsilon=1e-8, mu=5.0)
    np.testing.assert_array_equal(out.q.diagonal(), [5.0, 5.0, 5.0])
    off_diag = ~np.eye(3, dtype=bool)
    np.testing.assert_array_equal(out.q[off_diag], inst.q[off_diag])


def test_epsilon_mu_rejects_nonpositive_mu():
    inst = build(np.ones(2), np.zeros((2, 2)), alpha=0.5)
    with pytest.raises(ValueError):
        apply_epsilon_mu(inst, np.ones(2), alpha=0.5, mu=0.0)
    with pytest.raises(ValueError):
        apply_epsilon_mu(inst, np.ones(2), alpha=0.5, mu=-1.0)


def test_default_mu_is_max_entry_or_one():
    rng = np.random.default_rng(0)
    imp, red = random_measures(rng, 4)
    inst = build(imp, red, alpha=0.5)
    assert default_mu(inst) == inst.q.max()
    assert default_mu(build(imp, red, alpha=1.0)) == 1.0  # no positive entry left


def test_mu_excluded_feature_never_optimal():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        imp, red = random_measures(rng, n)
        imp[rng.integers(0, n)] = 0.0
        alpha = float(rng.uniform(0.1, 1.0))
        inst = apply_epsilon_mu(build(imp, red, alpha), imp, alpha)
        excluded = inst.provenance["excluded"]
        assert excluded
        _, minimizers = brute_min(inst.q)
        for x in minimizers:
            assert not x[excluded].any()


# ---------------------------------------------------------------------------
# build_penalty
# ---------------------------------------------------------------------------


def test_penalty_single_variable():
    inst = build_penalty(np.zeros(1), np.zeros((1, 1)), alpha=0.0, k=0, penalty_weight=1.0)
    np.testing.assert_array_equal(inst.q, [[1.0]])
    assert inst.offset == 0.0
    assert energy(inst, [0]) == 0.0
    assert energy(inst, [1]) == 1.0


def test_penalty_one_hot_minima():
    inst = build_penalty(np.zeros(2), np.zeros((2, 2)), alpha=0.0, k=1, penalty_weight=1.0)
    energies = {tuple(x): energy(inst, x) for x in all_states(2)}
    assert energies[(0, 1)] == energies[(1, 0)] == 0.0
    assert energies[(0, 0)] == energies[(1, 1)] == 1.0


def test_penalty_reproduces_squared_deviation():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(1, 7))
        imp, red = random_measures(rng, n)
        alpha = float(rng.uniform(0, 1))
        k = int(rng.integers(0, n + 1))
        lam = float(rng.uniform(0.5, 3.0))
        base = build(imp, red, alpha)
        pen = build_penalty(imp, red, alpha, k, lam)
        for x in all_states(n):
            expected = energy(base, x) + lam * (int(x.sum()) - k) ** 2
            assert energy(pen, x) == pytest.approx(expected, abs=1e-12)


def test_penalty_large_weight_forces_cardinality():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        imp, red = random_measures(rng, n)
        k = int(rng.integers(0, n + 1))
        inst = build_penalty(imp, red, alpha=0.5, k=k, penalty_weight=1e4)
        _, minimizers = brute_min(inst.q, inst.offset)
        assert all(int(x.sum()) == k for x in minimizers)


def test_penalty_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_penalty(np.zeros(2), np.zeros((2, 2)), 0.5, k=3, penalty_weight=1.0)
    with pytest.raises(ValueError):
        build_penalty(np.zeros(2), np.zeros((2, 2)), 0.5, k=1, penalty_weight=0.0)


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------


def test_energy_all_zeros_is_offset():
    inst = QuboInstance(random_symmetric(np.random.default_rng(4), 3))
    assert energy(inst, [0, 0, 0]) == 0.0


def test_energy_hand_value():
    inst = QuboInstance(np.array([[-0.5, 0.25], [0.25, -1.0]]))
    assert energy(inst, [1, 1]) == pytest.approx(-1.0, abs=1e-15)


def test_energy_single_bit_reads_diagonal():
    rng = np.random.default_rng(5)
    inst = QuboInstance(random_symmetric(rng, 4))
    for i in range(4):
        x = np.zeros(4)
        x[i] = 1
        assert energy(inst, x) == pytest.approx(inst.q[i, i], abs=1e-15)


def test_energy_shape_check():
    inst = QuboInstance(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        energy(inst, [0, 1, 0])


def test_scaling_preserves_minimizers():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        q = random_symmetric(rng, n)
        _, base = brute_min(q)
        for gamma in (0.1, 2.0, 117.0):
            _, scaled = brute_min(gamma * q)
            np.testing.assert_array_equal(scaled, base)


# ---------------------------------------------------------------------------
# to_ising
# ---------------------------------------------------------------------------


def test_ising_of_zero_qubo_is_zero():
    ising = to_ising(QuboInstance(np.zeros((3, 3))))
    np.testing.assert_array_equal(ising.couplings, np.zeros((3, 3)))
    np.testing.assert_array_equal(ising.fields, np.zeros(3))
    assert ising.offset == 0.0


def test_ising_hand_values():
    ising = to_ising(QuboInstance(np.array([[-1.0, 2.0], [2.0, 0.0]])))
    assert ising.offset == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(ising.fields, [-0.5, -1.0], atol=1e-15)
    assert ising.couplings[0, 1] == pytest.approx(1.0, abs=1e-15)
    assert ising.couplings[1, 0] == ising.couplings[0, 1]
    np.testing.assert_array_equal(ising.couplings.diagonal(), [0.0, 0.0])


def test_ising_energy_matches_qubo_exhaustively():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(1, 11))
        inst = QuboInstance(random_symmetric(rng, n), offset=float(rng.normal()))
        ising = to_ising(inst)
        for x in all_states(n):
            s = 1 - 2 * x.astype(np.int64)
            assert ising_energy(ising, s) == pytest.approx(
                energy(inst, x), abs=1e-9
            )


def test_ising_energy_shape_check():
    ising = to_ising(QuboInstance(np.zeros((2, 2))))
    with pytest.raises(ValueError):
        ising_energy(ising, [1, -1, 1])


# ---------------------------------------------------------------------------
# Exchange formats
# ---------------------------------------------------------------------------


def test_json_dict_upper_triangle_convention():
    inst = QuboInstance(np.array([[-0.5, 0.25], [0.25, -1.0]]))
    data = to_json_dict(inst)
    assert data["n"] == 2
    assert data["offset"] == 0.0
    assert data["entries"] == [[0, 0, -0.5], [0, 1, 0.5], [1, 1, -1.0]]


def test_json_round_trip_preserves_energy():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 8))
        inst = QuboInstance(random_symmetric(rng, n), offset=float(rng.normal()))
        back = from_json_dict(json.loads(json.dumps(to_json_dict(inst))))
        for x in all_states(n):
            assert energy(back, x) == energy(inst, x)


def test_coordinate_single_entry():
    assert to_coordinate_string(QuboInstance(np.array([[-2.0]]))) == "0 0 -2.0\n"


def test_coordinate_three_lines_for_dense_2x2():
    text = to_coordinate_string(QuboInstance(np.array([[-0.5, 0.25], [0.25, -1.0]])))
    assert text.splitlines() == ["0 0 -0.5", "0 1 0.5", "1 1 -1.0"]


def test_coordinate_round_trip_bitwise():
    rng = np.random.default_rng(9)
    for _ in range(10):
        n = int(rng.integers(1, 8))
        inst = QuboInstance(random_symmetric(rng, n))
        text = to_coordinate_string(inst)
        back = from_coordinate_string(text)
        assert to_coordinate_string(back) == text
        np.testing.assert_array_equal(back.q, inst.q)


def test_coordinate_parser_rejects_garbage():
    with pytest.raises(ValueError):
        from_coordinate_string("0 0\n")
    with pytest.raises(ValueError):
        from_coordinate_string("0 0 x\n")
    with pytest.raises(ValueError):
        from_coordinate_string("-1 0 2.0\n")
    with pytest.raises(ValueError):
        from_coordinate_string("", n=None)
    with pytest.raises(ValueError):
        from_coordinate_string("3 3 1.0\n", n=2)


def test_coordinate_skips_comments_and_blanks():
    inst = from_coordinate_string("# header\n\n0 1 1.0\n", n=2)
    np.testing.assert_array_equal(inst.q, [[0.0, 0.5], [0.5, 0.0]])


def test_export_import_files_both_formats(tmp_path):
    rng = np.random.default_rng(10)
    inst = QuboInstance(random_symmetric(rng, 5), offset=1.25)
    json_path = tmp_path / "q.json"
    coord_path = tmp_path / "q.coord"
    export_file(inst, json_path, fmt="json")
    export_file(inst, coord_path, fmt="coord")
    by_json = import_file(json_path)  # sniffed
    by_coord = import_file(coord_path)
    np.testing.assert_array_equal(by_json.q, inst.q)
    assert by_json.offset == inst.offset
    np.testing.assert_array_equal(by_coord.q, inst.q)
    assert by_coord.offset == 0.0  # coordinate format has no offset slot


def test_export_file_round_trip_byte_identical(tmp_path):
    inst = QuboInstance(np.array([[-0.5, 0.25], [0.25, -1.0]]))
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    export_file(inst, first, fmt="json")
    export_file(import_file(first), second, fmt="json")
    assert first.read_bytes() == second.read_bytes()


def test_weight():
    assert weight([0, 1, 1, 0, 1]) == 3
    assert weight(np.zeros(4, dtype=np.uint8)) == 0
