"""Random ensembles, sweeps and reproducibility."""

import hashlib

import numpy as np
import pytest

from symqubit.invariants import Case
from symqubit.oracle import (
    CSV_HEADER,
    EnsembleKind,
    EnsembleSpec,
    chunk_rng,
    ensemble_chunk,
    entanglement_threshold,
    equivalence_sweep,
    evaluate_batch,
    mixed_batch,
    ppt_oracle,
    pure_batch,
    random_separable_symmetric,
    random_symmetric_mixed,
    random_symmetric_pure,
    search_case_exemplar,
    separable_batch,
    symmetric_werner_state,
    werner_state,
    write_sweep_csv,
)
from symqubit.qstate import SYM_BASIS, partial_transpose, pauli_decompose, schmidt_pure, to_symmetric
from symqubit.verdict import Outcome


def test_ppt_oracle_bell_and_product():
    assert ppt_oracle(schmidt_pure(1 / np.sqrt(2))).decisive_value == pytest.approx(-0.5)
    assert ppt_oracle(np.diag([1.0, 0, 0, 0])).outcome is Outcome.SEPARABLE_CONSISTENT


def test_ppt_oracle_matches_numpy(rng):
    for rho in mixed_batch(rng, 50):
        assert ppt_oracle(rho).decisive_value == pytest.approx(
            np.linalg.eigvalsh(partial_transpose(rho))[0], abs=1e-13)


def test_ensembles_live_in_triplet_subspace(rng):
    for rho in np.concatenate([pure_batch(rng, 20), mixed_batch(rng, 20)]):
        proj = SYM_BASIS @ SYM_BASIS.conj().T
        np.testing.assert_allclose(proj @ rho @ proj, rho, atol=1e-14)
        assert np.trace(rho).real == pytest.approx(1.0)


def test_mixed_rank(rng):
    for rank in (1, 2, 3):
        rho = mixed_batch(rng, 10, rank)
        assert all(np.linalg.matrix_rank(r, tol=1e-10) == rank for r in rho)


def test_separable_batch_is_ppt(rng):
    rho = separable_batch(rng, 200, 4)
    assert np.all(np.linalg.eigvalsh(partial_transpose_stack(rho))[:, 0] > -1e-14)


def partial_transpose_stack(rho):
    return np.stack([partial_transpose(r) for r in rho])


def test_single_state_wrappers():
    assert np.trace(random_symmetric_pure(1).rho @ random_symmetric_pure(1).rho).real == pytest.approx(1)
    to_symmetric(pauli_decompose(random_symmetric_mixed(2, rank=2)))
    m = random_separable_symmetric(3, terms=5)
    assert m.weights.sum() == pytest.approx(1.0)


def test_chunk_streams_are_independent():
    a = chunk_rng(7, 0).standard_normal(4)
    b = chunk_rng(7, 1).standard_normal(4)
    c = chunk_rng(7, 0).standard_normal(4)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, c)


def test_evaluate_batch_rejects_non_symmetric():
    from symqubit.errors import NotSymmetric
    rho = np.eye(4)[None] / 4
    with pytest.raises(NotSymmetric):
        evaluate_batch(rho)
    evaluate_batch(rho, unit_trace=False)


def test_sweep_report_invariants():
    for kind in EnsembleKind:
        rep = equivalence_sweep(EnsembleSpec(kind, 1500, 11))
        assert rep.agreements + len(rep.disagreements) + rep.indeterminate_count == rep.total == 1500
        assert rep.disagreements == []
        assert rep.implication_violations == 0
        assert sum(rep.case_tallies.values()) + rep.three_negative == 1500


def test_separable_ensemble_never_entangled():
    rep = equivalence_sweep(EnsembleSpec(EnsembleKind.SEPARABLE, 2000, 5))
    assert rep.entangled == 0
    assert rep.min_separable_c >= -1e-10


def test_pure_ensemble_all_case_three():
    rep = equivalence_sweep(EnsembleSpec(EnsembleKind.PURE, 1000, 2))
    assert rep.case_tallies[Case.CASE_III.value] >= 990


def test_report_merge_is_order_free():
    spec = EnsembleSpec(EnsembleKind.MIXED, 3000, 9)
    a = equivalence_sweep(spec).to_dict()
    b = equivalence_sweep(spec).to_dict()
    assert a == b


def test_csv_reproducible(tmp_path):
    spec = EnsembleSpec(EnsembleKind.MIXED, 1500, 4)
    digests = []
    for name in ("a.csv", "b.csv"):
        write_sweep_csv(spec, tmp_path / name)
        digests.append(hashlib.sha256((tmp_path / name).read_bytes()).hexdigest())
    assert digests[0] == digests[1]
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header.split(",") == CSV_HEADER


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(EnsembleKind.MIXED, 0, 1)


def test_werner_thresholds():
    assert entanglement_threshold(werner_state, "ppt") == pytest.approx(1 / 3, abs=1e-6)
    assert entanglement_threshold(symmetric_werner_state, "ppt") == pytest.approx(0.25, abs=1e-6)
    assert entanglement_threshold(symmetric_werner_state, "ctest") == pytest.approx(0.25, abs=1e-6)


def test_werner_is_not_triplet_supported():
    from symqubit.errors import NotSymmetric
    with pytest.raises(NotSymmetric):
        to_symmetric(pauli_decompose(werner_state(0.5)))


def test_case_one_exemplar_found():
    p = search_case_exemplar(Case.CASE_I, seed=0, batches=5)
    assert p is not None


def test_pure_sampling_is_rotation_invariant():
    from scipy.stats import ks_2samp

    from symqubit.invariants import su2
    from symqubit.qstate import bloch_arrays
    a = pure_batch(np.random.default_rng(100), 4000)
    b = pure_batch(np.random.default_rng(101), 4000)
    U = np.kron(*(2 * [su2([1, 2, 0.5], 1.1)]))
    b = U @ b @ U.conj().T
    sz_a = bloch_arrays(a)[0][:, 2].real
    sz_b = bloch_arrays(b)[0][:, 2].real
    assert ks_2samp(sz_a, sz_b).pvalue > 1e-3
