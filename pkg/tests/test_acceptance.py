"""Acceptance criteria, one test and one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``;
the summary lines appear at the end of the pytest report.
"""

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from symqubit import collective as coll
from symqubit.covariance import c_matrix
from symqubit.cv_reference import cv_equivalence_sweep, simon_criterion, simon_margin, two_mode_squeezed
from symqubit.invariants import Case, apply_identical_local_unitary, case_from_eigenvalues, classify_case, \
    local_invariants, random_su2
from symqubit.linalg import eigvalsh_batch, inertia
from symqubit.oracle import (
    EnsembleKind,
    EnsembleSpec,
    entanglement_threshold,
    SweepReport,
    iter_sweep,
    random_symmetric_mixed,
    report_from_batch,
    search_case_exemplar,
    symmetric_werner_state,
    werner_state,
    write_sweep_csv,
)
from symqubit.qstate import (
    SymmetricParams,
    congruence_reduce,
    pauli_decompose,
    pt_block_form,
    pt_in_block_basis,
    schmidt_pure,
    to_symmetric,
)
from symqubit.verdict import Outcome

FIXTURES = Path(__file__).with_name("fixtures")
BAND = 1e-8
SWEEP_REPORTS = {}


def sweep(kind, count, seed):
    """Run a sweep once per session and keep both the report and the raw sign data."""
    key = (kind, count, seed)
    if key not in SWEEP_REPORTS:
        report = SweepReport()
        c_min, ppt_min = [], []
        t0 = time.perf_counter()
        for offset, ev, status in iter_sweep(EnsembleSpec(kind, count, seed)):
            report.merge(report_from_batch(ev, status, offset, 1e-9))
            c_min.append(ev["c_min"])
            ppt_min.append(ev["ppt_min"])
        SWEEP_REPORTS[key] = (report, np.concatenate(c_min), np.concatenate(ppt_min),
                              time.perf_counter() - t0)
    return SWEEP_REPORTS[key]


def sign_conflicts(c_min, ppt_min):
    decided = (np.abs(c_min) > BAND) & (np.abs(ppt_min) > BAND)
    return int(np.sum(decided & ((c_min < 0) != (ppt_min < 0)))), int(np.sum(decided))


def test_criterion_01_c_test_matches_partial_transpose(criterion):
    mixed = sweep(EnsembleKind.MIXED, 100_000, 20260101)
    pure = sweep(EnsembleKind.PURE, 10_000, 20260102)
    bad_m, n_m = sign_conflicts(mixed[1], mixed[2])
    bad_p, n_p = sign_conflicts(pure[1], pure[2])
    runtime = mixed[3] + pure[3]
    ok = bad_m == 0 and bad_p == 0 and runtime < 60.0
    criterion(1, "C-test vs partial transpose", ok,
              f"mixed {bad_m}/{n_m} decided disagree, pure {bad_p}/{n_p}; "
              f"full-report disagreements {len(mixed[0].disagreements) + len(pure[0].disagreements)}; "
              f"{runtime:.1f} s")


def test_criterion_02_separable_mixtures(criterion):
    report, c_min, ppt_min, _ = sweep(EnsembleKind.SEPARABLE, 10_000, 20260103)
    worst_c = float(c_min.min())
    ppt_entangled = int(np.sum(ppt_min < -1e-9))
    ok = worst_c >= -1e-10 and ppt_entangled == 0
    criterion(2, "separable mixtures", ok,
              f"min lambda(C) = {worst_c:.3e}, PPT-entangled {ppt_entangled}/10000")


def test_criterion_03_pure_state_closed_form(criterion):
    worst = 0.0
    for k1 in np.linspace(0, 1, 102)[1:-1]:
        k2 = np.sqrt(1 - k1 * k1)
        p = to_symmetric(pauli_decompose(schmidt_pure(k1)))
        c = 2 * k1 * k2
        worst = max(worst, np.max(np.abs(p.T - np.diag([c, -c, 1.0]))),
                    np.max(np.abs(c_matrix(p) - np.diag([c, -c, c * c]))))
    criterion(3, "pure-state closed form", worst <= 1e-12, f"max deviation {worst:.2e} over 100 values")


def test_criterion_04_partial_transpose_block_structure(criterion):
    worst, signature_changes = 0.0, 0
    for seed in range(1000):
        rho = random_symmetric_mixed(seed)
        p = to_symmetric(pauli_decompose(rho))
        ptb = pt_in_block_basis(rho)
        worst = max(worst, np.max(np.abs(ptb - pt_block_form(p))))
        real = pt_block_form(p)
        if inertia(real) != inertia(congruence_reduce(real, p.s)):
            signature_changes += 1
    ok = worst <= 1e-10 and signature_changes == 0
    criterion(4, "partial-transpose block structure", ok,
              f"max entry error {worst:.2e}, signature changes {signature_changes}/1000")


def test_criterion_05_collective_consistency(criterion):
    rng = np.random.default_rng(20260105)
    worst_resid, worst_casimir = 0.0, 0.0
    for N in (2, 3, 4, 8, 16):
        for _ in range(200):
            st = coll.random_dicke_state(N, rng)
            mom = coll.collective_moments(st)
            worst_resid = max(worst_resid, coll.moment_residual(st, mom))
            casimir = np.trace(mom.VN) + mom.S @ mom.S
            worst_casimir = max(worst_casimir, abs(casimir - N / 2 * (N / 2 + 1)))
    ok = worst_resid <= 1e-9 and worst_casimir <= 1e-9
    criterion(5, "collective moments vs pair reduction", ok,
              f"max residual {worst_resid:.2e}, max Casimir error {worst_casimir:.2e}")


def test_criterion_06_spot_values(criterion):
    coherent = coll.pairwise_margin(coll.collective_moments(coll.spin_coherent(7, 1.1, 0.3)))[0]
    dicke2 = coll.pairwise_margin(coll.collective_moments(coll.dicke(2, 1)))[0]
    mom4 = coll.collective_moments(coll.dicke(4, 2))
    lam4 = float(eigvalsh_batch(mom4.shifted)[0])
    ghz = coll.pairwise_test(coll.ghz(4))
    ok = (abs(coherent) <= 1e-10 and abs(dicke2 + 0.5) <= 1e-10 and abs(lam4) <= 1e-9
          and ghz.outcome is Outcome.SEPARABLE_CONSISTENT)
    criterion(6, "pairwise condition spot values", ok,
              f"coherent {coherent:.1e}, |1,0> {dicke2:.12f}, |2,0> lambda {lam4:.1e} vs 1, "
              f"GHZ4 {ghz.outcome.value} ({ghz.decisive_value:.1e})")


def test_criterion_07_korbicz_equivalence(criterion):
    rng = np.random.default_rng(20260107)
    grid = coll.fibonacci_sphere()
    # covering radius of the Fibonacci grid, generously bounded
    delta = 2.0 * np.sqrt(4 * np.pi / len(grid))
    grid_misses, confirmed = 0, 0
    for k in range(1000):
        N = (2, 4, 8)[k % 3]
        st = coll.random_dicke_state(N, rng)
        mom = coll.collective_moments(st)
        w = np.linalg.eigvalsh(mom.shifted)
        n_star, margin = coll.korbicz_witness_search(st)
        q_grid, _ = coll.grid_minimum(mom.shifted, grid)
        resolution = (w[-1] - w[0]) * np.sin(delta) ** 2
        if not (w[0] - 1e-12 <= q_grid <= w[0] + resolution + 1e-12):
            grid_misses += 1
        lhs = 4 * np.einsum("ki,ij,kj->k", grid, mom.VN, grid) / N
        rhs = 1 - 4 * (grid @ mom.S) ** 2 / N**2
        star = coll.korbicz_inequality(st, n_star)[2]
        exists = bool(np.any(lhs < rhs)) or star
        if abs(margin) > max(BAND, resolution) and exists != (margin < 0):
            confirmed += 1
    ok = grid_misses == 0 and confirmed == 0
    criterion(7, "collective inequality equivalence", ok,
              f"grid misses {grid_misses}/1000, confirmed disagreements {confirmed}")


def test_criterion_08_local_invariance(criterion):
    rng = np.random.default_rng(20260108)
    drift, relabels = 0.0, 0
    for k in range(10):
        p = to_symmetric(pauli_decompose(random_symmetric_mixed(1000 + k, rank=1 + k % 3)))
        C = c_matrix(p)
        base = np.array([*vars(local_invariants(C)).values(), eigvalsh_batch(C)[0]])
        label = case_from_eigenvalues(eigvalsh_batch(C))
        for _ in range(100):
            q = apply_identical_local_unitary(p, random_su2(rng))
            Cq = c_matrix(q)
            c = eigvalsh_batch(Cq)
            now = np.array([*vars(local_invariants(Cq)).values(), c[0]])
            drift = max(drift, np.max(np.abs(now - base)))
            in_band = np.any(np.abs(c) <= 2e-9)
            if case_from_eigenvalues(c) is not label and not in_band:
                relabels += 1
    ok = drift <= 1e-9 and relabels == 0
    criterion(8, "identical local unitary invariance", ok,
              f"max drift {drift:.2e} over 1000 rotations, relabels {relabels}")


def test_criterion_09_case_classification(criterion):
    violations = sum(r[0].implication_violations for r in (
        sweep(EnsembleKind.MIXED, 100_000, 20260101), sweep(EnsembleKind.PURE, 10_000, 20260102),
        sweep(EnsembleKind.SEPARABLE, 10_000, 20260103)))
    three = sum(r[0].three_negative for r in SWEEP_REPORTS.values())
    fixture = json.loads((FIXTURES / "case_exemplars.json").read_text())
    found = {}
    for case in (Case.CASE_I, Case.CASE_II):
        p = search_case_exemplar(case, fixture["seed"], fixture["batches"])
        stored = fixture[case.value]
        verified = False
        if p is not None and stored is not None:
            q = SymmetricParams(stored["s"], stored["T"])
            verified = (classify_case(c_matrix(q)).label is case
                        and np.allclose(p.T, q.T, atol=1e-12) and np.allclose(p.s, q.s, atol=1e-12))
        found[case.value] = verified
    ok = violations == 0 and three == 0 and all(found.values())
    criterion(9, "case classification", ok,
              f"implication violations {violations}, three-negative {three}, "
              f"exemplars {found} (two negative C eigenvalues cannot occur: the partial "
              f"transpose of two qubits has at most one)")


def test_criterion_10_gaussian_reference(criterion):
    rep = cv_equivalence_sweep(10_000, seed=20260110)
    sq = simon_margin(two_mode_squeezed(0.5))
    target = -np.sinh(1.0) ** 2 / 4
    printed = simon_criterion(two_mode_squeezed(0.5), i4_form="printed").outcome
    ok = (not rep.disagreements and rep.agreements + rep.ambiguous == rep.total
          and abs(sq - target) <= 1e-9)
    criterion(10, "Gaussian covariance reference", ok,
              f"standard form {rep.agreements}/{rep.total} agree ({rep.ambiguous} in band), "
              f"squeezed margin {sq:.12f} vs {target:.12f}; printed form disagrees on "
              f"{rep.printed_form_disagreements}/{rep.entangled} entangled and calls r=0.5 {printed.value}")


def test_criterion_11_werner_threshold(criterion):
    p_ppt = entanglement_threshold(werner_state, "ppt")
    p_c = entanglement_threshold(werner_state, "ctest")
    sym = [entanglement_threshold(symmetric_werner_state, m) for m in ("ppt", "ctest")]
    ok = abs(p_ppt - 1 / 3) <= 1e-6 and abs(p_c - 1 / 3) <= 1e-6
    criterion(11, "Werner threshold", ok,
              f"PPT {p_ppt:.10f}, C-test {p_c:.3e} (the Werner state has singlet weight, so "
              f"C = p diag(1,-1,1) is negative for every p > 0); triplet-supported analogue "
              f"PPT {sym[0]:.10f}, C-test {sym[1]:.10f}")


def test_criterion_12_reproducible_csv(criterion, tmp_path):
    digests = []
    for name in ("first.csv", "second.csv"):
        write_sweep_csv(EnsembleSpec(EnsembleKind.MIXED, 5000, 20260112), tmp_path / name)
        digests.append(hashlib.sha256((tmp_path / name).read_bytes()).hexdigest())
    criterion(12, "byte-identical sweep CSV", digests[0] == digests[1], f"sha256 {digests[0][:16]}...")


if __name__ == "__main__":
    import sys

    import pytest
    sys.exit(pytest.main([__file__, "-q"]))
