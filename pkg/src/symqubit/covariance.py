"""Two-qubit covariance blocks and the C-matrix entanglement test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyFailure
from .linalg import as_real_symmetric, eigvalsh_batch
from .qstate import SymmetricParams, c_matrix_arrays, pauli_decompose, separable_symmetric
from .verdict import DEFAULT_TOL, Verdict


@dataclass(frozen=True)
class CovarianceBlocks:
    """Single-qubit blocks ``A``, ``B`` and the cross block ``C`` of the 6x6 covariance."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def covariance_blocks(p):
    """Blocks for arbitrary (not necessarily symmetric) Bloch parameters."""
    s1, s2, T = np.asarray(p.s1), np.asarray(p.s2), np.asarray(p.T)
    A = np.eye(3) - np.outer(s1, s1)
    B = np.eye(3) - np.outer(s2, s2)
    C = T - np.outer(s1, s2)
    return CovarianceBlocks(A, B, C)


def c_matrix(p: SymmetricParams):
    """``C = T - s s^T``."""
    return as_real_symmetric(c_matrix_arrays(p.s, p.T))


def c_negativity_test(p: SymmetricParams, tol=DEFAULT_TOL):
    """Entangled iff ``C`` has an eigenvalue below ``-tol``.

    For exchange-symmetric two-qubit states this is equivalent to a
    negative partial transpose, so it decides entanglement outright.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = float(eigvalsh_batch(c_matrix(p))[0])
    return Verdict.from_margin(lam, tol)


def lemma_quadratic_form(m, n):
    """``n^T C n`` for a separable mixture, which is a variance and hence >= 0.

    Evaluated once from ``C`` of the assembled density matrix and once as
    ``sum_w p_w (s_w.n)^2 - (sum_w p_w s_w.n)^2``; the two must agree.
    """
    n = np.asarray(n, dtype=np.float64)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("n must be a unit vector")
    # mixed components leave the triplet subspace, so use the general cross block
    C = covariance_blocks(pauli_decompose(separable_symmetric(m))).C
    via_matrix = float(n @ C @ n)
    proj = m.bloch_vectors @ n
    via_variance = float(m.weights @ proj**2 - (m.weights @ proj) ** 2)
    if abs(via_matrix - via_variance) > 1e-12:
        raise ConsistencyFailure(
            f"quadratic form mismatch: {via_matrix!r} vs {via_variance!r}")
    return via_variance
