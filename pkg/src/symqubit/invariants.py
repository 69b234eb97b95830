"""Identical-local-unitary machinery and the invariants of the C matrix."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyFailure, NotSpecialUnitary, ThreeNegative
from .linalg import as_real_symmetric, eigvalsh_batch
from .qstate import PAULI, SymmetricParams
from .verdict import DEFAULT_TOL


def su2_to_so3(U):
    """Adjoint rotation ``O_ij = tr(sigma_i U sigma_j U^dag) / 2``."""
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (2, 2):
        raise NotSpecialUnitary("expected a 2x2 matrix")
    if np.max(np.abs(U.conj().T @ U - np.eye(2))) > 1e-10:
        raise NotSpecialUnitary("matrix is not unitary")
    if abs(np.linalg.det(U) - 1.0) > 1e-10:
        raise NotSpecialUnitary(f"det U = {np.linalg.det(U):.6g}, expected 1")
    O = 0.5 * np.einsum("iab,bc,jcd,da->ij", PAULI, U, PAULI, U.conj().T)
    return O.real


def su2(axis, angle):
    """``exp(-i angle n.sigma / 2)`` for a unit axis ``n``."""
    n = np.asarray(axis, dtype=np.float64)
    n = n / np.linalg.norm(n)
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * np.einsum("i,iab->ab", n, PAULI)


def random_su2(rng):
    """Haar-random SU(2) element from a uniformly random unit quaternion."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    a, b = q[0] + 1j * q[1], q[2] + 1j * q[3]
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def apply_identical_local_unitary(p: SymmetricParams, U):
    """Parameters of ``(U (x) U) rho (U (x) U)^dag``."""
    O = su2_to_so3(U)
    return SymmetricParams(O @ p.s, O @ p.T @ O.T)


@dataclass(frozen=True)
class LocalInvariants:
    I1: float
    I2: float
    I3: float
    I4: float


def local_invariants(C):
    C = as_real_symmetric(C)
    I2 = float(np.trace(C))
    I3 = float(np.trace(C @ C))
    return LocalInvariants(float(np.linalg.det(C)), I2, I3, 0.5 * (I2 * I2 - I3))


def local_invariants_arrays(C):
    """(I1, I2, I3, I4) for a ``(..., 3, 3)`` stack."""
    I2 = np.trace(C, axis1=-2, axis2=-1)
    I3 = np.einsum("...ij,...ji->...", C, C)
    return np.linalg.det(C), I2, I3, 0.5 * (I2 * I2 - I3)


def invariant_witness(inv: LocalInvariants):
    """Sufficient entanglement test ``I1 < 0 or I4 < 0``."""
    return inv.I1 < 0 or inv.I4 < 0


class Case(str, enum.Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    NOT_ENTANGLED = "NotEntangled"


@dataclass(frozen=True)
class CaseLabel:
    label: Case
    eigenvalues: tuple


def case_from_eigenvalues(c, tol=DEFAULT_TOL):
    """Sign-pattern label of an ascending eigenvalue triple."""
    neg = int(np.sum(c < -tol))
    zero = int(np.sum(np.abs(c) <= tol))
    if neg == 3:
        return None
    if neg == 0:
        return Case.NOT_ENTANGLED
    if neg == 2:
        return Case.CASE_II
    return Case.CASE_I if zero else Case.CASE_III


def classify_case(C, tol=DEFAULT_TOL):
    """Which of the three entangled sign patterns the eigenvalues of ``C`` follow."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    C = as_real_symmetric(C)
    c = eigvalsh_batch(C)
    label = case_from_eigenvalues(c, tol)
    if label is None:
        raise ThreeNegative(f"all eigenvalues of C are negative: {c}")
    inv = local_invariants(C)
    if label in (Case.CASE_I, Case.CASE_II) and not inv.I4 < 0:
        raise ConsistencyFailure(f"{label.value} with I4 = {inv.I4:.3e} >= 0")
    if label is Case.CASE_III and not inv.I1 < 0:
        raise ConsistencyFailure(f"CaseIII with I1 = {inv.I1:.3e} >= 0")
    if label is Case.NOT_ENTANGLED and inv.I1 < -tol**3:
        raise ConsistencyFailure(f"no negative eigenvalue but I1 = {inv.I1:.3e}")
    return CaseLabel(label, tuple(float(x) for x in c))
