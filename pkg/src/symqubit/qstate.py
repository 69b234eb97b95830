"""Two-qubit states, their Bloch/Pauli coordinates and the symmetric-subspace forms.

Conventions (fixed for the whole package):

* computational basis ordered ``|uu>, |ud>, |du>, |dd>`` with ``|u>`` the
  +1 eigenvector of ``sigma_z``;
* ``sigma_y = [[0, -i], [i, 0]]``;
* the symmetric (triplet) subspace is spanned by ``|1,1> = |uu>``,
  ``|1,0> = (|ud> + |du>)/sqrt(2)``, ``|1,-1> = |dd>``, in that order.

Array-level helpers (``*_arrays``) accept arbitrary leading batch dimensions
and are what the ensemble sweeps use; the dataclass API wraps them with
validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImaginaryResidue, NotPositive, NotSymmetric
from .linalg import as_hermitian, as_real_symmetric, eigvalsh_hermitian_batch

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)

SIGMA1 = np.array([np.kron(p, I2) for p in PAULI])
SIGMA2 = np.array([np.kron(I2, p) for p in PAULI])
SIGMA12 = np.array([[np.kron(a, b) for b in PAULI] for a in PAULI])

_R2 = 1.0 / np.sqrt(2.0)
KET_11 = np.array([1, 0, 0, 0], dtype=np.complex128)
KET_10 = np.array([0, _R2, _R2, 0], dtype=np.complex128)
KET_1M1 = np.array([0, 0, 0, 1], dtype=np.complex128)
KET_00 = np.array([0, _R2, -_R2, 0], dtype=np.complex128)

# columns |1,1>, |1,0>, |1,-1>
SYM_BASIS = np.stack([KET_11, KET_10, KET_1M1], axis=1)

# |X>, |Y>, |Z>, |0,0>.  The partial transpose used below is the literal
# transpose on qubit 2, which differs from a full sign flip of sigma_2 by the
# local unitary I (x) sigma_y; that unitary is folded into the basis, and with
# this sigma_y convention |Y> carries +i rather than -i.
_KET_X = -_R2 * (KET_11 - KET_1M1)
_KET_Y = 1j * _R2 * (KET_11 + KET_1M1)
PT_BASIS = np.kron(I2, PAULI[1]) @ np.stack([_KET_X, _KET_Y, KET_10, KET_00], axis=1)

BLOCH_TOL = 1e-9
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
IMAG_TOL = 1e-10
SYMMETRY_TOL = 1e-9


def _frozen(a, dtype=np.float64):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BlochParams:
    s1: np.ndarray
    s2: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "s1", _frozen(self.s1))
        object.__setattr__(self, "s2", _frozen(self.s2))
        object.__setattr__(self, "T", _frozen(self.T))
        if self.s1.shape != (3,) or self.s2.shape != (3,) or self.T.shape != (3, 3):
            raise ValueError("BlochParams needs two 3-vectors and a 3x3 matrix")
        for name, vec in (("s1", self.s1), ("s2", self.s2)):
            if np.linalg.norm(vec) > 1 + BLOCH_TOL:
                raise ValueError(f"|{name}| = {np.linalg.norm(vec):.6g} exceeds 1")
        if np.max(np.abs(self.T)) > 1 + BLOCH_TOL:
            raise ValueError("correlation entries must lie in [-1, 1]")


@dataclass(frozen=True)
class SymmetricParams:
    """Exchange-symmetric coordinates: mean spin ``s`` and unit-trace symmetric ``T``."""

    s: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        s = _frozen(self.s)
        T = np.array(self.T, dtype=np.float64)
        if s.shape != (3,) or T.shape != (3, 3):
            raise ValueError("SymmetricParams needs a 3-vector and a 3x3 matrix")
        if np.max(np.abs(T - T.T)) > 1e-10:
            raise ValueError("T must be symmetric")
        if abs(np.trace(T) - 1.0) > 1e-10:
            raise ValueError(f"trace(T) = {np.trace(T):.12g}, expected 1")
        if np.linalg.norm(s) > 1 + BLOCH_TOL:
            raise ValueError(f"|s| = {np.linalg.norm(s):.6g} exceeds 1")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "T", _frozen(0.5 * (T + T.T)))

    def to_bloch(self):
        return BlochParams(self.s, self.s, self.T)


@dataclass(frozen=True)
class TwoQubitDensity:
    rho: np.ndarray

    def __post_init__(self):
        rho = as_hermitian(self.rho)
        if rho.shape != (4, 4):
            raise ValueError(f"two-qubit density matrix must be 4x4, got {rho.shape}")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr:.15g} differs from 1")
        lam = eigvalsh_hermitian_batch(rho)[0]
        if lam < -PSD_TOL:
            raise NotPositive(f"density matrix has eigenvalue {lam:.3e}")
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class MixtureSpec:
    """Weights ``p_w`` and single-qubit Bloch vectors ``s_w`` of a separable symmetric mixture."""

    weights: np.ndarray
    bloch_vectors: np.ndarray

    def __post_init__(self):
        p = _frozen(self.weights)
        sw = _frozen(np.atleast_2d(self.bloch_vectors))
        if p.ndim != 1 or sw.shape != (p.size, 3):
            raise ValueError("need one 3-vector per weight")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("weights must lie in [0, 1]")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {p.sum():.15g}")
        if np.any(np.linalg.norm(sw, axis=1) > 1 + 1e-12):
            raise ValueError("Bloch vectors must lie in the unit ball")
        object.__setattr__(self, "weights", p)
        object.__setattr__(self, "bloch_vectors", sw)


# -- array level -----------------------------------------------------------

def bloch_arrays(rho):
    """(s1, s2, T) for a ``(..., 4, 4)`` stack, returned complex."""
    s1 = np.einsum("...ab,iba->...i", rho, SIGMA1)
    s2 = np.einsum("...ab,iba->...i", rho, SIGMA2)
    T = np.einsum("...ab,ijba->...ij", rho, SIGMA12)
    return s1, s2, T


def density_arrays(s1, s2, T):
    """Inverse of :func:`bloch_arrays` for real parameter stacks."""
    rho = np.einsum("...i,iab->...ab", s1, SIGMA1)
    rho = rho + np.einsum("...i,iab->...ab", s2, SIGMA2)
    rho = rho + np.einsum("...ij,ijab->...ab", T, SIGMA12)
    return 0.25 * (rho + np.eye(4))


def partial_transpose_arrays(rho):
    """Transpose on the second qubit of a ``(..., 4, 4)`` stack."""
    lead = rho.shape[:-2]
    r = rho.reshape(*lead, 2, 2, 2, 2)
    return np.swapaxes(r, -3, -1).reshape(*lead, 4, 4)


def c_matrix_arrays(s, T):
    return T - s[..., :, None] * s[..., None, :]


def product_arrays(bloch_vectors):
    """``rho_w (x) rho_w`` for a ``(..., 3)`` stack of single-qubit Bloch vectors."""
    single = 0.5 * (I2 + np.einsum("...i,iab->...ab", bloch_vectors, PAULI))
    lead = single.shape[:-2]
    return np.einsum("...ab,...cd->...acbd", single, single).reshape(*lead, 4, 4)


# -- public operations -----------------------------------------------------

def pauli_decompose(rho):
    """Bloch coordinates ``s1, s2, T`` of a two-qubit state."""
    r = rho.rho if isinstance(rho, TwoQubitDensity) else TwoQubitDensity(rho).rho
    s1, s2, T = bloch_arrays(r)
    worst = max(np.max(np.abs(s1.imag)), np.max(np.abs(s2.imag)), np.max(np.abs(T.imag)))
    if worst > IMAG_TOL:
        raise ImaginaryResidue(f"Pauli expectation has imaginary part {worst:.3e}")
    return BlochParams(s1.real, s2.real, T.real)


def pauli_compose(p):
    rho = density_arrays(np.asarray(p.s1), np.asarray(p.s2), np.asarray(p.T))
    rho = as_hermitian(rho)
    lam = eigvalsh_hermitian_batch(rho)[0]
    if lam < -PSD_TOL:
        raise NotPositive(f"parameters give eigenvalue {lam:.3e}; not a physical state")
    return TwoQubitDensity(rho)


def to_symmetric(p, tol=SYMMETRY_TOL):
    """Check the exchange-symmetry constraints and return ``SymmetricParams``.

    States violating any constraint by more than ``tol`` are rejected rather
    than projected; symmetrise explicitly beforehand if that is intended.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    residuals = {
        "s1 - s2": float(np.linalg.norm(p.s1 - p.s2)),
        "T - T^T": float(np.linalg.norm(p.T - p.T.T)),
        "trace(T) - 1": float(abs(np.trace(p.T) - 1.0)),
    }
    name, worst = max(residuals.items(), key=lambda kv: kv[1])
    if worst > tol:
        raise NotSymmetric(f"state is not exchange symmetric: |{name}| = {worst:.3e}", worst)
    T = 0.5 * (p.T + p.T.T)
    T = T + (1.0 - np.trace(T)) / 3.0 * np.eye(3)
    return SymmetricParams(0.5 * (p.s1 + p.s2), T)


def schmidt_pure(kappa1):
    """``kappa1 |uu> + kappa2 |dd>`` with ``kappa2 = sqrt(1 - kappa1**2)``."""
    kappa1 = float(kappa1)
    if not 0.0 < kappa1 < 1.0:
        raise ValueError(f"kappa1 must lie in (0, 1), got {kappa1}")
    kappa2 = np.sqrt(1.0 - kappa1 * kappa1)
    psi = kappa1 * KET_11 + kappa2 * KET_1M1
    return TwoQubitDensity(np.outer(psi, psi.conj()))


def separable_symmetric(m):
    rho = np.einsum("w,wab->ab", m.weights, product_arrays(m.bloch_vectors))
    return TwoQubitDensity(rho)


def mixture_moments(m):
    """(s, T) of a separable mixture evaluated directly from its ingredients."""
    s = m.weights @ m.bloch_vectors
    T = np.einsum("w,wi,wj->ij", m.weights, m.bloch_vectors, m.bloch_vectors)
    return s, T


def partial_transpose(rho):
    r = rho.rho if isinstance(rho, TwoQubitDensity) else as_hermitian(rho)
    return as_hermitian(partial_transpose_arrays(r))


def symmetric_subspace_form(p):
    """The 3x3 density matrix in the ``|1,1>, |1,0>, |1,-1>`` basis.

    Computed by projecting the composed 4x4 state onto the triplet basis.
    """
    rho = pauli_compose(p.to_bloch()).rho
    rho_s = as_hermitian(SYM_BASIS.conj().T @ rho @ SYM_BASIS)
    lam = eigvalsh_hermitian_batch(rho_s)[0]
    if lam < -PSD_TOL:
        raise NotPositive(f"symmetric block has eigenvalue {lam:.3e}")
    return rho_s


def symmetric_subspace_closed_form(p):
    """Closed-form 3x3 block in terms of ``s`` and ``T`` (a cross-check target)."""
    s, T = p.s, p.T
    a = np.sqrt(2.0) * (s[0] + 1j * s[1])
    b = np.sqrt(2.0) * (T[0, 2] + 1j * T[1, 2])
    d = T[0, 0] - T[1, 1]
    return 0.25 * np.array([
        [1 + 2 * s[2] + T[2, 2], np.conj(a) + np.conj(b), d - 2j * T[0, 1]],
        [a + b, 2 * (T[0, 0] + T[1, 1]), np.conj(a) - np.conj(b)],
        [d + 2j * T[0, 1], a - b, 1 - 2 * s[2] + T[2, 2]],
    ])


def pt_block_form(p):
    """``1/2 [[T, s], [s^T, 1]]``: the partial transpose in the ``PT_BASIS`` frame."""
    m = np.empty((4, 4))
    m[:3, :3] = p.T
    m[:3, 3] = p.s
    m[3, :3] = p.s
    m[3, 3] = 1.0
    return as_real_symmetric(0.5 * m)


def pt_in_block_basis(rho):
    """Partial transpose of ``rho`` conjugated into the ``PT_BASIS`` frame."""
    return PT_BASIS.conj().T @ partial_transpose(rho) @ PT_BASIS


def congruence_reduce(ptb, s):
    """``L ptb L^T`` with ``L = [[I, -s], [0, 1]]``; gives ``1/2 blockdiag(C, 1)``."""
    L = np.eye(4)
    L[:3, 3] = -np.asarray(s, dtype=np.float64)
    return as_real_symmetric(L @ np.asarray(ptb) @ L.T)
