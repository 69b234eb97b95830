"""Small dense symmetric/Hermitian eigensolvers built on cyclic Jacobi.

Everything here works on plain numpy arrays. Real symmetric input goes
straight to the Jacobi kernel; Hermitian input is embedded as the real
symmetric matrix ``[[Re, -Im], [Im, Re]]`` whose spectrum is the Hermitian
spectrum with every eigenvalue doubled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import NonConvergence, NotHermitian
from ._backend import BACKEND, KERNELS, jacobi_batch

__all__ = [
    "BACKEND", "KERNELS", "EigenDecomposition", "PsdSign", "PsdVerdict",
    "as_real_symmetric", "as_hermitian", "eig_real_symmetric", "eig_hermitian",
    "eigvalsh_batch", "eigh_batch", "eigvalsh_hermitian_batch", "hermitian_embedding",
    "min_eigenvalue", "psd_verdict", "inertia",
]

OFF_TOL = 1e-13
MAX_SWEEPS = 60
SYMMETRY_TOL = 1e-12


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _asymmetry_scale(m):
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def as_real_symmetric(m, tol=SYMMETRY_TOL):
    """Validate a real symmetric matrix, symmetrising sub-``tol`` asymmetry."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag), initial=0.0) > tol:
            raise NotHermitian("expected a real matrix")
        m = m.real
    m = np.array(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.T), initial=0.0))
    if asym > tol * _asymmetry_scale(m):
        raise NotHermitian(f"matrix asymmetry {asym:.3e} exceeds {tol:.0e}")
    m = 0.5 * (m + m.T)
    m.setflags(write=False)
    return m


def as_hermitian(h, tol=SYMMETRY_TOL):
    """Validate a complex Hermitian matrix, Hermitising sub-``tol`` deviation."""
    h = np.array(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {h.shape}")
    dev = float(np.max(np.abs(h - h.conj().T), initial=0.0))
    if dev > tol * _asymmetry_scale(h):
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    h = 0.5 * (h + h.conj().T)
    h.setflags(write=False)
    return h


def _run(stack, want_vectors, backend):
    w, v, sweeps = jacobi_batch(stack, OFF_TOL, MAX_SWEEPS, want_vectors, backend)
    if np.any(sweeps < 0):
        bad = int(np.argmax(sweeps < 0))
        raise NonConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps (matrix {bad})")
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if want_vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w, v


def eigh_batch(stack, backend=None):
    """Ascending eigenpairs of a ``(..., n, n)`` stack of real symmetric matrices."""
    stack = np.asarray(stack, dtype=np.float64)
    lead, n = stack.shape[:-2], stack.shape[-1]
    w, v = _run(stack.reshape(-1, n, n), True, backend)
    return w.reshape(*lead, n), v.reshape(*lead, n, n)


def eigvalsh_batch(stack, backend=None):
    """Ascending eigenvalues of a ``(..., n, n)`` stack of real symmetric matrices."""
    stack = np.asarray(stack, dtype=np.float64)
    lead, n = stack.shape[:-2], stack.shape[-1]
    if stack.size == 0:
        return np.zeros((*lead, n))
    w, _ = _run(stack.reshape(-1, n, n), False, backend)
    return w.reshape(*lead, n)


def hermitian_embedding(h):
    """``[[Re, -Im], [Im, Re]]`` for a ``(..., n, n)`` complex stack."""
    h = np.asarray(h)
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def eigvalsh_hermitian_batch(stack, backend=None):
    """Ascending eigenvalues of a ``(..., n, n)`` Hermitian stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    w2 = eigvalsh_batch(hermitian_embedding(stack), backend)
    return 0.5 * (w2[..., 0::2] + w2[..., 1::2])


def eig_real_symmetric(m, backend=None):
    m = as_real_symmetric(m)
    w, v = _run(m[None], True, backend)
    return EigenDecomposition(w[0], v[0])


def eig_hermitian(h, backend=None):
    """Eigenpairs of a Hermitian matrix via its real embedding.

    Each real eigenvector ``(u, v)`` maps to the complex eigenvector ``u + iv``.
    Degenerate pairs map to complex-parallel vectors, so ``n`` of the ``2n``
    candidates are picked by pivoted complex Gram-Schmidt.
    """
    h = as_hermitian(h)
    n = h.shape[0]
    w2, v2 = _run(hermitian_embedding(h)[None], True, backend)
    w2, v2 = w2[0], v2[0]
    cand = v2[:n, :] + 1j * v2[n:, :]
    basis = []
    resid = cand.copy()
    for _ in range(n):
        norms = np.linalg.norm(resid, axis=0)
        k = int(np.argmax(norms))
        vec = resid[:, k] / norms[k]
        basis.append(vec)
        resid = resid - np.outer(vec, vec.conj() @ resid)
    vecs = np.array(basis).T
    rayleigh = np.einsum("ik,ij,jk->k", vecs.conj(), h, vecs).real
    vecs = vecs[:, np.argsort(rayleigh, kind="stable")]
    return EigenDecomposition(0.5 * (w2[0::2] + w2[1::2]), vecs)


def min_eigenvalue(m, backend=None):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return float(eigvalsh_hermitian_batch(as_hermitian(m), backend)[0])
    return float(eigvalsh_batch(as_real_symmetric(m), backend)[0])


class PsdSign(str, enum.Enum):
    NEGATIVE = "Negative"
    NONNEGATIVE = "NonNegative"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class PsdVerdict:
    sign: PsdSign
    min_eigenvalue: float
    tolerance: float


def psd_verdict(m, tol):
    """Sign of the smallest eigenvalue with a symmetric ``[-tol, tol]`` band."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = min_eigenvalue(m)
    if lam < -tol:
        sign = PsdSign.NEGATIVE
    elif lam > tol:
        sign = PsdSign.NONNEGATIVE
    else:
        sign = PsdSign.INDETERMINATE
    return PsdVerdict(sign, lam, tol)


def inertia(m, zero_band=1e-9):
    """(negative, zero, positive) eigenvalue counts."""
    w = eigvalsh_batch(as_real_symmetric(m))
    return (int(np.sum(w < -zero_band)), int(np.sum(np.abs(w) <= zero_band)),
            int(np.sum(w > zero_band)))
