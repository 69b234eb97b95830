"""Symmetric N-qubit states on the maximal-spin (Dicke) manifold.

States live in the (N+1)-dimensional basis ``|J=N/2, M>`` ordered
``M = N/2, N/2 - 1, ..., -N/2``; basis index ``i`` therefore counts the
number of down spins. For ``N = 2`` this coincides with the two-qubit triplet
basis of :mod:`symqubit.qstate`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyFailure, NotPositive
from .linalg import as_hermitian, eig_hermitian, eigh_batch, eigvalsh_hermitian_batch
from .qstate import SYM_BASIS, SymmetricParams, TwoQubitDensity
from .verdict import DEFAULT_TOL, Verdict

N_CAP = 64
MOMENT_TOL = 1e-8
GRID_SIZE = 4096


@functools.lru_cache(maxsize=None)
def angular_momentum_ops(N):
    """``(Jx, Jy, Jz)`` for spin ``J = N/2``; cached and read-only."""
    if N < 1:
        raise ValueError("N must be at least 1")
    j = N / 2.0
    m = j - np.arange(N + 1)
    jp = np.zeros((N + 1, N + 1))
    # J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>, and m+1 sits one index up
    for i in range(1, N + 1):
        jp[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    jx = (0.5 * (jp + jp.T)).astype(np.complex128)
    jy = -0.5j * (jp - jp.T)
    jz = np.diag(m).astype(np.complex128)
    ops = (jx, jy, jz)
    for op in ops:
        op.setflags(write=False)
    return ops


@dataclass(frozen=True)
class CollectiveState:
    N: int
    rho: np.ndarray

    def __post_init__(self):
        N = int(self.N)
        if N < 2:
            raise ValueError("N must be at least 2")
        rho = as_hermitian(self.rho)
        if rho.shape != (N + 1, N + 1):
            raise ValueError(f"expected a {N + 1}x{N + 1} density matrix, got {rho.shape}")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"trace {tr:.15g} differs from 1")
        lam = eigvalsh_hermitian_batch(rho)[0]
        if lam < -1e-10:
            raise NotPositive(f"density matrix has eigenvalue {lam:.3e}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class CollectiveMoments:
    S: np.ndarray
    VN: np.ndarray
    N: int

    @property
    def shifted(self):
        """``VN + S S^T / N``, the matrix whose spectrum decides pairwise entanglement."""
        return self.VN + np.outer(self.S, self.S) / self.N


def _pure(N, psi):
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return CollectiveState(N, np.outer(psi, psi.conj()))


# -- constructors ----------------------------------------------------------

def dicke(N, k):
    """Dicke state with ``k`` spins up, i.e. ``M = k - N/2``."""
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, {N}]")
    psi = np.zeros(N + 1)
    psi[N - k] = 1.0
    return _pure(N, psi)


def ghz(N):
    psi = np.zeros(N + 1)
    psi[0] = psi[N] = 1.0
    return _pure(N, psi)


def coherent_amplitudes(N, theta, phi):
    i = np.arange(N + 1)
    binom = np.array([math.comb(N, int(k)) for k in i], dtype=np.float64)
    return (np.sqrt(binom) * np.cos(theta / 2) ** (N - i) * np.sin(theta / 2) ** i
            * np.exp(1j * phi * i))


def spin_coherent(N, theta, phi):
    """All spins along ``(sin t cos p, sin t sin p, cos t)``."""
    return _pure(N, coherent_amplitudes(N, theta, phi))


def one_axis_twisted(N, chi_t, theta=np.pi / 2, phi=0.0):
    """``exp(-i chi_t Jz^2)`` applied to a coherent state (default along +x)."""
    m = N / 2.0 - np.arange(N + 1)
    return _pure(N, np.exp(-1j * chi_t * m * m) * coherent_amplitudes(N, theta, phi))


def mixture(states, weights):
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector")
    N = states[0].N
    if any(st.N != N for st in states):
        raise ValueError("all components must share N")
    return CollectiveState(N, sum(w * st.rho for w, st in zip(weights, states)))


def wigner_rotation(N, axis, angle):
    """``exp(-i angle n.J)`` on the Dicke manifold via the eigenbasis of ``n.J``."""
    n = np.asarray(axis, dtype=np.float64)
    n = n / np.linalg.norm(n)
    jx, jy, jz = angular_momentum_ops(N)
    w, v = eig_hermitian(n[0] * jx + n[1] * jy + n[2] * jz)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def rotate(st, axis, angle):
    D = wigner_rotation(st.N, axis, angle)
    return CollectiveState(st.N, D @ st.rho @ D.conj().T)


def random_dicke_state(N, rng, rank=None):
    """Ginibre-style random state ``G G^dag / tr`` of the given rank (random if None)."""
    rng = np.random.default_rng(rng)
    r = int(rng.integers(1, N + 2)) if rank is None else int(rank)
    G = rng.standard_normal((N + 1, r)) + 1j * rng.standard_normal((N + 1, r))
    rho = G @ G.conj().T
    return CollectiveState(N, rho / np.trace(rho).real)


def from_two_qubit(rho):
    """Compress a triplet-supported two-qubit state to the N = 2 Dicke manifold."""
    r = rho.rho if isinstance(rho, TwoQubitDensity) else np.asarray(rho)
    rho_s = SYM_BASIS.conj().T @ r @ SYM_BASIS
    lost = 1.0 - np.trace(rho_s).real
    if abs(lost) > 1e-10:
        raise ValueError(f"state has weight {lost:.3e} outside the symmetric subspace")
    return CollectiveState(2, rho_s)


def to_two_qubit(st):
    if st.N != 2:
        raise ValueError("only N = 2 states embed into two qubits")
    return TwoQubitDensity(SYM_BASIS @ st.rho @ SYM_BASIS.conj().T)


# -- moments and tests -----------------------------------------------------

def moments_arrays(rho, N):
    """``(S, <{J_i, J_j}>/2)`` for a ``(..., N+1, N+1)`` stack."""
    J = np.array(angular_momentum_ops(N))
    S = np.einsum("...ab,iba->...i", rho, J).real
    JJ = np.einsum("iab,jbc->ijac", J, J)
    sym = 0.5 * (JJ + np.swapaxes(JJ, 0, 1))
    second = np.einsum("...ab,ijba->...ij", rho, sym).real
    return S, second


def collective_moments(st):
    S, second = moments_arrays(st.rho, st.N)
    VN = second - np.outer(S, S)
    return CollectiveMoments(S, 0.5 * (VN + VN.T), st.N)


def reduced_two_qubit(st):
    """Pair reduction ``(s, T)`` recovered from the first and second collective moments."""
    N = st.N
    S, second = moments_arrays(st.rho, N)
    s = 2.0 * S / N
    T = ((4.0 / N) * second - np.eye(3)) / (N - 1)
    return SymmetricParams(s, 0.5 * (T + T.T))


def pairwise_margin(mom):
    """``lambda_min(VN + S S^T / N) - N/4`` together with the minimising direction."""
    w, v = eigh_batch(mom.shifted)
    return float(w[0] - mom.N / 4.0), v[:, 0]


def moment_residual(st, mom=None):
    """Frobenius distance between ``VN + S S^T/N`` and ``(N/4)(I + (N-1) C)``."""
    mom = mom or collective_moments(st)
    p = reduced_two_qubit(st)
    C = p.T - np.outer(p.s, p.s)
    target = (st.N / 4.0) * (np.eye(3) + (st.N - 1) * C)
    return float(np.linalg.norm(mom.shifted - target))


def pairwise_test(st, tol=DEFAULT_TOL):
    """Pairwise entanglement iff ``lambda_min(VN + S S^T / N) < N/4 - tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    mom = collective_moments(st)
    resid = moment_residual(st, mom)
    if resid > MOMENT_TOL:
        raise ConsistencyFailure(f"moment/reduction mismatch {resid:.3e}")
    margin, _ = pairwise_margin(mom)
    return Verdict.from_margin(margin, tol, scale=st.N * st.N / 4.0)


def korbicz_inequality(st, n):
    """``(lhs, rhs, holds)`` for ``4 Var(J_n)/N < 1 - 4 <J_n>^2 / N^2``."""
    n = np.asarray(n, dtype=np.float64)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("n must be a unit vector")
    mom = collective_moments(st)
    N = st.N
    mean = float(n @ mom.S)
    var = float(n @ mom.VN @ n)
    lhs = 4.0 * var / N
    rhs = 1.0 - 4.0 * mean * mean / (N * N)
    return lhs, rhs, lhs < rhs


def fibonacci_sphere(count=GRID_SIZE):
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def grid_minimum(M, grid=None):
    """Smallest quadratic form ``n^T M n`` over a direction grid."""
    grid = fibonacci_sphere() if grid is None else grid
    q = np.einsum("ki,ij,kj->k", grid, M, grid)
    k = int(np.argmin(q))
    return float(q[k]), grid[k]


def korbicz_witness_search(st, grid=False):
    """Best witness direction (eigenvector of the smallest eigenvalue) and its margin.

    With ``grid=True`` the exact answer is also bounded by a Fibonacci-sphere
    search; a grid value below the eigenvalue is an inconsistency.
    """
    mom = collective_moments(st)
    margin, n_star = pairwise_margin(mom)
    if grid:
        gmin, _ = grid_minimum(mom.shifted)
        if gmin - mom.N / 4.0 < margin - 1e-10 * max(1.0, mom.N**2):
            raise ConsistencyFailure("grid search beat the smallest eigenvalue")
    return n_star, margin
