"""Two-mode continuous-variable covariance matrices and Simon's separability test.

Quadratures are ordered ``(q1, p1, q2, p2)`` with ``hbar = 1`` so the vacuum
covariance is ``I/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NotSymplectic, Unphysical
from .linalg import as_real_symmetric, eigvalsh_hermitian_batch
from .verdict import DEFAULT_TOL, Verdict

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.kron(np.eye(2), J2)
# mirror reflection p2 -> -p2 realises the partial transpose on mode 2
REFLECT = np.diag([1.0, 1.0, 1.0, -1.0])
UNPHYSICAL_TOL = 1e-8


@dataclass(frozen=True)
class CvCovariance:
    V: np.ndarray

    def __post_init__(self):
        V = as_real_symmetric(self.V)
        if V.shape != (4, 4):
            raise ValueError("two-mode covariance must be 4x4")
        object.__setattr__(self, "V", V)

    @property
    def A(self):
        return self.V[:2, :2]

    @property
    def B(self):
        return self.V[2:, 2:]

    @property
    def C(self):
        return self.V[:2, 2:]

    @classmethod
    def from_blocks(cls, A, B, C):
        return cls(np.block([[A, C], [np.transpose(C), B]]))


@dataclass(frozen=True)
class CvInvariants:
    I1: float
    I2: float
    I3: float
    I4: float


def uncertainty_min(V):
    """Smallest eigenvalue of ``V + (i/2) Omega``; negative means unphysical."""
    return float(eigvalsh_hermitian_batch(np.asarray(V) + 0.5j * OMEGA)[0])


def cv_invariants(V, i4_form="standard"):
    """Determinants of the blocks plus the trace invariant.

    ``i4_form="standard"`` uses ``Tr(A J C J B J C^T J)``; ``"printed"`` uses the
    variant ``Tr(A J C B C^T J)``, which is not the invariant that makes the
    Simon inequality sharp (kept for comparison).
    """
    A, B, C = V.A, V.B, V.C
    if i4_form == "standard":
        I4 = np.trace(A @ J2 @ C @ J2 @ B @ J2 @ C.T @ J2)
    elif i4_form == "printed":
        I4 = np.trace(A @ J2 @ C @ B @ C.T @ J2)
    else:
        raise ValueError(f"unknown i4_form {i4_form!r}")
    return CvInvariants(float(np.linalg.det(A)), float(np.linalg.det(B)),
                        float(np.linalg.det(C)), float(I4))


def simon_margin(V, i4_form="standard"):
    inv = cv_invariants(V, i4_form)
    return inv.I1 * inv.I2 + (0.25 - abs(inv.I3)) ** 2 - inv.I4 - 0.25 * (inv.I1 + inv.I2)


def simon_criterion(V, tol=DEFAULT_TOL, i4_form="standard"):
    """Separability inequality on the invariants; the decisive value is LHS - RHS."""
    lam = uncertainty_min(V.V)
    if lam < -UNPHYSICAL_TOL:
        raise Unphysical(f"V + i Omega/2 has eigenvalue {lam:.3e}")
    return Verdict.from_margin(simon_margin(V, i4_form), tol, boundary="separable")


def gaussian_ppt_oracle(V, tol=DEFAULT_TOL):
    """Entangled iff the mirror-reflected covariance violates the uncertainty relation."""
    Vt = REFLECT @ V.V @ REFLECT
    return Verdict.from_margin(uncertainty_min(Vt), tol)


def _check_det1(S, name):
    S = np.asarray(S, dtype=np.float64)
    if S.shape != (2, 2) or abs(np.linalg.det(S) - 1.0) > 1e-12:
        raise NotSymplectic(f"{name} must be a real 2x2 matrix with unit determinant")
    return S


def apply_local_symplectic(V, S1, S2):
    S = np.zeros((4, 4))
    S[:2, :2] = _check_det1(S1, "S1")
    S[2:, 2:] = _check_det1(S2, "S2")
    return CvCovariance(S @ V.V @ S.T)


def vacuum():
    return CvCovariance(0.5 * np.eye(4))


def two_mode_squeezed(r):
    ch, sh = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    return CvCovariance.from_blocks(ch * np.eye(2), ch * np.eye(2), sh * np.diag([1.0, -1.0]))


def random_local_symplectic(rng):
    """Random element of Sp(2, R): rotation, squeeze, rotation."""
    def rot(a):
        return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    r = rng.normal(scale=0.7)
    return rot(rng.uniform(0, 2 * np.pi)) @ np.diag([np.exp(r), np.exp(-r)]) @ rot(rng.uniform(0, 2 * np.pi))


def random_symplectic(rng, scale=0.6):
    """``expm(Omega H)`` for a random symmetric ``H``; always in Sp(4, R)."""
    H = rng.normal(scale=scale, size=(4, 4))
    return expm(OMEGA @ (H + H.T) / 2)


def random_covariance(rng):
    """Random physical two-mode covariance ``S diag(n1, n1, n2, n2) S^T`` with ``n >= 1/2``."""
    nu = 0.5 + rng.exponential(0.4, size=2)
    S = random_symplectic(rng)
    V = S @ np.diag([nu[0], nu[0], nu[1], nu[1]]) @ S.T
    return CvCovariance(0.5 * (V + V.T))


@dataclass
class CvSweepReport:
    total: int = 0
    agreements: int = 0
    disagreements: list = None
    ambiguous: int = 0
    entangled: int = 0
    printed_form_disagreements: int = 0

    def to_dict(self):
        return {
            "total": self.total, "agreements": self.agreements,
            "disagreements": self.disagreements, "ambiguous": self.ambiguous,
            "entangled": self.entangled,
            "printed_form_disagreements": self.printed_form_disagreements,
        }


def cv_equivalence_sweep(count, seed, tol=DEFAULT_TOL, band=1e-8):
    """Compare Simon's inequality with the reflection oracle on random covariances.

    A sample counts only if both decisive values lie outside ``[-band, band]``.
    Disagreements of the printed-``I4`` variant with the oracle are tallied
    separately.
    """
    rng = np.random.default_rng(seed)
    report = CvSweepReport(disagreements=[])
    for k in range(count):
        V = random_covariance(rng)
        simon = simon_criterion(V, tol)
        ppt = gaussian_ppt_oracle(V, tol)
        report.total += 1
        if abs(simon.decisive_value) <= band or abs(ppt.decisive_value) <= band:
            report.ambiguous += 1
            continue
        report.entangled += ppt.entangled
        if simon.entangled == ppt.entangled:
            report.agreements += 1
        else:
            report.disagreements.append({"index": k, "V": V.V.tolist(),
                                         "simon": simon.decisive_value,
                                         "ppt": ppt.decisive_value})
        if (simon_margin(V, "printed") < 0) != ppt.entangled:
            report.printed_form_disagreements += 1
    return report
