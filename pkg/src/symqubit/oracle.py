"""Ground-truth oracles, random symmetric ensembles and the equivalence sweep.

Randomness: sample ``k`` of an ensemble is drawn from chunk ``k // CHUNK``,
whose generator is ``default_rng(SeedSequence(seed, spawn_key=(chunk,)))``.
Chunks are independent streams, so a sweep can be split across workers at
chunk boundaries and merged without changing a single bit of the result.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .collective import moments_arrays
from .covariance import covariance_blocks
from .errors import NotSymmetric
from .invariants import Case, case_from_eigenvalues, local_invariants_arrays, random_su2, su2_to_so3
from .linalg import eigvalsh_batch, eigvalsh_hermitian_batch
from .qstate import (
    KET_11, KET_1M1, SYM_BASIS, MixtureSpec, SymmetricParams, TwoQubitDensity, bloch_arrays,
    c_matrix_arrays, partial_transpose, partial_transpose_arrays, pauli_decompose, product_arrays,
)
from .verdict import DEFAULT_TOL, Verdict

CHUNK = 1024
BAND_FACTOR = 10.0
HIST_EDGES = np.linspace(-0.5, 1.0, 31)


class EnsembleKind(str, enum.Enum):
    PURE = "PureSymmetric"
    MIXED = "MixedSymmetric"
    SEPARABLE = "SeparableSymmetric"


@dataclass(frozen=True)
class EnsembleSpec:
    kind: EnsembleKind
    count: int
    seed: int
    rank: int | None = None   # mixed only; None draws the rank uniformly from 1..3
    terms: int = 4            # separable only

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.rank is not None and not 1 <= self.rank <= 3:
            raise ValueError("rank must lie in 1..3")
        if self.terms < 1:
            raise ValueError("terms must be at least 1")


def ppt_oracle(rho, tol=DEFAULT_TOL):
    """Entangled iff the partial transpose has an eigenvalue below ``-tol``."""
    lam = float(eigvalsh_hermitian_batch(partial_transpose(rho))[0])
    return Verdict.from_margin(lam, tol)


# -- ensembles -------------------------------------------------------------

def chunk_rng(seed, chunk):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _embed(rho_s):
    return SYM_BASIS @ rho_s @ SYM_BASIS.conj().T


def pure_batch(rng, n):
    psi = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    return _embed(psi[:, :, None] * psi[:, None, :].conj())


def mixed_batch(rng, n, rank=None):
    G = rng.standard_normal((n, 3, 3)) + 1j * rng.standard_normal((n, 3, 3))
    ranks = rng.integers(1, 4, size=n) if rank is None else np.full(n, rank)
    G = G * (np.arange(3)[None, None, :] < ranks[:, None, None])
    rho_s = G @ np.swapaxes(G, -1, -2).conj()
    rho_s /= np.trace(rho_s, axis1=-2, axis2=-1).real[:, None, None]
    return _embed(rho_s)


def separable_params_batch(rng, n, terms, pure_components=False):
    weights = rng.dirichlet(np.ones(terms), size=n)
    direction = rng.standard_normal((n, terms, 3))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    radius = rng.uniform(0.0, 1.0, size=(n, terms, 1))
    if pure_components:
        radius = np.ones_like(radius)
    return weights, direction * radius


def separable_batch(rng, n, terms, pure_components=False):
    """Mixtures of ``rho_w (x) rho_w``; triplet-supported iff every component is pure."""
    weights, vectors = separable_params_batch(rng, n, terms, pure_components)
    return np.einsum("nw,nwab->nab", weights, product_arrays(vectors))


def random_symmetric_pure(seed):
    return TwoQubitDensity(pure_batch(np.random.default_rng(seed), 1)[0])


def random_symmetric_mixed(seed, rank=3):
    return TwoQubitDensity(mixed_batch(np.random.default_rng(seed), 1, rank)[0])


def random_separable_symmetric(seed, terms=4):
    weights, vectors = separable_params_batch(np.random.default_rng(seed), 1, terms)
    w = weights[0]
    return MixtureSpec(w / w.sum(), vectors[0])


def ensemble_chunk(spec, chunk):
    start = chunk * CHUNK
    n = min(CHUNK, spec.count - start)
    rng = chunk_rng(spec.seed, chunk)
    if spec.kind is EnsembleKind.PURE:
        return pure_batch(rng, n)
    if spec.kind is EnsembleKind.MIXED:
        return mixed_batch(rng, n, spec.rank)
    return separable_batch(rng, n, spec.terms)


# -- batch evaluation ------------------------------------------------------

def evaluate_batch(rho, tol=DEFAULT_TOL, unit_trace=True):
    """All decisive margins for a ``(n, 4, 4)`` stack of exchange-symmetric states.

    ``unit_trace=False`` admits exchange-invariant states outside the triplet
    subspace (separable mixtures of mixed products). The Korbicz margin needs
    the N = 2 Dicke embedding and is NaN for such samples.
    """
    s1, s2, T = (x.real for x in bloch_arrays(rho))
    checks = [
        np.linalg.norm(s1 - s2, axis=-1),
        np.linalg.norm(T - np.swapaxes(T, -1, -2), axis=(-2, -1)),
    ]
    if unit_trace:
        checks.append(np.abs(np.trace(T, axis1=-2, axis2=-1) - 1.0))
    resid = np.max(np.stack(checks), axis=0)
    if np.any(resid > 1e-9):
        k = int(np.argmax(resid))
        raise NotSymmetric(f"sample {k} is not exchange symmetric ({resid[k]:.3e})", resid[k])
    s = 0.5 * (s1 + s2)
    T = 0.5 * (T + np.swapaxes(T, -1, -2))
    C = c_matrix_arrays(s, T)
    c_eigs = eigvalsh_batch(C)
    ppt_min = eigvalsh_hermitian_batch(partial_transpose_arrays(rho))[:, 0]
    I1, I2, I3, I4 = local_invariants_arrays(C)
    rho_s = SYM_BASIS.conj().T @ rho @ SYM_BASIS
    S, second = moments_arrays(rho_s, 2)
    shifted = second - 0.5 * S[:, :, None] * S[:, None, :]
    korbicz = eigvalsh_batch(shifted)[:, 0] - 0.5
    in_triplet = np.abs(np.trace(rho_s, axis1=-2, axis2=-1).real - 1.0) <= 1e-10
    korbicz = np.where(in_triplet, korbicz, np.nan)
    cases = [case_from_eigenvalues(c, tol) for c in c_eigs]
    return {
        "s": s, "T": T, "c_eigs": c_eigs, "c_min": c_eigs[:, 0], "ppt_min": ppt_min,
        "I1": I1, "I2": I2, "I3": I3, "I4": I4,
        "witness": np.minimum(I1, I4), "korbicz": korbicz, "case": cases,
    }


@dataclass
class SweepReport:
    total: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    indeterminate_count: int = 0
    case_tallies: dict = field(default_factory=lambda: {c.value: 0 for c in Case})
    three_negative: int = 0
    entangled: int = 0
    implication_violations: int = 0
    min_separable_c: float = np.inf
    histogram: np.ndarray = field(default_factory=lambda: np.zeros(len(HIST_EDGES) + 1, dtype=int))

    def merge(self, other):
        self.total += other.total
        self.agreements += other.agreements
        self.disagreements.extend(other.disagreements)
        self.indeterminate_count += other.indeterminate_count
        for key, value in other.case_tallies.items():
            self.case_tallies[key] += value
        self.three_negative += other.three_negative
        self.entangled += other.entangled
        self.implication_violations += other.implication_violations
        self.min_separable_c = min(self.min_separable_c, other.min_separable_c)
        self.histogram = self.histogram + other.histogram
        return self

    def to_dict(self):
        return {
            "total": self.total,
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "indeterminate_count": self.indeterminate_count,
            "case_tallies": dict(self.case_tallies),
            "three_negative": self.three_negative,
            "entangled": self.entangled,
            "implication_violations": self.implication_violations,
            "min_separable_c": None if np.isinf(self.min_separable_c) else self.min_separable_c,
            "margins_histogram": {
                "edges": HIST_EDGES.tolist(),
                "counts": self.histogram.tolist(),
                "note": "first/last counts are under/overflow",
            },
        }


def _status(ev, tol):
    """Per-sample 'agree' / 'disagree' / 'indeterminate'.

    Samples whose C-test or PPT margin lies within ``BAND_FACTOR * tol`` of
    zero are indeterminate. Otherwise every test whose own margin is outside
    the band must match the C-test sign.
    """
    band = BAND_FACTOR * tol
    c_ent = ev["c_min"] < 0
    ambiguous = (np.abs(ev["c_min"]) <= band) | (np.abs(ev["ppt_min"]) <= band)
    conflict = np.zeros_like(c_ent)
    for key in ("ppt_min", "witness", "korbicz"):
        m = ev[key]  # NaN margins never count as conflicts
        conflict |= (np.abs(m) > band) & ((m < 0) != c_ent)
    return np.where(ambiguous, "indeterminate", np.where(conflict, "disagree", "agree"))


def report_from_batch(ev, status, offset, tol):
    rep = SweepReport()
    rep.total = len(status)
    rep.agreements = int(np.sum(status == "agree"))
    rep.indeterminate_count = int(np.sum(status == "indeterminate"))
    for k in np.nonzero(status == "disagree")[0]:
        rep.disagreements.append({
            "index": int(offset + k), "s": ev["s"][k].tolist(), "T": ev["T"][k].tolist(),
            "c_min": float(ev["c_min"][k]), "ppt_min": float(ev["ppt_min"][k]),
            "witness": float(ev["witness"][k]), "korbicz": float(ev["korbicz"][k]),
        })
    for k, case in enumerate(ev["case"]):
        if case is None:
            rep.three_negative += 1
            continue
        rep.case_tallies[case.value] += 1
        if case is Case.NOT_ENTANGLED:
            rep.min_separable_c = min(rep.min_separable_c, float(ev["c_min"][k]))
            continue
        rep.entangled += 1
        if case in (Case.CASE_I, Case.CASE_II) and not ev["I4"][k] < 0:
            rep.implication_violations += 1
        if case is Case.CASE_III and not ev["I1"][k] < 0:
            rep.implication_violations += 1
    rep.histogram = np.bincount(np.digitize(ev["c_min"], HIST_EDGES), minlength=len(HIST_EDGES) + 1)
    return rep


def iter_sweep(spec, tol=DEFAULT_TOL):
    """Yield ``(offset, evaluation, status)`` per chunk."""
    n_chunks = -(-spec.count // CHUNK)
    for chunk in range(n_chunks):
        unit_trace = spec.kind is not EnsembleKind.SEPARABLE
        ev = evaluate_batch(ensemble_chunk(spec, chunk), tol, unit_trace)
        yield chunk * CHUNK, ev, _status(ev, tol)


def equivalence_sweep(spec, tol=DEFAULT_TOL):
    """C-test vs PPT vs invariant witness vs Korbicz margin over an ensemble."""
    report = SweepReport()
    for offset, ev, status in iter_sweep(spec, tol):
        report.merge(report_from_batch(ev, status, offset, tol))
    return report


CSV_HEADER = ["index", "c_min", "ppt_min", "I1", "I2", "I3", "I4", "witness_margin",
              "korbicz_margin", "c_verdict", "ppt_verdict", "case", "status"]


def write_sweep_csv(spec, path, tol=DEFAULT_TOL):
    """Stream one CSV row per sample and return the merged :class:`SweepReport`."""
    report = SweepReport()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for offset, ev, status in iter_sweep(spec, tol):
            report.merge(report_from_batch(ev, status, offset, tol))
            for k in range(len(status)):
                writer.writerow([
                    offset + k,
                    *(repr(float(ev[key][k])) for key in
                      ("c_min", "ppt_min", "I1", "I2", "I3", "I4", "witness", "korbicz")),
                    Verdict.from_margin(ev["c_min"][k], tol).outcome.value,
                    Verdict.from_margin(ev["ppt_min"][k], tol).outcome.value,
                    ev["case"][k].value if ev["case"][k] is not None else "ThreeNegative",
                    status[k],
                ])
    return report


# -- Werner family ---------------------------------------------------------

def werner_state(p):
    """``p |Phi+><Phi+| + (1 - p) I/4``."""
    phi = (KET_11 + KET_1M1) / np.sqrt(2.0)
    return TwoQubitDensity(p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4)


def symmetric_werner_state(p):
    """``p |Phi+><Phi+| + (1 - p) P_sym / 3``, the analogue inside the triplet subspace."""
    phi = (KET_11 + KET_1M1) / np.sqrt(2.0)
    proj = SYM_BASIS @ SYM_BASIS.conj().T
    return TwoQubitDensity(p * np.outer(phi, phi.conj()) + (1 - p) * proj / 3)


def _ctest_margin(rho):
    """Smallest eigenvalue of the cross block ``T - s1 s2^T`` (symmetrised)."""
    C = covariance_blocks(pauli_decompose(rho)).C
    return float(eigvalsh_batch(0.5 * (C + C.T))[0])


def entanglement_threshold(family, method, xtol=1e-10):
    """Bisect for the mixing weight where ``family(p)`` becomes entangled.

    ``method`` is ``"ppt"`` (partial transpose) or ``"ctest"`` (C block).
    Assumes ``family(0)`` is not flagged and ``family(1)`` is.
    """
    margin = {"ppt": lambda r: ppt_oracle(r).decisive_value, "ctest": _ctest_margin}[method]
    lo, hi = 0.0, 1.0
    if margin(family(hi)) >= 0:
        raise ValueError("family is not flagged entangled at p = 1")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if margin(family(mid)) < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# -- case exemplars --------------------------------------------------------

def _near_product_candidates(rng, n):
    """Random symmetric states close to a product state, optionally with separable noise."""
    scale = 10.0 ** rng.uniform(-8, -1, size=n)
    base = np.zeros(3, dtype=np.complex128)
    base[0] = 1.0
    kick = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
    psi = base + scale[:, None] * kick
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    rho_s = psi[:, :, None] * psi[:, None, :].conj()
    q = np.where(rng.uniform(size=n) < 0.5, 0.0, 10.0 ** rng.uniform(-14, -4, size=n))
    noise = separable_batch(rng, n, 3, pure_components=True)
    return (1 - q)[:, None, None] * _embed(rho_s) + q[:, None, None] * noise


def search_case_exemplar(case, seed, batches=50, tol=DEFAULT_TOL):
    """Randomised search for a state whose C eigenvalues follow ``case``.

    Candidates mix near-product states, generic mixed states of every rank and
    separable noise, then get an identical random local rotation. Returns the
    first hit as ``SymmetricParams`` (with its eigenvalues) or ``None``.
    """
    case = Case(case)
    rng = np.random.default_rng(seed)
    for _ in range(batches):
        rho = np.concatenate([_near_product_candidates(rng, 512), mixed_batch(rng, 512),
                              pure_batch(rng, 256)])
        ev = evaluate_batch(rho, tol)
        for k, label in enumerate(ev["case"]):
            if label is case:
                O = su2_to_so3(random_su2(rng))
                p = SymmetricParams(O @ ev["s"][k], O @ ev["T"][k] @ O.T)
                return p
    return None
