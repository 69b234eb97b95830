"""Command-line interface: ``symqubit analyze | sweep | collective | cv-check``.

Exit codes for ``analyze``, ``collective`` and ``cv-check``: 0 separable-consistent,
2 entangled, 3 indeterminate, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import collective as coll
from .covariance import c_matrix, c_negativity_test, covariance_blocks
from .cv_reference import CvCovariance, cv_invariants, gaussian_ppt_oracle, simon_criterion
from .errors import NotSymmetric, SymQubitError
from .invariants import classify_case, invariant_witness, local_invariants
from .linalg import eigvalsh_batch
from .oracle import EnsembleKind, EnsembleSpec, ppt_oracle, write_sweep_csv
from .qstate import (MixtureSpec, SymmetricParams, TwoQubitDensity, pauli_compose, pauli_decompose,
                     schmidt_pure, separable_symmetric, to_symmetric)
from .verdict import DEFAULT_TOL, Outcome, Verdict

REPORT_SCHEMA = "symqubit.report/1"
STATE_SCHEMA = "symqubit.state/1"
EXIT_CODES = {Outcome.SEPARABLE_CONSISTENT: 0, Outcome.ENTANGLED: 2, Outcome.INDETERMINATE: 3}
ENSEMBLES = {"pure": EnsembleKind.PURE, "mixed": EnsembleKind.MIXED, "separable": EnsembleKind.SEPARABLE}


class DocumentError(SymQubitError):
    pass


def number(x):
    """JSON number or exact decimal/rational string such as ``"0.5"`` or ``"1/3"``."""
    if isinstance(x, str):
        try:
            return float(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"cannot parse number {x!r}") from exc
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DocumentError(f"expected a number, got {x!r}")
    return float(x)


def array(x, name):
    try:
        return np.vectorize(number, otypes=[float])(np.array(x, dtype=object))
    except DocumentError as exc:
        raise DocumentError(f"{name}: {exc}") from exc


def complex_matrix(m):
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


# -- state documents -------------------------------------------------------

def _from_constructor(spec):
    name = spec.get("name")
    args = spec.get("args", {})
    num = {k: (number(v) if not isinstance(v, list) else v) for k, v in args.items()}
    if name == "schmidt":
        return schmidt_pure(num["kappa1"])
    if name == "mixture":
        if "components" in args:
            parts = [load_state(doc) for doc in args["components"]]
            weights = array(args["weights"], "weights")
            if all(isinstance(p, coll.CollectiveState) for p in parts):
                return coll.mixture(parts, weights)
            rho = sum(w * p.rho for w, p in zip(weights, parts))
            return type(parts[0])(rho)
        return separable_symmetric(MixtureSpec(array(args["weights"], "weights"),
                                               array(args["bloch_vectors"], "bloch_vectors")))
    if name == "dicke":
        return coll.dicke(int(num["N"]), int(num["k"]))
    if name == "ghz":
        return coll.ghz(int(num["N"]))
    if name == "spin_coherent":
        return coll.spin_coherent(int(num["N"]), num.get("theta", 0.0), num.get("phi", 0.0))
    if name == "one_axis_twisted":
        return coll.one_axis_twisted(int(num["N"]), num["chi_t"], num.get("theta", np.pi / 2),
                                     num.get("phi", 0.0))
    raise DocumentError(f"unknown constructor {name!r}")


def load_state(doc):
    """Parse a state document into a ``TwoQubitDensity`` or ``CollectiveState``."""
    if not isinstance(doc, dict):
        raise DocumentError("state document must be a JSON object")
    present = [k for k in ("density", "symmetric", "constructor") if k in doc]
    if len(present) != 1:
        raise DocumentError(f"exactly one of density/symmetric/constructor required, got {present}")
    kind = present[0]
    if kind == "density":
        dens = doc["density"]
        re = array(dens["re"], "density.re")
        im = array(dens["im"], "density.im") if "im" in dens else np.zeros_like(re)
        if re.shape != im.shape:
            raise DocumentError("density.re and density.im shapes differ")
        rho = re + 1j * im
        if "N" in doc:
            N = int(doc["N"])
            if rho.shape != (N + 1, N + 1):
                raise DocumentError(f"declared N = {N} needs a {N + 1}x{N + 1} matrix, got {rho.shape}")
            return coll.CollectiveState(N, rho)
        if rho.shape != (4, 4):
            raise DocumentError(f"two-qubit density must be 4x4 (declare N for Dicke input), got {rho.shape}")
        return TwoQubitDensity(rho)
    if kind == "symmetric":
        p = SymmetricParams(array(doc["symmetric"]["s"], "s"), array(doc["symmetric"]["T"], "T"))
        return pauli_compose(p.to_bloch())
    return _from_constructor(doc["constructor"])


def state_document(state):
    if isinstance(state, coll.CollectiveState):
        return {"schema": STATE_SCHEMA, "N": state.N, "density": complex_matrix(state.rho)}
    return {"schema": STATE_SCHEMA, "density": complex_matrix(state.rho)}


# -- analysis --------------------------------------------------------------

def _pair_analysis(p, tol):
    """Everything derived from symmetric pair parameters."""
    C = c_matrix(p)
    inv = local_invariants(C)
    return {
        "symmetric_params": {"s": p.s.tolist(), "T": p.T.tolist()},
        "c_matrix": C.tolist(),
        "c_eigenvalues": eigvalsh_batch(C).tolist(),
        "invariants": {"I1": inv.I1, "I2": inv.I2, "I3": inv.I3, "I4": inv.I4},
        "c_test": c_negativity_test(p, tol),
        "case": classify_case(C, tol).label.value,
        "invariant_witness": invariant_witness(inv),
    }


def analyze_state(state, tol=DEFAULT_TOL):
    report = {"schema": REPORT_SCHEMA, "tolerance": tol, "state": state_document(state)}
    if isinstance(state, coll.CollectiveState):
        p = coll.reduced_two_qubit(state)
        pair = _pair_analysis(p, tol)
        c_test, witness = pair.pop("c_test"), pair.pop("invariant_witness")
        mom = coll.collective_moments(state)
        lam = float(eigvalsh_batch(mom.shifted)[0])
        n_star, margin = coll.korbicz_witness_search(state)
        pw = coll.pairwise_test(state, tol)
        report["collective"] = {
            "N": state.N, "S": mom.S.tolist(), "VN": mom.VN.tolist(),
            "lambda_min": lam, "threshold": state.N / 4.0, "margin": margin,
            "moment_residual": coll.moment_residual(state, mom),
            "pairwise": pw.to_dict(),
            "korbicz": {"direction": n_star.tolist(), "margin": margin},
        }
        ppt = ppt_oracle(pauli_compose(p.to_bloch()), tol)
        outcome = pw
        theorem_applies = True
    else:
        bloch = pauli_decompose(state)
        try:
            p = to_symmetric(bloch)
        except NotSymmetric:
            # exchange-invariant mixtures of mixed products sit outside the
            # triplet subspace; report the C block but decide via PPT
            if (np.linalg.norm(bloch.s1 - bloch.s2) > 1e-9
                    or np.linalg.norm(bloch.T - bloch.T.T) > 1e-9):
                raise
            p = None
        ppt = ppt_oracle(state, tol)
        if p is not None:
            pair = _pair_analysis(p, tol)
            c_test, witness = pair.pop("c_test"), pair.pop("invariant_witness")
            outcome = c_test
            theorem_applies = True
            st2 = coll.from_two_qubit(state)
            n_star, margin = coll.korbicz_witness_search(st2)
            report["korbicz"] = {"direction": n_star.tolist(), "margin": margin}
        else:
            # C is reported but not tested: the equivalence needs triplet support
            C = covariance_blocks(bloch).C
            C = 0.5 * (C + C.T)
            inv = local_invariants(C)
            pair = {
                "symmetric_params": None,
                "c_matrix": C.tolist(),
                "c_eigenvalues": eigvalsh_batch(C).tolist(),
                "invariants": {"I1": inv.I1, "I2": inv.I2, "I3": inv.I3, "I4": inv.I4},
                "case": None,
            }
            outcome = ppt
            theorem_applies = False
    report.update(pair)
    report["theorem_applies"] = theorem_applies
    inv = pair["invariants"]
    verdicts = {"ppt": ppt.to_dict(), "c_test": None, "case": None, "invariant_witness": None}
    if theorem_applies:
        verdicts["c_test"] = c_test.to_dict()
        verdicts["case"] = {"label": pair["case"], "decisive_value": pair["c_eigenvalues"][0],
                            "tolerance": tol}
        verdicts["invariant_witness"] = {"entangled": bool(witness),
                                         "decisive_value": min(inv["I1"], inv["I4"]), "tolerance": 0.0}
    korbicz = report.get("collective", report).get("korbicz")
    if korbicz is not None:
        verdicts["korbicz"] = Verdict.from_margin(korbicz["margin"], tol).to_dict()
    report["verdicts"] = verdicts
    report["outcome"] = outcome.outcome.value
    return report, outcome.outcome


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj))


def report_csv(report):
    rows = []
    _flatten("", {k: v for k, v in report.items() if k not in ("state", "input")}, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def _read_json(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from exc


def _emit(report, fmt):
    if fmt == "csv":
        sys.stdout.write(report_csv(report))
    else:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")


def cmd_analyze(args):
    doc = _read_json(args.input)
    state = load_state(doc)
    report, outcome = analyze_state(state, args.tol)
    report["input"] = doc
    _emit(report, args.format)
    return EXIT_CODES[outcome]


def cmd_collective(args):
    if args.n > coll.N_CAP:
        raise DocumentError(f"N = {args.n} exceeds the supported cap of {coll.N_CAP}")
    spec = {"name": args.state, "args": {"N": args.n}}
    if args.state == "dicke":
        spec["args"]["k"] = args.k if args.k is not None else args.n // 2
    elif args.state == "spin_coherent":
        spec["args"].update(theta=args.theta if args.theta is not None else 0.0, phi=args.phi)
    elif args.state == "one_axis_twisted":
        spec["args"].update(chi_t=args.chi_t, theta=args.theta if args.theta is not None else np.pi / 2,
                            phi=args.phi)
    doc = {"constructor": spec}
    report, outcome = analyze_state(load_state(doc), args.tol)
    report["input"] = doc
    _emit(report, args.format)
    return EXIT_CODES[outcome]


def cmd_sweep(args):
    spec = EnsembleSpec(ENSEMBLES[args.ensemble], args.count, args.seed, args.rank, args.terms)
    report = write_sweep_csv(spec, args.out, args.tol)
    summary = {
        "schema": "symqubit.sweep/1",
        "ensemble": spec.kind.value, "count": spec.count, "seed": spec.seed,
        "rank": spec.rank, "terms": spec.terms, "tolerance": args.tol,
        "band": 10 * args.tol, "csv": str(args.out), **report.to_dict(),
    }
    summary_path = args.summary or str(Path(args.out).with_suffix(".json"))
    Path(summary_path).write_text(json.dumps(summary, indent=2) + "\n")
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_cv_check(args):
    doc = _read_json(args.cov)
    V = CvCovariance(array(doc["V"] if isinstance(doc, dict) else doc, "V"))
    inv = cv_invariants(V, args.i4_form)
    simon = simon_criterion(V, args.tol, args.i4_form)
    ppt = gaussian_ppt_oracle(V, args.tol)
    report = {
        "schema": REPORT_SCHEMA, "tolerance": args.tol, "i4_form": args.i4_form,
        "V": V.V.tolist(),
        "invariants": {"I1": inv.I1, "I2": inv.I2, "I3": inv.I3, "I4": inv.I4},
        "simon": simon.to_dict(), "ppt": ppt.to_dict(),
        "agree": simon.entangled == ppt.entangled,
    }
    _emit(report, args.format)
    return EXIT_CODES[simon.outcome]


def build_parser():
    parser = argparse.ArgumentParser(prog="symqubit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="format", action="store_const", const="json")
        fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
        p.set_defaults(format="json")

    p = sub.add_parser("analyze", help="analyse a state document")
    p.add_argument("input", help="state document path, or - for stdin")
    add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="run an equivalence sweep over a random ensemble")
    p.add_argument("--ensemble", choices=sorted(ENSEMBLES), default="mixed")
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=int, default=int(os.environ.get("SYMQUBIT_SEED", "0")))
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--terms", type=int, default=4)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out", required=True, help="per-sample CSV path")
    p.add_argument("--summary", help="summary JSON path (default: --out with .json)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("collective", help="pairwise analysis of a constructed N-qubit state")
    p.add_argument("--state", choices=["dicke", "ghz", "spin_coherent", "one_axis_twisted"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--chi-t", type=float, default=0.05)
    add_common(p)
    p.set_defaults(func=cmd_collective)

    p = sub.add_parser("cv-check", help="Simon criterion for a two-mode covariance matrix")
    p.add_argument("--cov", required=True, help="JSON file with a 4x4 matrix under key V")
    p.add_argument("--i4-form", choices=["standard", "printed"], default="standard")
    add_common(p)
    p.set_defaults(func=cmd_cv_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SymQubitError, ValueError, KeyError, OSError) as exc:
        label = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"symqubit {args.command}: error: {label}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
