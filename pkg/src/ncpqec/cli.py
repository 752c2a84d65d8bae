"""Command-line interface.

Subcommands:

* ``convert``   -- rewrite a channel document in another representation
* ``classify``  -- CP/NCP verdict, signature, trace/Hermiticity checks
* ``qec``       -- reversibility analysis of a channel on a code space
* ``equiv``     -- connect two equal maps by a pseudounitary mixing
* ``reproduce-paper`` -- the worked three-qubit inverted bit-flip example

Exit codes: 0 success, 2 input/validation error, 3 numerical failure.
The working tolerance is the ``--tol`` flag if given, else the
``QEC_TOL`` environment variable, else ``1e-9``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .documents import (
    analysis_document,
    channel_document,
    encode_matrix,
    parse_channel_document,
    parse_code_document,
)
from .errors import NumericalFailure
from .pseudolinalg import DEFAULT_TOL
from .qec import CodeSpace, Verdict, analyze, build_recovery, projector_from_basis, verify_recovery
from .superop import (
    AMatrix,
    BMatrix,
    SignedOperatorSum,
    a_from_operator_sum,
    apply_map,
    b_from_operator_sum,
    check_hermiticity_preserving,
    check_trace_preserving,
    classify,
    operator_sum_from_b,
    reshuffle,
)

__all__ = ["main"]


def _resolve_tol(args: argparse.Namespace) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("QEC_TOL")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise ValueError(f"QEC_TOL is not a number: {env!r}") from None
    return DEFAULT_TOL


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _emit(doc: dict, args: argparse.Namespace) -> None:
    if getattr(args, "json", False):
        print(json.dumps(doc, separators=(",", ":")))
    else:
        print(json.dumps(doc, indent=2))


def _as_b_matrix(channel: AMatrix | BMatrix | SignedOperatorSum) -> BMatrix:
    if isinstance(channel, BMatrix):
        return channel
    if isinstance(channel, AMatrix):
        return reshuffle(channel)
    return b_from_operator_sum(channel)


def _as_operator_sum(channel, tol: float) -> SignedOperatorSum:
    if isinstance(channel, SignedOperatorSum):
        return channel
    return operator_sum_from_b(_as_b_matrix(channel), tol)


def cmd_convert(args: argparse.Namespace) -> int:
    tol = _resolve_tol(args)
    channel = parse_channel_document(_load_json(args.input))
    if args.to == "a_matrix":
        out = reshuffle(_as_b_matrix(channel))
    elif args.to == "b_matrix":
        out = _as_b_matrix(channel)
    else:
        out = _as_operator_sum(channel, tol)
    _emit(channel_document(out), args)
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    tol = _resolve_tol(args)
    channel = parse_channel_document(_load_json(args.input))
    b = _as_b_matrix(channel)
    a = reshuffle(b)
    hermiticity = check_hermiticity_preserving(a, tol)
    kind = classify(b, tol)
    doc = {
        "schema_version": "1",
        "verdict": kind.kind,
        "signature": {"p": kind.signature.p, "q": kind.signature.q},
        "trace_preserving": bool(check_trace_preserving(a, tol)),
        "hermiticity_preserving": bool(hermiticity),
    }
    _emit(doc, args)
    return 0


def cmd_qec(args: argparse.Namespace) -> int:
    tol = _resolve_tol(args)
    channel = parse_channel_document(_load_json(args.input))
    ops = _as_operator_sum(channel, tol)
    code = parse_code_document(_load_json(args.code), tol)
    if code.dim != ops.dim:
        raise ValueError(f"channel dimension {ops.dim} does not match code dimension {code.dim}")
    report = analyze(ops, code, tol)
    _emit(analysis_document(report, ops.signature), args)
    return 0


def cmd_equiv(args: argparse.Namespace) -> int:
    from .equivalence import connecting_pseudounitary, maps_equal
    from .errors import MapsNotEqual

    tol = _resolve_tol(args)
    first = _as_operator_sum(parse_channel_document(_load_json(args.first)), tol)
    second = _as_operator_sum(parse_channel_document(_load_json(args.second)), tol)
    if first.dim != second.dim:
        raise ValueError(f"dimension mismatch: {first.dim} vs {second.dim}")
    if not maps_equal(first, second, tol):
        _emit({"schema_version": "1", "equal": False}, args)
        return 0
    result = connecting_pseudounitary(first, second, tol)
    doc = {
        "schema_version": "1",
        "equal": True,
        "u": encode_matrix(result.u),
        "signature": {"p": result.signature.p, "q": result.signature.q},
        "padding_added": list(result.padding_added),
        "residual": float(result.residual),
    }
    _emit(doc, args)
    return 0


def _three_qubit_bitflip(c0: float) -> tuple[SignedOperatorSum, CodeSpace]:
    """Inverted bit-flip map on three qubits with the repetition code."""
    c1 = (1.0 - c0) / 3.0
    if abs(c0) < 1e-12 or abs(c1) < 1e-12:
        raise ValueError(f"c0={c0} gives a degenerate mixture (c1={c1}); both weights must be nonzero")
    if c0 * c1 > 0:
        raise ValueError(
            f"c0={c0} and c1={c1} have the same sign; choose c0 < 0 or c0 > 1 for an inverted mixture"
        )
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    flips = [
        np.kron(np.kron(x, eye), eye),
        np.kron(np.kron(eye, x), eye),
        np.kron(np.kron(eye, eye), x),
    ]
    identity = np.eye(8, dtype=complex)
    terms = [(1 if c1 > 0 else -1, np.sqrt(abs(c1)) * f) for f in flips]
    terms.append((1 if c0 > 0 else -1, np.sqrt(abs(c0)) * identity))
    terms.sort(key=lambda t: -t[0])
    ops = SignedOperatorSum(8, tuple(s for s, _ in terms), tuple(op for _, op in terms))
    zero = np.zeros(8, dtype=complex)
    ket000, ket111 = zero.copy(), zero.copy()
    ket000[0] = 1.0
    ket111[7] = 1.0
    return ops, projector_from_basis([ket000, ket111])


def cmd_reproduce_paper(args: argparse.Namespace) -> int:
    tol = _resolve_tol(args)
    c0 = args.c0
    c1 = (1.0 - c0) / 3.0
    ops, code = _three_qubit_bitflip(c0)

    # Outcome values tr(|f><f| E(rho)) for rho = a|000><000| + (1-a)|111><111|.
    outcome_kets = {"000": 0, "111": 7, "100": 4, "011": 3}
    mixtures = {}
    for a_val in (0.0, 0.5, 1.0):
        rho = np.zeros((8, 8), dtype=complex)
        rho[0, 0] = a_val
        rho[7, 7] = 1.0 - a_val
        out = apply_map(ops, rho)
        mixtures[f"a={a_val:g}"] = {k: float(out[i, i].real) for k, i in outcome_kets.items()}

    report = analyze(ops, code, tol)
    witness_probability = None if report.witness is None else report.witness.probability
    recovery = build_recovery(report.syndromes) if report.syndromes else None
    recovery_error = None
    if recovery is not None:
        recovery_error = float(verify_recovery(ops, recovery, code, trials=20, tol=tol))

    doc = {
        "schema_version": "1",
        "c0": c0,
        "c1": c1,
        "outcomes": mixtures,
        "verdict": report.verdict.value,
        "witness_probability": witness_probability,
        "recovery_max_error": recovery_error,
    }
    if args.json:
        print(json.dumps(doc, separators=(",", ":")))
        return 0

    print(f"inverted bit-flip mixture on three qubits: c0 = {c0:g}, c1 = {c1:g}")
    print("outcome values tr(|f><f| E(rho)) for rho = a|000><000| + (1-a)|111><111|:")
    for label, values in mixtures.items():
        cells = "  ".join(f"|{k}>: {v: .4f}" for k, v in values.items())
        print(f"  {label:7s} {cells}")
    if witness_probability is not None:
        print(
            f"syndrome measurement returns negative probability {witness_probability:.6g} "
            "on a code state: the code space lies outside the map's domain"
        )
    if recovery_error is not None:
        print(
            f"projective recovery restores every sampled code state "
            f"(max deviation {recovery_error:.3e} over 20 random states)"
        )
    print(f"verdict: {report.verdict.value}")
    print()
    print(json.dumps(doc, indent=2))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncpqec",
        description="Analysis of Hermiticity-preserving (possibly non-completely-positive) maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol", type=float, default=None, help="working tolerance (default: QEC_TOL or 1e-9)")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="compact single-line JSON output")
        fmt.add_argument("--pretty", action="store_true", help="indented JSON output (default)")

    p_convert = sub.add_parser("convert", help="convert a channel document between representations")
    p_convert.add_argument("input", help="channel document (JSON)")
    p_convert.add_argument("--to", required=True, choices=["a_matrix", "b_matrix", "operator_sum"])
    add_common(p_convert)
    p_convert.set_defaults(func=cmd_convert)

    p_classify = sub.add_parser("classify", help="CP/NCP verdict with signature and preservation checks")
    p_classify.add_argument("input", help="channel document (JSON)")
    add_common(p_classify)
    p_classify.set_defaults(func=cmd_classify)

    p_qec = sub.add_parser("qec", help="reversibility analysis on a code space")
    p_qec.add_argument("input", help="channel document (JSON)")
    p_qec.add_argument("--code", required=True, help="code document (JSON list of basis vectors)")
    add_common(p_qec)
    p_qec.set_defaults(func=cmd_qec)

    p_equiv = sub.add_parser("equiv", help="connect two equal maps by a pseudounitary mixing")
    p_equiv.add_argument("first", help="channel document (JSON)")
    p_equiv.add_argument("second", help="channel document (JSON)")
    add_common(p_equiv)
    p_equiv.set_defaults(func=cmd_equiv)

    p_repro = sub.add_parser(
        "reproduce-paper",
        help="run the worked three-qubit inverted bit-flip example end to end",
    )
    p_repro.add_argument("--c0", type=float, default=-0.2, help="weight of the identity term (default -0.2)")
    add_common(p_repro)
    p_repro.set_defaults(func=cmd_reproduce_paper)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"ncpqec {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"ncpqec {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
