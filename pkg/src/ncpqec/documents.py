"""JSON document schemas for channels, codes and analysis reports.

Complex scalars are encoded as two-element ``[re, im]`` arrays and
matrices as row-major nested lists of those pairs.  Every document
carries a ``schema_version`` so formats can evolve; parsing rejects
unknown versions.  Parsers raise ``ValueError`` with a path-like hint
for malformed input.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .qec import CodeSpace, NegativityWitness, QecReport, projector_from_basis
from .superop import AMatrix, BMatrix, SignedOperatorSum
from .pseudolinalg import Signature

SCHEMA_VERSION = "1"
REPRESENTATIONS = ("a_matrix", "b_matrix", "operator_sum")

__all__ = [
    "SCHEMA_VERSION",
    "REPRESENTATIONS",
    "encode_matrix",
    "decode_matrix",
    "channel_document",
    "parse_channel_document",
    "parse_code_document",
    "analysis_document",
    "parse_analysis_document",
]


def _encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _decode_complex(obj: Any, where: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise ValueError(f"{where}: complex entries must be [re, im] number pairs, got {obj!r}")
    return complex(obj[0], obj[1])


def encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    """Encode a matrix as row-major nested ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[_encode_complex(z) for z in row] for row in m]


def decode_matrix(obj: Any, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValueError(f"{where}: expected a non-empty list of rows")
    ncols = len(obj[0])
    if ncols == 0 or any(len(r) != ncols for r in obj):
        raise ValueError(f"{where}: rows must be non-empty and of equal length")
    return np.array(
        [[_decode_complex(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)] for i, row in enumerate(obj)]
    )


def encode_vector(v: np.ndarray) -> list[list[float]]:
    return [_encode_complex(z) for z in np.asarray(v, dtype=complex)]


def decode_vector(obj: Any, where: str = "vector") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_decode_complex(z, f"{where}[{i}]") for i, z in enumerate(obj)])


def _require(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise ValueError(f"{where}: missing required field {key!r}")
    return obj[key]


def _check_version(obj: dict, where: str) -> None:
    version = _require(obj, "schema_version", where)
    if version != SCHEMA_VERSION:
        raise ValueError(f"{where}: unsupported schema_version {version!r}")


def _check_dim(obj: dict, where: str) -> int:
    dim = _require(obj, "dim", where)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError(f"{where}: dim must be a positive integer, got {dim!r}")
    return dim


def channel_document(channel: AMatrix | BMatrix | SignedOperatorSum) -> dict:
    """Serialize a channel in its current representation."""
    if isinstance(channel, AMatrix):
        rep, payload = "a_matrix", {"matrix": encode_matrix(channel.matrix)}
    elif isinstance(channel, BMatrix):
        rep, payload = "b_matrix", {"matrix": encode_matrix(channel.matrix)}
    elif isinstance(channel, SignedOperatorSum):
        rep = "operator_sum"
        payload = {
            "signs": list(channel.signs),
            "operators": [encode_matrix(op) for op in channel.operators],
        }
    else:
        raise TypeError(f"expected AMatrix, BMatrix or SignedOperatorSum, got {type(channel).__name__}")
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": channel.dim,
        "representation": rep,
        "payload": payload,
    }


def parse_channel_document(obj: Any) -> AMatrix | BMatrix | SignedOperatorSum:
    """Parse and validate a channel document."""
    if not isinstance(obj, dict):
        raise ValueError("channel document must be a JSON object")
    _check_version(obj, "channel")
    dim = _check_dim(obj, "channel")
    rep = _require(obj, "representation", "channel")
    if rep not in REPRESENTATIONS:
        raise ValueError(f"channel: unknown representation {rep!r}")
    payload = _require(obj, "payload", "channel")
    if not isinstance(payload, dict):
        raise ValueError("channel.payload must be a JSON object")
    if rep in ("a_matrix", "b_matrix"):
        m = decode_matrix(_require(payload, "matrix", "channel.payload"), "channel.payload.matrix")
        if m.shape != (dim * dim, dim * dim):
            raise ValueError(
                f"channel.payload.matrix: shape {m.shape} does not match dim {dim} "
                f"(expected {(dim * dim, dim * dim)})"
            )
        return AMatrix(dim, m) if rep == "a_matrix" else BMatrix(dim, m)
    signs = _require(payload, "signs", "channel.payload")
    operators = _require(payload, "operators", "channel.payload")
    if not isinstance(signs, list) or not isinstance(operators, list):
        raise ValueError("channel.payload: signs and operators must be lists")
    if len(signs) != len(operators):
        raise ValueError(
            f"channel.payload: {len(signs)} signs but {len(operators)} operators"
        )
    mats = []
    for k, op in enumerate(operators):
        m = decode_matrix(op, f"channel.payload.operators[{k}]")
        if m.shape != (dim, dim):
            raise ValueError(
                f"channel.payload.operators[{k}]: shape {m.shape} does not match dim {dim}"
            )
        mats.append(m)
    try:
        return SignedOperatorSum(dim, tuple(signs), tuple(mats))
    except ValueError as exc:
        raise ValueError(f"channel.payload: {exc}") from exc


def parse_code_document(obj: Any, tol: float) -> CodeSpace:
    """Parse a code-space document: a list of basis vectors.

    Accepts either a bare JSON array of vectors or an object
    ``{"dim": d, "basis": [...]}``; basis vectors are orthonormalized.
    """
    if isinstance(obj, dict):
        dim = _check_dim(obj, "code")
        basis_obj = _require(obj, "basis", "code")
    else:
        dim, basis_obj = None, obj
    if not isinstance(basis_obj, list) or not basis_obj:
        raise ValueError("code: expected a non-empty list of basis vectors")
    basis = [decode_vector(v, f"code.basis[{k}]") for k, v in enumerate(basis_obj)]
    if dim is not None and any(v.shape != (dim,) for v in basis):
        raise ValueError(f"code: basis vectors must have length {dim}")
    return projector_from_basis(basis, tol)


def _encode_syndromes(report: QecReport) -> list[dict] | None:
    if report.syndromes is None:
        return None
    return [
        {
            "projector": encode_matrix(s.projector),
            "unitary": encode_matrix(s.unitary),
            "weight": float(s.weight),
            "sign": int(s.sign),
            "term_index": int(s.term_index),
        }
        for s in report.syndromes
    ]


def analysis_document(report: QecReport, signature: Signature) -> dict:
    """Serialize a :class:`~ncpqec.qec.QecReport`."""
    recovery = None
    if report.recovery is not None:
        recovery = {
            "signs": list(report.recovery.signs),
            "operators": [encode_matrix(op) for op in report.recovery.operators],
        }
    witness = None
    if report.witness is not None:
        witness = {
            "state": encode_matrix(report.witness.state),
            "syndrome_index": int(report.witness.syndrome_index),
            "probability": float(report.witness.probability),
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "verdict": report.verdict.value,
        "signature": {"p": signature.p, "q": signature.q},
        "condition": {
            "entries": encode_matrix(report.condition.entries),
            "residual": float(report.condition.residual),
            "form": report.condition.form,
        },
        "diagonalizer": None if report.diagonalizer is None else encode_matrix(report.diagonalizer),
        "diagonal": None if report.diagonal is None else [float(x) for x in report.diagonal],
        "syndromes": _encode_syndromes(report),
        "recovery": recovery,
        "witness": witness,
    }


def parse_analysis_document(obj: Any) -> dict:
    """Validate an analysis document, returning decoded arrays.

    Used to close the serialization loop: every emitted document must
    re-parse.  Returns a plain dict with numpy arrays in place of the
    encoded matrices.
    """
    if not isinstance(obj, dict):
        raise ValueError("analysis document must be a JSON object")
    _check_version(obj, "analysis")
    verdict = _require(obj, "verdict", "analysis")
    verdicts = ("reversible_positive", "code_outside_domain", "conditions_violated")
    if verdict not in verdicts:
        raise ValueError(f"analysis: unknown verdict {verdict!r}")
    sig = _require(obj, "signature", "analysis")
    if (
        not isinstance(sig, dict)
        or not isinstance(sig.get("p"), int)
        or not isinstance(sig.get("q"), int)
        or sig["p"] < 0
        or sig["q"] < 0
    ):
        raise ValueError("analysis.signature: expected non-negative integers p and q")
    condition = _require(obj, "condition", "analysis")
    if not isinstance(condition, dict):
        raise ValueError("analysis.condition must be a JSON object")
    entries = decode_matrix(_require(condition, "entries", "analysis.condition"), "analysis.condition.entries")
    residual = _require(condition, "residual", "analysis.condition")
    if not isinstance(residual, (int, float)) or isinstance(residual, bool) or residual < 0:
        raise ValueError("analysis.condition.residual must be a non-negative number")
    form = _require(condition, "form", "analysis.condition")
    if form not in ("hermitian", "pseudohermitian"):
        raise ValueError(f"analysis.condition.form: unknown form {form!r}")
    out: dict[str, Any] = {
        "verdict": verdict,
        "signature": (sig["p"], sig["q"]),
        "condition_entries": entries,
        "condition_residual": float(residual),
        "condition_form": form,
    }
    witness = obj.get("witness")
    if (witness is not None) != (verdict == "code_outside_domain"):
        raise ValueError("analysis: witness must be present iff verdict is code_outside_domain")
    if verdict == "reversible_positive" and obj.get("recovery") is None:
        raise ValueError("analysis: reversible_positive requires a recovery")
    if obj.get("diagonalizer") is not None:
        out["diagonalizer"] = decode_matrix(obj["diagonalizer"], "analysis.diagonalizer")
    if obj.get("diagonal") is not None:
        diag = obj["diagonal"]
        if not isinstance(diag, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in diag
        ):
            raise ValueError("analysis.diagonal must be a list of numbers")
        out["diagonal"] = np.array(diag, dtype=float)
    if obj.get("syndromes") is not None:
        decoded = []
        for k, s in enumerate(obj["syndromes"]):
            if not isinstance(s, dict):
                raise ValueError(f"analysis.syndromes[{k}] must be a JSON object")
            decoded.append(
                {
                    "projector": decode_matrix(_require(s, "projector", f"analysis.syndromes[{k}]")),
                    "unitary": decode_matrix(_require(s, "unitary", f"analysis.syndromes[{k}]")),
                    "weight": float(_require(s, "weight", f"analysis.syndromes[{k}]")),
                    "sign": int(_require(s, "sign", f"analysis.syndromes[{k}]")),
                }
            )
        out["syndromes"] = decoded
    if obj.get("recovery") is not None:
        rec = obj["recovery"]
        if not isinstance(rec, dict):
            raise ValueError("analysis.recovery must be a JSON object")
        ops = [
            decode_matrix(m, f"analysis.recovery.operators[{k}]")
            for k, m in enumerate(_require(rec, "operators", "analysis.recovery"))
        ]
        out["recovery"] = SignedOperatorSum.from_terms(_require(rec, "signs", "analysis.recovery"), ops)
    if witness is not None:
        if not isinstance(witness, dict):
            raise ValueError("analysis.witness must be a JSON object")
        prob = _require(witness, "probability", "analysis.witness")
        if not isinstance(prob, (int, float)) or isinstance(prob, bool) or prob >= 0:
            raise ValueError("analysis.witness.probability must be a negative number")
        out["witness"] = NegativityWitness(
            decode_matrix(_require(witness, "state", "analysis.witness"), "analysis.witness.state"),
            int(_require(witness, "syndrome_index", "analysis.witness")),
            float(prob),
        )
    return out
