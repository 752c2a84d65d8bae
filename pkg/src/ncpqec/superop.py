"""Superoperator representations of Hermiticity-preserving maps.

Three interconvertible forms of a linear map on d x d matrices are
supported:

* the transition matrix ``A`` acting on row-major vectorized states,
  ``vec(rho')[r'*d+s'] = sum_{r,s} A[r'*d+s', r*d+s] vec(rho)[r*d+s]``;
* the dynamical matrix ``B`` obtained from ``A`` by swapping the middle
  indices of the underlying 4-tensor, ``B[r'*d+r, s'*d+s] = A[r'*d+s',
  r*d+s]`` (Hermitian exactly when the map preserves Hermiticity);
* a *signed operator sum* ``rho -> sum_i sign_i E_i rho E_i^dag`` with
  ``sign_i = +1/-1``, obtained from the eigendecomposition of ``B``.
  Completely positive maps are the special case with no negative signs.

Vectorization is row-major throughout: ``vec(M)[r*d + s] = M[r, s]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NotHermitian, NotPseudoUnitary
from .pseudolinalg import DEFAULT_TOL, Signature, eta_metric, is_pseudounitary

__all__ = [
    "AMatrix",
    "BMatrix",
    "SignedOperatorSum",
    "MapClass",
    "vec",
    "unvec",
    "reshuffle",
    "check_hermiticity_preserving",
    "check_trace_preserving",
    "a_from_operator_sum",
    "b_from_operator_sum",
    "operator_sum_from_b",
    "apply_map",
    "apply_a_matrix",
    "classify",
    "split_cp_parts",
    "transform_by_pseudounitary",
    "validate_density_matrix",
    "is_positive_semidefinite",
]


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def vec(m: np.ndarray) -> np.ndarray:
    """Row-major vectorization: ``vec(M)[r*d + s] = M[r, s]``."""
    return np.asarray(m, dtype=complex).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(d, d)


@dataclass(frozen=True)
class AMatrix:
    """Transition-matrix form acting on row-major vectorized states."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        d2 = self.dim * self.dim
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if m.shape != (d2, d2):
            raise ValueError(f"A-matrix for dim {self.dim} must have shape ({d2}, {d2}), got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("A-matrix contains non-finite entries")
        object.__setattr__(self, "matrix", _frozen(m))


@dataclass(frozen=True)
class BMatrix:
    """Dynamical-matrix form; Hermitian iff the map preserves Hermiticity."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        d2 = self.dim * self.dim
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if m.shape != (d2, d2):
            raise ValueError(f"B-matrix for dim {self.dim} must have shape ({d2}, {d2}), got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("B-matrix contains non-finite entries")
        object.__setattr__(self, "matrix", _frozen(m))


@dataclass(frozen=True)
class SignedOperatorSum:
    """Decomposition ``rho -> sum_i signs[i] * operators[i] rho operators[i]^dag``.

    Terms are stored with all +1 signs before all -1 signs; the
    signature ``(p, q)`` counts the two blocks.  Instances are immutable
    (operator arrays are copied and marked read-only) and safe to share.
    """

    dim: int
    signs: tuple[int, ...]
    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be positive")
        signs = tuple(int(s) for s in self.signs)
        ops = tuple(np.asarray(op, dtype=complex) for op in self.operators)
        if len(signs) != len(ops):
            raise ValueError(f"{len(signs)} signs but {len(ops)} operators")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"signs must be +1 or -1, got {signs}")
        if any(signs[i] < signs[i + 1] for i in range(len(signs) - 1)):
            raise ValueError("positive-sign terms must precede negative-sign terms")
        for k, op in enumerate(ops):
            if op.shape != (self.dim, self.dim):
                raise ValueError(f"operator {k} has shape {op.shape}, expected ({self.dim}, {self.dim})")
            if not np.all(np.isfinite(op)):
                raise ValueError(f"operator {k} contains non-finite entries")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "operators", tuple(_frozen(op) for op in ops))

    @classmethod
    def from_terms(
        cls,
        signs: Sequence[int],
        operators: Sequence[np.ndarray],
        dim: int | None = None,
    ) -> "SignedOperatorSum":
        """Build a sum, inferring ``dim`` from the first operator if omitted."""
        if dim is None:
            if not operators:
                raise ValueError("dim is required for an empty term list")
            dim = int(np.asarray(operators[0]).shape[0])
        return cls(dim, tuple(int(s) for s in signs), tuple(operators))

    @property
    def n_terms(self) -> int:
        return len(self.signs)

    @property
    def signature(self) -> Signature:
        p = sum(1 for s in self.signs if s > 0)
        return Signature(p, len(self.signs) - p)


class MapClass(NamedTuple):
    """Classification of a Hermiticity-preserving map."""

    kind: str  # "CP" or "NCP"
    signature: Signature


def reshuffle(x: AMatrix | BMatrix) -> BMatrix | AMatrix:
    """Swap the middle indices of the 4-tensor behind ``x``.

    Maps an :class:`AMatrix` to the corresponding :class:`BMatrix` and
    vice versa.  The operation is an exact involution (a pure index
    permutation, no arithmetic).
    """
    if not isinstance(x, (AMatrix, BMatrix)):
        raise TypeError(f"expected AMatrix or BMatrix, got {type(x).__name__}")
    d = x.dim
    t = x.matrix.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    return BMatrix(d, t) if isinstance(x, AMatrix) else AMatrix(d, t)


def check_hermiticity_preserving(a: AMatrix, tol: float = DEFAULT_TOL) -> bool:
    """True iff the map sends Hermitian matrices to Hermitian matrices.

    Checked entrywise on the 4-tensor: ``A[s',r',s,r] = conj(A[r',s',r,s])``
    within ``tol`` (equivalently, ``reshuffle(a)`` is Hermitian).
    """
    d = a.dim
    t = a.matrix.reshape(d, d, d, d)
    return _max_abs(t.transpose(1, 0, 3, 2) - t.conj()) <= tol


def check_trace_preserving(x: AMatrix | SignedOperatorSum, tol: float = DEFAULT_TOL) -> bool:
    """True iff the map preserves the trace of its input.

    For an :class:`AMatrix` this checks ``sum_{r'} A[r'*d+r', r*d+s] =
    delta_{rs}``; for a :class:`SignedOperatorSum` it checks
    ``sum_i sign_i E_i^dag E_i = 1`` within ``tol``.
    """
    if isinstance(x, AMatrix):
        d = x.dim
        t = x.matrix.reshape(d, d, d, d)
        return _max_abs(np.einsum("iirs->rs", t) - np.eye(d)) <= tol
    if isinstance(x, SignedOperatorSum):
        acc = np.zeros((x.dim, x.dim), dtype=complex)
        for s, op in zip(x.signs, x.operators):
            acc += s * (op.conj().T @ op)
        return _max_abs(acc - np.eye(x.dim)) <= tol
    raise TypeError(f"expected AMatrix or SignedOperatorSum, got {type(x).__name__}")


def b_from_operator_sum(ops: SignedOperatorSum) -> BMatrix:
    """Dynamical matrix ``sum_i sign_i vec(E_i) vec(E_i)^dag``."""
    d = ops.dim
    b = np.zeros((d * d, d * d), dtype=complex)
    for s, op in zip(ops.signs, ops.operators):
        v = vec(op)
        b += s * np.outer(v, v.conj())
    return BMatrix(d, b)


def a_from_operator_sum(ops: SignedOperatorSum) -> AMatrix:
    """Transition matrix of a signed operator sum (via :func:`reshuffle`)."""
    return reshuffle(b_from_operator_sum(ops))


def _deterministic_eigenbasis(vectors: np.ndarray) -> list[np.ndarray]:
    """Deterministic orthonormal basis of the span of ``vectors``' columns.

    Projects the standard basis vectors onto the span in index order and
    orthogonalizes, removing the eigensolver's arbitrary choice of basis
    inside degenerate eigenspaces.
    """
    k = vectors.shape[1]
    q = vectors @ vectors.conj().T
    basis: list[np.ndarray] = []
    for j in range(q.shape[0]):
        if len(basis) == k:
            break
        w = q[:, j].copy()
        for b in basis:
            w = w - b * np.vdot(b, w)
        wn = float(np.linalg.norm(w))
        if wn > 1e-8:
            basis.append(w / wn)
    if len(basis) != k:  # pragma: no cover - span always reachable from projector columns
        raise RuntimeError("failed to construct a deterministic eigenbasis")
    return basis


def _lex_key(v: np.ndarray) -> tuple:
    return tuple(float(x) for z in v for x in (z.real, z.imag))


def canonical_signed_eigensystem(
    b: np.ndarray, tol: float = DEFAULT_TOL
) -> list[tuple[int, float, np.ndarray]]:
    """Canonically ordered signed eigensystem of a Hermitian matrix.

    Returns ``(sign, |eigenvalue|, unit eigenvector)`` triples with
    eigenvalues of magnitude at most ``tol * max|eigenvalue|`` dropped.
    Ordering is positive signs first, then descending magnitude, with
    exact ties broken by lexicographic comparison of the scaled vector
    entries.  Degenerate eigenspaces get a deterministic basis built by
    projecting standard basis vectors in index order.
    """
    lam, v = np.linalg.eigh(b)
    lmax = _max_abs(lam)
    if lmax == 0.0:
        return []
    keep = [i for i in range(lam.size) if abs(lam[i]) > tol * lmax]
    if not keep:
        return []
    gap = tol * lmax
    kept_lam = lam[keep]
    order = np.argsort(kept_lam)
    clusters: list[list[int]] = []
    for oi in order:
        i = keep[int(oi)]
        if clusters and lam[i] - lam[clusters[-1][-1]] <= gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    triples: list[tuple[int, float, np.ndarray]] = []
    for cluster in clusters:
        value = float(np.mean(lam[cluster]))
        sign = 1 if value > 0 else -1
        if len(cluster) == 1:
            vecs = [v[:, cluster[0]]]
        else:
            vecs = _deterministic_eigenbasis(v[:, cluster])
        for u in vecs:
            triples.append((sign, abs(value), u))
    triples.sort(key=lambda t: (-t[0], -t[1], _lex_key(t[2] * np.sqrt(t[1]))))
    return triples


def operator_sum_from_b(b: BMatrix, tol: float = DEFAULT_TOL) -> SignedOperatorSum:
    """Signed operator sum from the eigendecomposition of ``B``.

    Each retained eigenpair contributes ``sqrt(|eigenvalue|) * unvec(v)``
    with the eigenvalue's sign; eigenvalues of magnitude at most
    ``tol * max|eigenvalue|`` are dropped, so ``B = 0`` yields an empty
    term list.  Terms come out in canonical order: +1 block first, each
    block sorted by descending Frobenius norm.

    Raises
    ------
    NotHermitian
        If ``B`` is not Hermitian within ``tol`` (scaled by the largest
        entry), i.e. the map does not preserve Hermiticity.
    """
    m = b.matrix
    if _max_abs(m - m.conj().T) > tol * max(1.0, _max_abs(m)):
        raise NotHermitian("B is not Hermitian: the map does not preserve Hermiticity")
    m = (m + m.conj().T) / 2
    signs: list[int] = []
    operators: list[np.ndarray] = []
    for sign, mag, u in canonical_signed_eigensystem(m, tol):
        signs.append(sign)
        operators.append(unvec(np.sqrt(mag) * u))
    return SignedOperatorSum(b.dim, tuple(signs), tuple(operators))


def apply_map(ops: SignedOperatorSum, rho: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_i sign_i E_i rho E_i^dag``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ops.dim, ops.dim):
        raise ValueError(f"state has shape {rho.shape}, expected ({ops.dim}, {ops.dim})")
    out = np.zeros_like(rho)
    for s, op in zip(ops.signs, ops.operators):
        out += s * (op @ rho @ op.conj().T)
    return out


def apply_a_matrix(a: AMatrix, rho: np.ndarray) -> np.ndarray:
    """Evaluate the map in transition-matrix form: ``unvec(A vec(rho))``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (a.dim, a.dim):
        raise ValueError(f"state has shape {rho.shape}, expected ({a.dim}, {a.dim})")
    return unvec(a.matrix @ vec(rho))


def classify(b: BMatrix, tol: float = DEFAULT_TOL) -> MapClass:
    """Classify a Hermiticity-preserving map as CP or NCP.

    The map is completely positive iff all eigenvalues of ``B`` are at
    least ``-tol``; the signature counts eigenvalues above ``tol`` and
    below ``-tol``.

    Raises
    ------
    NotHermitian
        If ``B`` is not Hermitian within tolerance.
    """
    m = b.matrix
    if _max_abs(m - m.conj().T) > tol * max(1.0, _max_abs(m)):
        raise NotHermitian("B is not Hermitian: the map does not preserve Hermiticity")
    lam = np.linalg.eigvalsh((m + m.conj().T) / 2)
    p = int(np.sum(lam > tol))
    q = int(np.sum(lam < -tol))
    kind = "CP" if q == 0 else "NCP"
    return MapClass(kind, Signature(p, q))


def split_cp_parts(ops: SignedOperatorSum) -> tuple[SignedOperatorSum, SignedOperatorSum]:
    """Split into the two completely positive halves ``E = E1 - E2``.

    Returns ``(E1, E2)`` where ``E1`` collects the +1 terms and ``E2``
    the -1 terms with their signs flipped to +1.
    """
    pos = [op for s, op in zip(ops.signs, ops.operators) if s > 0]
    neg = [op for s, op in zip(ops.signs, ops.operators) if s < 0]
    e1 = SignedOperatorSum(ops.dim, (1,) * len(pos), tuple(pos))
    e2 = SignedOperatorSum(ops.dim, (1,) * len(neg), tuple(neg))
    return e1, e2


def transform_by_pseudounitary(
    ops: SignedOperatorSum, u: np.ndarray, tol: float = DEFAULT_TOL
) -> SignedOperatorSum:
    """Mix the terms by a pseudounitary: ``F_j = sum_k E_k u[k, j]``.

    The sign pattern is unchanged and the resulting decomposition
    generates the same map, because ``u`` preserves the metric built
    from the signature.

    Raises
    ------
    NotPseudoUnitary
        If ``u`` fails ``u eta u^dag = eta`` at ``tol`` for the metric of
        ``ops.signature``.
    """
    u = np.asarray(u, dtype=complex)
    n = ops.n_terms
    if u.shape != (n, n):
        raise ValueError(f"u has shape {u.shape}, expected ({n}, {n})")
    eta = eta_metric(ops.signature)
    if not is_pseudounitary(u, eta, tol):
        raise NotPseudoUnitary("u does not preserve the metric of the term signature")
    if n == 0:
        return ops
    stack = np.stack(ops.operators)  # (n, d, d)
    mixed = np.tensordot(u, stack, axes=([0], [0]))  # F_j = sum_k E_k u[k, j]
    return SignedOperatorSum(ops.dim, ops.signs, tuple(mixed[j] for j in range(n)))


def validate_density_matrix(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Check Hermiticity and unit trace, returning the array unchanged.

    Positivity is deliberately not enforced -- intermediate states of a
    non-completely-positive evolution may be non-positive.  Use
    :func:`is_positive_semidefinite` to test it separately.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {m.shape}")
    if _max_abs(m - m.conj().T) > tol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(m) - 1.0) > tol:
        raise ValueError(f"density matrix has trace {np.trace(m):.6g}, expected 1")
    return m


def is_positive_semidefinite(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff the Hermitian part of ``m`` has eigenvalues >= ``-tol``."""
    m = np.asarray(m, dtype=complex)
    lam = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return bool(lam.size == 0 or lam.min() >= -tol)
