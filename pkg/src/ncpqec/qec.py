"""Error-correction analysis for signed operator sums on a code space.

Given a code space (projector ``P``) and a signed decomposition
``rho -> sum_i sign_i E_i rho E_i^dag``, the correctability conditions
take the signed form ``sign_i P E_i^dag E_j P = c_ij P``.  When they
hold, a pseudounitary mixing of the terms makes the condition matrix
diagonal; polar-decomposing each diagonalized term on the code space
then yields pairwise-orthogonal syndrome projectors, exactly as in the
completely positive theory.

The sign structure adds one genuinely new outcome: if a term from the
negative block still acts on the code space, measuring its syndrome
would return a *negative* probability on some code state.  Such a state
certifies that the code space lies outside the domain where the map is
a physical evolution, and :func:`analyze` reports it as a witness.  If
instead the negative block annihilates the code space, the evolution
restricted to the code is reversible with positive output and a
recovery channel is constructed from the syndromes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConditionsViolated,
    LinearDependence,
    OrthogonalityViolation,
    WitnessSearchFailed,
    ZeroTrace,
)
from .pseudolinalg import DEFAULT_TOL, eta_metric, polar_on_code, pseudo_diagonalize
from .superop import SignedOperatorSum, apply_map, transform_by_pseudounitary

__all__ = [
    "CodeSpace",
    "ConditionMatrix",
    "Syndrome",
    "SyndromeSet",
    "NegativityWitness",
    "Verdict",
    "QecReport",
    "projector_from_basis",
    "cp_condition_matrix",
    "ph_condition_matrix",
    "diagonalize_conditions",
    "build_syndromes",
    "negative_part_on_code",
    "build_recovery",
    "domain_witness",
    "analyze",
    "verify_recovery",
]

_WITNESS_SEED = 709297
_VERIFY_SEED = 424033
_N_RANDOM_WITNESS_STATES = 64


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class CodeSpace:
    """Orthonormal logical basis together with the projector it spans."""

    dim: int
    logical_basis: tuple[np.ndarray, ...]
    projector: np.ndarray

    def __post_init__(self) -> None:
        basis = tuple(np.asarray(v, dtype=complex) for v in self.logical_basis)
        proj = np.asarray(self.projector, dtype=complex)
        if not basis:
            raise ValueError("code space needs at least one logical basis vector")
        for v in basis:
            if v.shape != (self.dim,):
                raise ValueError(f"basis vector has shape {v.shape}, expected ({self.dim},)")
        if proj.shape != (self.dim, self.dim):
            raise ValueError(f"projector has shape {proj.shape}, expected ({self.dim}, {self.dim})")
        frozen_basis = []
        for v in basis:
            fv = np.array(v, copy=True)
            fv.setflags(write=False)
            frozen_basis.append(fv)
        fp = np.array(proj, copy=True)
        fp.setflags(write=False)
        object.__setattr__(self, "logical_basis", tuple(frozen_basis))
        object.__setattr__(self, "projector", fp)

    @property
    def rank(self) -> int:
        return len(self.logical_basis)


@dataclass(frozen=True)
class ConditionMatrix:
    """Correctability condition coefficients and the residual of the fit.

    ``form`` is ``"hermitian"`` for the unsigned (CP) conditions and
    ``"pseudohermitian"`` for the signed ones, where ``eta entries`` is
    Hermitian instead of ``entries`` itself.
    """

    entries: np.ndarray
    residual: float
    form: str

    def __post_init__(self) -> None:
        if self.form not in ("hermitian", "pseudohermitian"):
            raise ValueError(f"unknown condition form {self.form!r}")
        e = np.array(np.asarray(self.entries, dtype=complex), copy=True)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


@dataclass(frozen=True)
class Syndrome:
    """One measurement branch: projector, correction unitary, weight, sign."""

    projector: np.ndarray
    unitary: np.ndarray
    weight: float
    sign: int
    term_index: int


SyndromeSet = tuple[Syndrome, ...]


@dataclass(frozen=True)
class NegativityWitness:
    """Code state whose syndrome outcome has negative probability."""

    state: np.ndarray
    syndrome_index: int
    probability: float


class Verdict(str, enum.Enum):
    REVERSIBLE_POSITIVE = "reversible_positive"
    CODE_OUTSIDE_DOMAIN = "code_outside_domain"
    CONDITIONS_VIOLATED = "conditions_violated"


@dataclass(frozen=True)
class QecReport:
    """Full outcome of :func:`analyze`.

    ``diagonalizer``, ``diagonal`` and ``syndromes`` are absent when the
    conditions already fail; ``recovery`` is present exactly for the
    reversible verdict and ``witness`` exactly for the outside-domain
    verdict.
    """

    condition: ConditionMatrix
    diagonalizer: np.ndarray | None
    diagonal: np.ndarray | None
    syndromes: SyndromeSet | None
    recovery: SignedOperatorSum | None
    verdict: Verdict
    witness: NegativityWitness | None

    def __post_init__(self) -> None:
        if self.verdict == Verdict.REVERSIBLE_POSITIVE:
            if self.recovery is None or self.witness is not None:
                raise ValueError("reversible verdict requires a recovery and no witness")
        if self.verdict == Verdict.CODE_OUTSIDE_DOMAIN and self.witness is None:
            raise ValueError("outside-domain verdict requires a witness")
        if self.verdict == Verdict.CONDITIONS_VIOLATED and self.witness is not None:
            raise ValueError("conditions-violated verdict carries no witness")


def projector_from_basis(vectors: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> CodeSpace:
    """Orthonormalize ``vectors`` and build the code-space projector.

    Raises
    ------
    LinearDependence
        If the vectors do not have full rank within tolerance.
    """
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    if not vecs:
        raise ValueError("at least one basis vector is required")
    dim = vecs[0].shape[0]
    basis: list[np.ndarray] = []
    for k, v in enumerate(vecs):
        if v.shape != (dim,):
            raise ValueError(f"vector {k} has shape {v.shape}, expected ({dim},)")
        w = v.copy()
        for b in basis:
            w = w - b * np.vdot(b, w)
        wn = float(np.linalg.norm(w))
        if wn <= tol * max(1.0, float(np.linalg.norm(v))):
            raise LinearDependence(f"basis vector {k} lies in the span of its predecessors")
        basis.append(w / wn)
    proj = np.zeros((dim, dim), dtype=complex)
    for b in basis:
        proj += np.outer(b, b.conj())
    return CodeSpace(dim, tuple(basis), proj)


def _condition_fit(
    operators: Sequence[np.ndarray],
    signs: Sequence[int] | None,
    code: CodeSpace,
    tol: float,
    form: str,
) -> ConditionMatrix:
    p = code.projector
    r = code.rank
    n = len(operators)
    entries = np.zeros((n, n), dtype=complex)
    residual = 0.0
    for i in range(n):
        for j in range(n):
            block = p @ operators[i].conj().T @ operators[j] @ p
            c = np.trace(block) / r
            if signs is not None:
                c = signs[i] * c
                dev = _max_abs(signs[i] * block - c * p)
            else:
                dev = _max_abs(block - c * p)
            entries[i, j] = c
            residual = max(residual, dev)
    return ConditionMatrix(entries, residual, form)


def cp_condition_matrix(
    operators: Sequence[np.ndarray], code: CodeSpace, tol: float = DEFAULT_TOL
) -> ConditionMatrix:
    """Fit ``P E_i^dag E_j P = c_ij P`` for an unsigned operator list.

    The residual is the largest entrywise deviation of any block from
    ``c_ij P``; conditions hold iff it is at most ``tol``.
    """
    ops = [np.asarray(op, dtype=complex) for op in operators]
    if not ops:
        raise ValueError("at least one operator is required")
    for k, op in enumerate(ops):
        if op.shape != (code.dim, code.dim):
            raise ValueError(f"operator {k} has shape {op.shape}, expected ({code.dim}, {code.dim})")
    return _condition_fit(ops, None, code, tol, "hermitian")


def ph_condition_matrix(
    ops: SignedOperatorSum, code: CodeSpace, tol: float = DEFAULT_TOL
) -> ConditionMatrix:
    """Fit the signed conditions ``sign_i P E_i^dag E_j P = c_ij P``.

    The resulting coefficient matrix is pseudohermitian for the metric
    of ``ops.signature`` whenever the residual is small.
    """
    if ops.dim != code.dim:
        raise ValueError(f"operator dimension {ops.dim} does not match code dimension {code.dim}")
    return _condition_fit(ops.operators, ops.signs, code, tol, "pseudohermitian")


def diagonalize_conditions(
    ops: SignedOperatorSum, code: CodeSpace, tol: float = DEFAULT_TOL
) -> tuple[SignedOperatorSum, np.ndarray, np.ndarray]:
    """Mix the terms pseudounitarily so the conditions become diagonal.

    Returns ``(F, d, u)`` where ``F = transform_by_pseudounitary(ops, u)``
    satisfies ``P F_k^dag F_l P = d[k] delta_kl P`` with ``d >= 0``.

    Raises
    ------
    ConditionsViolated
        If the signed conditions fail at ``tol``.
    PseudoDiagonalizationFailure
        If the condition matrix cannot be diagonalized pseudounitarily
        (propagated from :func:`~ncpqec.pseudolinalg.pseudo_diagonalize`).
    """
    condition = ph_condition_matrix(ops, code, tol)
    if condition.residual > tol:
        raise ConditionsViolated(
            f"signed correctability conditions fail: residual {condition.residual:.3e} > {tol:.1e}"
        )
    eta = eta_metric(ops.signature)
    diag = pseudo_diagonalize(condition.entries, eta, tol)
    u = diag.transform
    # entries = eta * gram, so the diagonalized gram is eta * eigenvalues >= 0
    d = np.diag(eta).real * diag.eigenvalues
    d = np.clip(d, 0.0, None)
    # pseudo_diagonalize guarantees pseudounitarity only up to 10*tol
    # (scaled by the condition-matrix norm), so check u at that bound.
    u_tol = 10 * tol * max(1.0, _max_abs(condition.entries))
    f = transform_by_pseudounitary(ops, u, u_tol)
    return f, d, u


def build_syndromes(
    f_ops: SignedOperatorSum, code: CodeSpace, d: np.ndarray, tol: float = DEFAULT_TOL
) -> SyndromeSet:
    """Syndrome projectors and correction unitaries for diagonalized terms.

    Term ``k`` with weight ``d[k] > tol`` satisfies
    ``F_k P = sqrt(d[k]) U_k P`` with ``U_k`` from the polar
    decomposition of ``F_k P``; its syndrome projector is
    ``U_k P U_k^dag``.  Terms with ``d[k] <= tol`` act trivially on the
    code space and are skipped.

    Raises
    ------
    OrthogonalityViolation
        If two retained syndrome projectors fail to be orthogonal, which
        signals that the conditions were not actually diagonal.
    """
    d = np.asarray(d, dtype=float)
    if d.shape != (f_ops.n_terms,):
        raise ValueError(f"weight vector has shape {d.shape}, expected ({f_ops.n_terms},)")
    p = code.projector
    syndromes: list[Syndrome] = []
    for k in range(f_ops.n_terms):
        if d[k] <= tol:
            continue
        factors = polar_on_code(f_ops.operators[k], p, tol)
        u_k = factors.unitary_part
        proj = u_k @ p @ u_k.conj().T
        syndromes.append(Syndrome(proj, u_k, float(d[k]), f_ops.signs[k], k))
    bound = 10 * tol
    for a in range(len(syndromes)):
        for b in range(a + 1, len(syndromes)):
            overlap = _max_abs(syndromes[a].projector @ syndromes[b].projector)
            if overlap > bound:
                raise OrthogonalityViolation(
                    f"syndrome projectors {a} and {b} overlap by {overlap:.3e}"
                )
    return tuple(syndromes)


def negative_part_on_code(ops: SignedOperatorSum, code: CodeSpace) -> float:
    """Largest Frobenius norm of ``E_k P`` over the negative-sign block.

    Zero exactly when the negative part of the decomposition annihilates
    the code space (the reversibility-with-positivity requirement).
    """
    if ops.dim != code.dim:
        raise ValueError(f"operator dimension {ops.dim} does not match code dimension {code.dim}")
    p = code.projector
    worst = 0.0
    for s, op in zip(ops.signs, ops.operators):
        if s < 0:
            worst = max(worst, float(np.linalg.norm(op @ p)))
    return worst


def build_recovery(syndromes: SyndromeSet) -> SignedOperatorSum:
    """Recovery channel ``rho -> sum_j U_j^dag P_j rho P_j U_j``.

    One (+1) term ``U_j^dag P_j`` per syndrome: measure the syndrome,
    then undo its correction unitary.
    """
    if not syndromes:
        raise ValueError("cannot build a recovery from an empty syndrome set")
    dim = syndromes[0].projector.shape[0]
    operators = tuple(s.unitary.conj().T @ s.projector for s in syndromes)
    return SignedOperatorSum(dim, (1,) * len(syndromes), operators)


def _logical_state(code: CodeSpace, coeffs: np.ndarray) -> np.ndarray:
    psi = np.zeros(code.dim, dtype=complex)
    for c, b in zip(coeffs, code.logical_basis):
        psi += c * b
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def _witness_candidates(code: CodeSpace) -> "list[np.ndarray]":
    candidates = [np.outer(b, b.conj()) for b in code.logical_basis]
    candidates.append(code.projector / code.rank)
    rng = np.random.default_rng(_WITNESS_SEED)
    for _ in range(_N_RANDOM_WITNESS_STATES):
        coeffs = rng.standard_normal(code.rank) + 1j * rng.standard_normal(code.rank)
        candidates.append(_logical_state(code, coeffs))
    return candidates


def domain_witness(
    ops: SignedOperatorSum,
    code: CodeSpace,
    syndromes: SyndromeSet,
    tol: float = DEFAULT_TOL,
) -> NegativityWitness | None:
    """Search for a code state with a negative syndrome probability.

    Returns ``None`` when the negative block annihilates the code space
    (nothing to witness).  Otherwise scans candidate states -- logical
    basis states first, then the uniform code mixture, then 64
    reproducible random code states -- against every retained
    negative-sign syndrome, and returns the first state whose
    (unnormalized) outcome probability ``tr(P_j E(rho) P_j)`` is at most
    ``-tol``.

    Raises
    ------
    WitnessSearchFailed
        If the negative block acts on the code space but no scanned
        candidate produced a negative probability.
    """
    if negative_part_on_code(ops, code) <= tol:
        return None
    negative_indices = [j for j, s in enumerate(syndromes) if s.sign < 0]
    if not negative_indices:
        raise WitnessSearchFailed(
            "negative block acts on the code space but produced no retained syndrome"
        )
    for state in _witness_candidates(code):
        out = apply_map(ops, state)
        for j in negative_indices:
            proj = syndromes[j].projector
            prob = float(np.trace(proj @ out @ proj).real)
            if prob <= -tol:
                return NegativityWitness(state, j, prob)
    raise WitnessSearchFailed(
        "no candidate code state produced a negative syndrome probability"
    )


def analyze(ops: SignedOperatorSum, code: CodeSpace, tol: float = DEFAULT_TOL) -> QecReport:
    """Decide reversibility of a signed operator sum on a code space.

    The verdict is

    * ``conditions_violated`` when the signed correctability conditions
      fail on the code space (or when they hold but the map does not
      preserve trace on the code space, so no physically meaningful
      recovery exists);
    * ``code_outside_domain`` when the conditions hold but the negative
      block still acts on the code space -- a witness state with a
      negative outcome probability is attached;
    * ``reversible_positive`` when the conditions hold and the negative
      block annihilates the code space -- a recovery channel built from
      the syndromes is attached.
    """
    condition = ph_condition_matrix(ops, code, tol)
    if condition.residual > tol:
        return QecReport(condition, None, None, None, None, Verdict.CONDITIONS_VIOLATED, None)
    f, d, u = diagonalize_conditions(ops, code, tol)
    syndromes = build_syndromes(f, code, d, tol)
    if negative_part_on_code(f, code) > tol:
        witness = domain_witness(f, code, syndromes, tol)
        return QecReport(condition, u, d, syndromes, None, Verdict.CODE_OUTSIDE_DOMAIN, witness)
    # Reversibility with a physical recovery additionally needs trace
    # preservation on the code space.
    p = code.projector
    acc = np.zeros((ops.dim, ops.dim), dtype=complex)
    for s, op in zip(ops.signs, ops.operators):
        acc += s * (op.conj().T @ op)
    if _max_abs(p @ acc @ p - p) > tol:
        return QecReport(condition, u, d, syndromes, None, Verdict.CONDITIONS_VIOLATED, None)
    recovery = build_recovery(syndromes)
    return QecReport(condition, u, d, syndromes, recovery, Verdict.REVERSIBLE_POSITIVE, None)


def _recovery_samples(code: CodeSpace, trials: int) -> list[np.ndarray]:
    samples = []
    r = code.rank
    for i in range(r):
        coeffs = np.zeros(r, dtype=complex)
        coeffs[i] = 1.0
        samples.append(_logical_state(code, coeffs))
    for i in range(r):
        for j in range(i + 1, r):
            for phase in (1.0, 1.0j):
                coeffs = np.zeros(r, dtype=complex)
                coeffs[i] = 1.0
                coeffs[j] = phase
                samples.append(_logical_state(code, coeffs))
    rng = np.random.default_rng(_VERIFY_SEED)
    for _ in range(trials):
        coeffs = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        samples.append(_logical_state(code, coeffs))
    return samples


def verify_recovery(
    ops: SignedOperatorSum,
    recovery: SignedOperatorSum,
    code: CodeSpace,
    trials: int = 20,
    tol: float = DEFAULT_TOL,
) -> float:
    """Worst-case deviation of ``R(E(P rho P))`` from ``P rho P``.

    Both sides are normalized to unit trace before comparison, so a
    recovery that restores states only up to a constant factor still
    verifies.  Samples are the logical basis states, their pairwise
    superpositions with phases 1 and i, and ``trials`` reproducible
    random code states.

    Raises
    ------
    ZeroTrace
        If a recovered state has trace at most ``tol`` in magnitude.
    """
    if ops.dim != code.dim or recovery.dim != code.dim:
        raise ValueError("map, recovery and code must share one dimension")
    p = code.projector
    worst = 0.0
    for rho in _recovery_samples(code, trials):
        encoded = p @ rho @ p
        encoded = encoded / np.trace(encoded).real
        recovered = apply_map(recovery, apply_map(ops, encoded))
        t = np.trace(recovered).real
        if abs(t) <= tol:
            raise ZeroTrace(f"recovered state has trace {t:.3e}")
        worst = max(worst, _max_abs(recovered / t - encoded))
    return worst
