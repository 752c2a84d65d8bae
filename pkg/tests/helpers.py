"""Shared generators and fixed operators for the test suite.

Everything random is driven by an explicit ``numpy.random.Generator`` so
tests are reproducible; scipy only appears here (and in tests) as an
independent oracle, never inside the library.
"""

import numpy as np

from ncpqec import (
    CodeSpace,
    Signature,
    SignedOperatorSum,
    eta_metric,
    projector_from_basis,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def pauli_string(letters: str) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for c in letters:
        out = np.kron(out, PAULI[c])
    return out


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_hermitian(rng, n: int) -> np.ndarray:
    m = random_complex(rng, (n, n))
    return (m + m.conj().T) / 2


def random_unitary(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d: int) -> np.ndarray:
    m = random_complex(rng, (d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_ph(rng, sig: Signature) -> np.ndarray:
    """Random pseudohermitian matrix eta @ (Hermitian)."""
    return eta_metric(sig) @ random_hermitian(rng, sig.size)


def random_pu(rng, sig: Signature, scale: float = 0.5) -> np.ndarray:
    """Pseudounitary via exponentiation of a PH generator (scipy oracle)."""
    from scipy.linalg import expm

    return expm(-1j * scale * random_ph(rng, sig))


def random_real_spectrum_ph(rng, sig: Signature, tol: float = 1e-9) -> np.ndarray:
    """Random eta @ Hermitian with a real spectrum and non-null eigenvectors.

    Indefinite Hermitian draws are retried at small sizes; from size five
    up they almost never have an all-real spectrum, so the Hermitian
    factor is drawn positive definite instead, which forces the product
    to be similar to a Hermitian matrix (real spectrum, no null
    eigenvectors) while still being of the eta @ Hermitian form.
    """
    n = sig.size
    eta = eta_metric(sig)
    for _ in range(400):
        if n <= 4:
            m = random_hermitian(rng, n)
        else:
            g = random_complex(rng, (n, n))
            m = g @ g.conj().T + 0.05 * np.eye(n)
        h = eta @ m
        w, v = np.linalg.eig(h)
        if np.abs(w.imag).max() > tol * max(1.0, np.abs(w).max()):
            continue
        gram = np.einsum("in,ij,jn->n", v.conj(), eta, v)
        if np.abs(gram).min() <= 1e-6:
            continue
        return h
    raise RuntimeError(f"no real-spectrum PH instance found for {sig}")


def random_ops(rng, d: int, p: int, q: int, scale: float = 1.0) -> SignedOperatorSum:
    """Random signed operator sum; p+q <= d*d keeps the terms independent."""
    assert p + q <= d * d
    ops = [scale * random_complex(rng, (d, d)) for _ in range(p + q)]
    return SignedOperatorSum.from_terms((1,) * p + (-1,) * q, ops)


def random_code(rng, d: int, rank: int) -> CodeSpace:
    u = random_unitary(rng, d)
    return projector_from_basis([u[:, k] for k in range(rank)])


def random_code_state(rng, code: CodeSpace) -> np.ndarray:
    """Haar-random pure state in the code space, as a density matrix."""
    amps = random_complex(rng, len(code.logical_basis))
    amps = amps / np.linalg.norm(amps)
    psi = sum(a * v for a, v in zip(amps, code.logical_basis))
    return np.outer(psi, psi.conj())


def bitflip_ops(c0: float) -> SignedOperatorSum:
    """Three-qubit mixture of identity and single-qubit bit flips.

    Weights c0 and c1 = (1-c0)/3 sum (with multiplicity) to one; a
    negative c0 makes the map NCP while keeping it trace preserving.
    """
    c1 = (1.0 - c0) / 3.0
    flips = [pauli_string(s) for s in ("XII", "IXI", "IIX")]
    terms = [(1 if c1 > 0 else -1, np.sqrt(abs(c1)) * f) for f in flips]
    terms.append((1 if c0 > 0 else -1, np.sqrt(abs(c0)) * pauli_string("III")))
    terms.sort(key=lambda t: -t[0])
    return SignedOperatorSum.from_terms([s for s, _ in terms], [op for _, op in terms])


def repetition_code() -> CodeSpace:
    return projector_from_basis([ket(0, 8), ket(7, 8)])


def conditioned_pauli_map(rng, require_negative: bool = True) -> SignedOperatorSum:
    """Weighted Pauli strings whose condition matrix is diagonal on the
    repetition code.

    Each term flips a distinct subset of {nothing, qubit 1, qubit 2,
    qubit 3}; products of two different terms then move |000> off the
    code space, so all cross conditions vanish exactly.  Pattern
    variants (Y for X, even Z strings for the identity slot) keep the
    diagonal property.
    """
    reps = {
        "": ["III", "ZZI", "IZZ", "ZIZ"],
        "1": ["XII", "YII"],
        "2": ["IXI", "IYI"],
        "3": ["IIX", "IIY"],
    }
    keys = list(reps)
    n = int(rng.integers(2, 5))
    chosen = list(rng.choice(keys, size=n, replace=False))
    weights = rng.uniform(0.1, 1.0, size=n)
    n_neg = int(rng.integers(1, n)) if require_negative else 0
    signs = [1] * (n - n_neg) + [-1] * n_neg
    terms = []
    for key, w, s in zip(chosen, weights, signs):
        letters = reps[key][int(rng.integers(0, len(reps[key])))]
        terms.append((s, np.sqrt(w) * pauli_string(letters)))
    terms.sort(key=lambda t: -t[0])
    return SignedOperatorSum.from_terms([s for s, _ in terms], [op for _, op in terms])
