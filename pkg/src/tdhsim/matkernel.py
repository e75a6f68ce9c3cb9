"""Dense complex linear algebra and Pauli strings.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
Hermitian eigendecomposition is the backbone for every matrix function
(exponential, spectral transforms, principal logarithm).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ContractError, DimensionError, DomainError, SizingError

#: Largest matrix dimension any constructor will materialize.
MAX_DIM = 2**14

#: Default tolerance for the structural predicates.
TOL = 1e-10

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def as_matrix(a) -> np.ndarray:
    """Validate ``a`` as a finite square complex matrix and return a copy."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def _check_dim(dim: int, cap: int) -> None:
    if dim > cap:
        raise SizingError(f"dimension {dim} exceeds the cap {cap}")


def kron(a, b, cap: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with the desk-scale size guard."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_dim(a.shape[0] * b.shape[0], cap)
    return np.kron(a, b)


def is_hermitian(h, tol: float = TOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and bool(
        np.max(np.abs(h - h.conj().T), initial=0.0) <= tol
    )


def is_unitary(u, tol: float = TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])), initial=0.0) <= tol)


def spectral_norm(a) -> float:
    """Largest singular value."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    if a.ndim != 2:
        raise DimensionError("spectral_norm expects a matrix")
    return float(np.linalg.norm(a, 2))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def eig_hermitian(h, tol: float = TOL):
    """Eigen-decompose a Hermitian matrix.

    Returns ``(w, v)`` with ascending real eigenvalues ``w`` and a unitary
    ``v`` whose columns are the eigenvectors, so ``h = v @ diag(w) @ v^H``.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ContractError("eig_hermitian requires a Hermitian matrix")
    # symmetrize away the sub-tolerance skew part before LAPACK sees it
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return w, v


def spectral_apply(h, fn, tol: float = TOL) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = eig_hermitian(h, tol)
    return (v * fn(w)) @ v.conj().T


def expm_i(h, t: float, tol: float = TOL) -> np.ndarray:
    """Return ``exp(-i t h)`` for Hermitian ``h``."""
    return spectral_apply(h, lambda w: np.exp(-1j * t * w), tol)


def principal_log_hermitian(u, tol: float = 1e-9) -> np.ndarray:
    """Hermitian ``H`` with ``u = exp(-iH)`` and spectrum in ``(-pi, pi]``.

    Used as an independent oracle for logarithm-of-unitary encodings.
    """
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise ContractError("principal log requires a unitary")
    # u is normal, so the Schur form is diagonal up to rounding
    from scipy.linalg import schur

    t, z = schur(u, output="complex")
    phases = np.angle(np.diag(t))
    h = (z * (-phases)) @ z.conj().T
    return 0.5 * (h + h.conj().T)


def polar_unitary(a) -> np.ndarray:
    """Unitary factor of the polar decomposition, via the SVD."""
    u, _, vh = np.linalg.svd(np.asarray(a, dtype=complex))
    return u @ vh


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-site Paulis, site 0 most significant."""

    ops: str

    def __post_init__(self):
        ops = self.ops.upper()
        if not ops or any(c not in _PAULI for c in ops):
            raise DomainError(f"invalid Pauli string {self.ops!r}")
        object.__setattr__(self, "ops", ops)

    @property
    def n_sites(self) -> int:
        return len(self.ops)

    def anticommutes_with(self, other: "PauliString") -> bool:
        if other.n_sites != self.n_sites:
            raise DimensionError("Pauli strings act on different site counts")
        clashes = sum(
            1 for a, b in zip(self.ops, other.ops) if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 1

    def __str__(self):
        return self.ops


def pauli_matrix(p, cap: int = MAX_DIM) -> np.ndarray:
    """Materialize a Pauli string (or its label) as a dense matrix."""
    if not isinstance(p, PauliString):
        p = PauliString(p)
    _check_dim(2**p.n_sites, cap)
    return reduce(np.kron, (_PAULI[c] for c in p.ops))


def pauli_sum(terms: dict, n_sites: int | None = None) -> np.ndarray:
    """Dense matrix of ``sum(coeff * P)`` over a ``{label: coeff}`` map."""
    if not terms:
        if n_sites is None:
            raise DomainError("empty Pauli sum needs an explicit site count")
        return np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    out = None
    for label, c in terms.items():
        m = complex(c) * pauli_matrix(label)
        if out is not None and m.shape != out.shape:
            raise DimensionError("Pauli labels of different lengths")
        out = m if out is None else out + m
    return out
