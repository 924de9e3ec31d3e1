"""Dense complex matrix primitives: adjoints, norms, eigensolves, unitaries.

Operators are plain ``complex128`` numpy arrays of shape ``(d, d)``; kets are
``complex128`` arrays of shape ``(d,)``. Nothing here mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    InvalidOperatorError,
    NotHermitianError,
)

KET_NORM_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
NILPOTENT = np.array([[0, 1], [0, 0]], dtype=complex)


def as_operator(A) -> np.ndarray:
    """Coerce ``A`` to a finite square complex128 matrix."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise InvalidOperatorError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidOperatorError("operator has non-finite entries")
    return M


def as_ket(psi, tol: float = KET_NORM_TOL) -> np.ndarray:
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise InvalidOperatorError(f"expected a non-empty vector, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise InvalidOperatorError(f"ket is not normalized (norm {norm!r})")
    return v


def check_same_dim(*ops: np.ndarray) -> int:
    dims = {op.shape[0] for op in ops}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operator dimensions differ: {sorted(dims)}")
    return dims.pop()


def adjoint(A) -> np.ndarray:
    return as_operator(A).conj().T


def commutator(A, B) -> np.ndarray:
    A, B = as_operator(A), as_operator(B)
    check_same_dim(A, B)
    return A @ B - B @ A


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus, from a general (unsymmetric) eigensolve."""
    A = as_operator(A)
    try:
        eigenvalues = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("eigenvalue solve did not converge", {"dim": A.shape[0], "lapack": str(exc)}) from exc
    return float(np.max(np.abs(eigenvalues)))


def cstar_norm(A) -> float:
    """Operator norm: square root of the largest eigenvalue of ``A^dag A``.

    Computed as the largest singular value, which is the same number without
    squaring the condition of ``A``.
    """
    A = as_operator(A)
    try:
        return float(np.linalg.norm(A, 2))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("singular value solve did not converge", {"dim": A.shape[0], "lapack": str(exc)}) from exc


def hermiticity_defect(A) -> float:
    A = as_operator(A)
    return cstar_norm(A - A.conj().T)


def hermitian_tolerance(A, tol: float | None = None) -> float:
    """Default tolerance is ``1e-10 * max(1, ||A||)``."""
    if tol is not None:
        return float(tol)
    return 1e-10 * max(1.0, cstar_norm(A))


def require_hermitian(A, tol: float | None = None) -> np.ndarray:
    A = as_operator(A)
    limit = hermitian_tolerance(A, tol)
    defect = hermiticity_defect(A)
    if defect > limit:
        raise NotHermitianError(defect, limit)
    return A


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real spectrum with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int

    @property
    def kets(self) -> list[np.ndarray]:
        return [self.eigenvectors[:, k].copy() for k in range(self.source_dim)]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def reconstruction_residual(self, A) -> float:
        return cstar_norm(as_operator(A) - self.reconstruct())

    def orthonormality_defect(self) -> float:
        V = self.eigenvectors
        return cstar_norm(V.conj().T @ V - np.eye(self.source_dim))


def hermitian_eig(A, tol: float | None = None) -> EigenDecomposition:
    A = require_hermitian(A, tol)
    try:
        # symmetrize so the solver sees an exactly Hermitian input
        w, V = np.linalg.eigh((A + A.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("Hermitian eigensolve did not converge", {"dim": A.shape[0], "lapack": str(exc)}) from exc
    for arr in (w, V):
        arr.setflags(write=False)
    return EigenDecomposition(eigenvalues=w, eigenvectors=V, source_dim=A.shape[0])


def unitary_from_eig(eig: EigenDecomposition, s: float, hbar: float = 1.0) -> np.ndarray:
    """``exp(-i s T / hbar)`` for the operator whose decomposition is ``eig``."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    V = eig.eigenvectors
    phases = np.exp(-1j * s * eig.eigenvalues / hbar)
    return (V * phases) @ V.conj().T


def evolution_unitary(T, s: float, hbar: float = 1.0, tol: float | None = None) -> np.ndarray:
    """Return ``U = exp(-i s T / hbar)`` through the spectral decomposition of ``T``."""
    return unitary_from_eig(hermitian_eig(T, tol), s, hbar)


def unitarity_defect(U) -> float:
    U = as_operator(U)
    return cstar_norm(U.conj().T @ U - np.eye(U.shape[0]))
