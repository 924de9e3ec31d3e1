"""Independent reference computations for the test suite.

None of these go through the package's own code paths for the quantity they
check: they use scipy, brute-force optimization, closed forms or explicit
sums instead.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.optimize


def opnorm(A) -> float:
    """Largest singular value via scipy's SVD."""
    return float(scipy.linalg.svdvals(np.asarray(A, dtype=complex))[0])


def derivation_norm_by_optimization(T, restarts: int = 12, seed: int = 0) -> float:
    """sup over F != 0 of ||TF - FT|| / ||F|| (operator norms), by multi-start
    Nelder-Mead over the real and imaginary parts of F."""
    T = np.asarray(T, dtype=complex)
    d = T.shape[0]
    rng = np.random.default_rng(seed)

    def ratio(x):
        F = (x[: d * d] + 1j * x[d * d:]).reshape(d, d)
        nF = opnorm(F)
        if nF == 0:
            return 0.0
        return -opnorm(T @ F - F @ T) / nF

    best = 0.0
    for _ in range(restarts):
        x0 = rng.standard_normal(2 * d * d)
        res = scipy.optimize.minimize(ratio, x0, method="Nelder-Mead",
                                      options={"maxiter": 20000, "maxfev": 20000, "xatol": 1e-10, "fatol": 1e-12})
        best = max(best, -res.fun)
    return best


def generator_by_least_squares(superop: np.ndarray, dim: int) -> np.ndarray:
    """Minimum-norm T solving [T, .] = superop, column-stacked, via lstsq.

    The null space of T -> [T, .] is spanned by the identity, so the
    minimum-norm solution is the trace-zero representative.
    """
    cols = []
    for j in range(dim):
        for i in range(dim):
            E = np.zeros((dim, dim), dtype=complex)
            E[i, j] = 1.0
            # superoperator of F -> E F - F E, built entry by entry
            S = np.zeros((dim * dim, dim * dim), dtype=complex)
            for q in range(dim):
                for p in range(dim):
                    F = np.zeros((dim, dim), dtype=complex)
                    F[p, q] = 1.0
                    S[:, q * dim + p] = (E @ F - F @ E).T.reshape(-1)
            cols.append(S.reshape(-1))
    A = np.stack(cols, axis=1)
    t, *_ = np.linalg.lstsq(A, np.asarray(superop).reshape(-1), rcond=None)
    return t.reshape(dim, dim).T


def pauli_rotation(s: float) -> np.ndarray:
    """e^{is sigma_z} sigma_x e^{-is sigma_z} = cos(2s) sigma_x - sin(2s) sigma_y."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    return np.cos(2 * s) * sx - np.sin(2 * s) * sy


def circulant_momentum_eigenvalues(d: int, a: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Sorted eigenvalues of the periodic central-difference momentum from the
    DFT of its first column."""
    col = np.zeros(d, dtype=complex)
    # (P psi)_j = -i hbar (psi_{j+1} - psi_{j-1}) / 2a  -> circulant first column
    col[1 % d] += 1j * hbar / (2 * a)
    col[-1 % d] += -1j * hbar / (2 * a)
    return np.sort(np.real(np.fft.fft(col)))


def expm_unitary(T, s: float, hbar: float = 1.0) -> np.ndarray:
    return scipy.linalg.expm(-1j * s * np.asarray(T, dtype=complex) / hbar)
