"""Dense complex linear algebra for small (n <= 64) matrices.

Everything here is a pure function of its inputs. Eigendecompositions are
made deterministic (fixed eigenvalue ordering and eigenvector phase/scale
convention) so that downstream metric construction is reproducible.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    NotDiagonalizableError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)
from .validation import as_square_matrix, check_same_shape

__all__ = [
    "EigenDecomposition",
    "eigendecompose",
    "mat_exp",
    "hermitian_sqrt",
    "svd_max",
    "solve",
    "commutator",
]

#: default relative tolerance for the spectral reconstruction residual
DEFAULT_EIG_TOL = 1e-9
#: eigenvector-matrix condition number above which we declare "defective"
DEFAULT_COND_THRESHOLD = 1e8


@dataclass(frozen=True)
class EigenDecomposition:
    """Diagonalization H = P diag(eigenvalues) P^-1.

    Columns of ``p`` are unit-norm eigenvectors with their first
    significant component rotated onto the positive real axis.
    Eigenvalues are sorted by descending imaginary part, then descending
    real part, so the maximal-imaginary-part subset is always a prefix.
    """

    p: np.ndarray
    eigenvalues: np.ndarray
    cond_p: float

    @property
    def dim(self):
        return self.p.shape[0]

    def p_inv(self):
        return np.linalg.inv(self.p)

    def reconstruct(self):
        """Return P diag(eigenvalues) P^-1."""
        return (self.p * self.eigenvalues) @ self.p_inv()


def eigendecompose(h, tol=DEFAULT_EIG_TOL, cond_threshold=DEFAULT_COND_THRESHOLD):
    """Diagonalize a general complex square matrix.

    Raises NotDiagonalizableError when the eigenvector matrix condition
    number exceeds ``cond_threshold`` or the reconstruction residual
    exceeds ``tol * ||h||`` (Jordan blocks, near-defective matrices).
    """
    h = as_square_matrix(h, "hamiltonian")
    vals, vecs = np.linalg.eig(h)
    n = h.shape[0]

    order = np.lexsort((np.arange(n), -vals.real, -vals.imag))
    vals = vals[order]
    vecs = vecs[:, order]

    # deterministic column convention: unit norm, leading component positive real
    for j in range(n):
        col = vecs[:, j]
        col = col / np.linalg.norm(col)
        lead = col[np.argmax(np.abs(col))]
        col = col * (np.abs(lead) / lead)
        vecs[:, j] = col

    cond_p = float(np.linalg.cond(vecs))
    if not np.isfinite(cond_p) or cond_p > cond_threshold:
        raise NotDiagonalizableError(
            f"eigenvector matrix condition {cond_p:.3e} exceeds threshold {cond_threshold:.1e}"
        )

    h_norm = np.linalg.norm(h)
    residual = np.linalg.norm((vecs * vals) @ np.linalg.inv(vecs) - h)
    if residual > tol * max(h_norm, np.finfo(float).tiny):
        raise NotDiagonalizableError(
            f"spectral reconstruction residual {residual:.3e} exceeds {tol:.1e} * ||H||"
        )

    return EigenDecomposition(p=vecs, eigenvalues=vals, cond_p=cond_p)


def mat_exp(m, method="spectral"):
    """Matrix exponential e^M.

    method="spectral" diagonalizes M (exact for diagonalizable input up
    to roundoff); method="scaling-squaring" delegates to scipy's Pade
    implementation and serves as the independent cross-check path.
    """
    m = as_square_matrix(m)
    if method == "spectral":
        dec = eigendecompose(m)
        return (dec.p * np.exp(dec.eigenvalues)) @ dec.p_inv()
    if method == "scaling-squaring":
        return scipy.linalg.expm(m)
    raise ValueError(f"unknown method {method!r}")


def hermitian_sqrt(m, herm_tol=1e-10):
    """Hermitian positive-definite square root S with S @ S = m."""
    m = as_square_matrix(m)
    if np.linalg.norm(m - m.conj().T) > herm_tol * max(np.linalg.norm(m), 1e-300):
        raise NotPositiveDefiniteError("matrix is not Hermitian")
    w, v = np.linalg.eigh(m)
    if w[0] <= 0:
        raise NotPositiveDefiniteError(f"minimum eigenvalue {w[0]:.3e} is not positive")
    s = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def svd_max(m):
    """Largest singular value and its left/right singular pair (unit norm)."""
    m = as_square_matrix(m)
    u, s, vh = np.linalg.svd(m)
    return float(s[0]), u[:, 0].copy(), vh[0].conj().copy()


def solve(m, rhs):
    """Solve m @ x = rhs for vector or matrix right-hand side."""
    m = as_square_matrix(m)
    try:
        x = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrixError("solution overflowed; matrix numerically singular")
    return x


def commutator(a, b):
    """AB - BA."""
    a = as_square_matrix(a, "A")
    b = as_square_matrix(b, "B")
    check_same_shape(a, b, ("A", "B"))
    return a @ b - b @ a
