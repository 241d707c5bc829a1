"""Metric-operator inner product and its operator algebra.

Given a diagonalization H = P D P^-1, the metric Q = (P^dag)^-1 P^-1 is
Hermitian positive definite and makes the eigenvector columns orthonormal
under <u|Q|v>. With respect to that inner product H becomes normal, and
every operator acquires a metric adjoint A -> Q^-1 A^dag Q.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NotPositiveDefiniteError
from .linalg import EigenDecomposition, commutator
from .validation import as_complex_vector, as_square_matrix, check_same_shape

__all__ = [
    "QMetric",
    "HamiltonianSplit",
    "build_q",
    "identity_metric",
    "q_inner",
    "q_norm",
    "q_normalize",
    "q_adjoint",
    "split_h",
    "is_q_normal",
    "is_q_hermitian",
]


@dataclass(frozen=True)
class QMetric:
    """Hermitian positive-definite metric with cached inverse and square roots."""

    q: np.ndarray
    q_inv: np.ndarray
    q_sqrt: np.ndarray
    q_sqrt_inv: np.ndarray
    source_cond_p: float

    @property
    def dim(self):
        return self.q.shape[0]


@dataclass(frozen=True)
class HamiltonianSplit:
    """Metric-Hermitian and anti-metric-Hermitian parts; hqh + hqa = H."""

    hqh: np.ndarray
    hqa: np.ndarray

    def reconstruct(self):
        return self.hqh + self.hqa


def _metric_from_q(q_mat, source_cond_p):
    q_mat = 0.5 * (q_mat + q_mat.conj().T)
    w, v = np.linalg.eigh(q_mat)
    if w[0] <= 0:
        raise NotPositiveDefiniteError(
            f"metric lost positivity (min eigenvalue {w[0]:.3e}); "
            "eigenvector matrix too ill-conditioned"
        )
    sqrt_w = np.sqrt(w)
    q_sqrt = (v * sqrt_w) @ v.conj().T
    q_sqrt_inv = (v / sqrt_w) @ v.conj().T
    q_inv = (v / w) @ v.conj().T
    return QMetric(
        q=q_mat,
        q_inv=0.5 * (q_inv + q_inv.conj().T),
        q_sqrt=0.5 * (q_sqrt + q_sqrt.conj().T),
        q_sqrt_inv=0.5 * (q_sqrt_inv + q_sqrt_inv.conj().T),
        source_cond_p=float(source_cond_p),
    )


def build_q(decomp: EigenDecomposition) -> QMetric:
    """Metric Q = (P^dag)^-1 P^-1 from an eigendecomposition.

    The eigenvector columns of P are exactly orthonormal under the
    resulting inner product: <col_i|Q|col_j> = delta_ij.
    """
    p_inv = decomp.p_inv()
    return _metric_from_q(p_inv.conj().T @ p_inv, decomp.cond_p)


def identity_metric(n) -> QMetric:
    """Trivial metric Q = I (ordinary inner product)."""
    eye = np.eye(n, dtype=complex)
    return QMetric(q=eye, q_inv=eye.copy(), q_sqrt=eye.copy(),
                   q_sqrt_inv=eye.copy(), source_cond_p=1.0)


def q_inner(u, v, metric: QMetric):
    """Inner product u^dag Q v."""
    u = as_complex_vector(u, "u")
    v = as_complex_vector(v, "v")
    check_same_shape(u, v, ("u", "v"))
    check_same_shape(u, metric.q[0], ("u", "metric row"))
    return complex(u.conj() @ metric.q @ v)


def q_norm(v, metric: QMetric):
    return float(np.sqrt(q_inner(v, v, metric).real))


def q_normalize(v, metric: QMetric):
    return as_complex_vector(v) / q_norm(v, metric)


def q_adjoint(a, metric: QMetric):
    """Metric adjoint Q^-1 A^dag Q."""
    a = as_square_matrix(a, "A")
    check_same_shape(a, metric.q, ("A", "metric"))
    return metric.q_inv @ a.conj().T @ metric.q


def split_h(h, metric: QMetric) -> HamiltonianSplit:
    """Split H into its metric-Hermitian and anti-metric-Hermitian halves."""
    h = as_square_matrix(h, "H")
    adj = q_adjoint(h, metric)
    return HamiltonianSplit(hqh=0.5 * (h + adj), hqa=0.5 * (h - adj))


def is_q_normal(h, metric: QMetric, tol=1e-8):
    """True iff H commutes with its metric adjoint (relative to ||H||^2)."""
    h = as_square_matrix(h, "H")
    h_norm = np.linalg.norm(h)
    if h_norm == 0.0:
        return True
    resid = np.linalg.norm(commutator(h, q_adjoint(h, metric)))
    return bool(resid <= tol * h_norm**2)


def is_q_hermitian(o, metric: QMetric, tol=1e-8):
    """True iff O equals its metric adjoint (relative to ||O||)."""
    o = as_square_matrix(o, "O")
    o_norm = np.linalg.norm(o)
    if o_norm == 0.0:
        return True
    return bool(np.linalg.norm(o - q_adjoint(o, metric)) <= tol * o_norm)
