"""Maximization of the metric transition amplitude |<B|_Q A>|.

Three independent routes to the same maximum:

* analytic family — only eigencomponents whose eigenvalue imaginary part
  sits in the maximal band carry weight; equal moduli for past and future
  coefficients, and a common phase combination across the band. The
  achieved modulus is exp(imag_max * duration / hbar).
* SVD oracle — the supremum of |<B|_Q M A>| over metric-normalized pairs
  is the top singular value of S M S^-1 with S the metric square root.
* projected gradient ascent — brute-force check that no better pair
  exists, run on ordinary unit spheres in the S-transformed coordinates.

For Hermitian H the past state is fixed and only the future state is
optimized; the maximizer is the evolved past state up to a global phase.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    NoConvergenceError,
    NotHermitianError,
    SubsetMismatchError,
)
from .linalg import EigenDecomposition, mat_exp, svd_max
from .qmetric import QMetric, q_inner
from .dynamics import EvolvingState, StateKind, TimeSpan, make_state
from .validation import as_square_matrix

__all__ = [
    "ImagMaxSubset",
    "MaxFamilyParams",
    "MaximizationResult",
    "imag_max_subset",
    "analytic_max_pair",
    "svd_oracle_max",
    "gradient_ascent_max",
    "rat_maximize_b",
    "random_q_normalized_pair",
]

DEFAULT_TOL_BAND = 1e-9


@dataclass(frozen=True)
class ImagMaxSubset:
    """Indices of eigenvalues whose imaginary part is maximal (within a band)."""

    imag_max: float
    indices: tuple
    tol_band: float


@dataclass(frozen=True)
class MaxFamilyParams:
    """Free parameters of the analytic maximizing family.

    ``weights`` are the moduli of the band coefficients (unit 2-norm),
    ``phases`` their arbitrary phases, ``theta_c`` the common phase offset
    between past and future coefficients.
    """

    weights: np.ndarray
    phases: np.ndarray
    theta_c: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        p = np.asarray(self.phases, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "phases", p)
        if w.shape != p.shape or w.ndim != 1 or w.size == 0:
            raise SubsetMismatchError("weights and phases must be matching 1-D arrays")
        if np.any(w < 0):
            raise SubsetMismatchError("weights must be nonnegative")
        if abs(np.sum(w**2) - 1.0) > 1e-12:
            raise SubsetMismatchError("squared weights must sum to 1 within 1e-12")

    @classmethod
    def uniform(cls, k, theta_c=0.0):
        return cls(weights=np.full(k, 1.0 / math.sqrt(k)), phases=np.zeros(k),
                   theta_c=theta_c)

    @classmethod
    def random(cls, k, rng):
        w = rng.uniform(0.1, 1.0, size=k)
        w = w / np.linalg.norm(w)
        return cls(weights=w, phases=rng.uniform(-np.pi, np.pi, size=k),
                   theta_c=float(rng.uniform(-np.pi, np.pi)))


@dataclass(frozen=True)
class MaximizationResult:
    a_state: EvolvingState
    b_state: EvolvingState
    achieved_amplitude: float
    predicted_amplitude: float
    method: str


def imag_max_subset(decomp: EigenDecomposition, tol_band=DEFAULT_TOL_BAND):
    """Band of eigenvalue indices attaining the maximal imaginary part."""
    imag = decomp.eigenvalues.imag
    top = float(imag.max())
    band = tol_band * max(1.0, abs(top))
    idx = tuple(int(i) for i in np.nonzero(imag >= top - band)[0])
    return ImagMaxSubset(imag_max=top, indices=idx, tol_band=tol_band)


def _amplitude(b_state, a_state, metric, h, span, hbar):
    """|<B(t_start)|_Q exp(-iH*duration/hbar) A(t_start)>| without re-evolving."""
    m = mat_exp(-1j * h * span.duration / hbar)
    return abs(q_inner(b_state.ket, m @ a_state.ket, metric))


def analytic_max_pair(decomp: EigenDecomposition, metric: QMetric, span: TimeSpan,
                      params: MaxFamilyParams, hbar=1.0,
                      tol_band=DEFAULT_TOL_BAND) -> MaximizationResult:
    """Construct the analytically characterized maximizing pair.

    Past coefficients w_i e^{i phase_i} on the maximal band (zero off it);
    future coefficients share the moduli, with phases shifted by
    -Re(lambda_i) * duration / hbar - theta_c so the per-component phase
    combination is constant across the band.
    """
    subset = imag_max_subset(decomp, tol_band)
    k = len(subset.indices)
    if params.weights.size != k:
        raise SubsetMismatchError(
            f"params carry {params.weights.size} components but the maximal band has {k}"
        )
    n = decomp.dim
    idx = np.array(subset.indices)
    lam = decomp.eigenvalues[idx]

    a_coef = np.zeros(n, dtype=complex)
    a_coef[idx] = params.weights * np.exp(1j * params.phases)
    b_phases = params.phases - lam.real * span.duration / hbar - params.theta_c
    b_coef = np.zeros(n, dtype=complex)
    b_coef[idx] = params.weights * np.exp(1j * b_phases)

    a_state = make_state(decomp.p @ a_coef, span.t_start, StateKind.A_TYPE, metric)
    b_state = make_state(decomp.p @ b_coef, span.t_end, StateKind.B_TYPE, metric)

    h = decomp.reconstruct()
    predicted = math.exp(subset.imag_max * span.duration / hbar)
    achieved = _amplitude(b_state, a_state, metric, h, span, hbar)
    return MaximizationResult(a_state=a_state, b_state=b_state,
                              achieved_amplitude=achieved,
                              predicted_amplitude=predicted, method="analytic")


def svd_oracle_max(h, metric: QMetric, span: TimeSpan, hbar=1.0) -> MaximizationResult:
    """Independent maximizer via the top singular pair of S M S^-1.

    With S the metric square root and M the full-span propagator, the
    supremum of |<B|_Q M A>| over metric-normalized A, B equals the top
    singular value; the maximizers are S^-1 times the singular vectors.
    """
    h = as_square_matrix(h, "H")
    m = mat_exp(-1j * h * span.duration / hbar)
    sigma, u, v = svd_max(metric.q_sqrt @ m @ metric.q_sqrt_inv)
    a_state = make_state(metric.q_sqrt_inv @ v, span.t_start, StateKind.A_TYPE, metric)
    b_state = make_state(metric.q_sqrt_inv @ u, span.t_end, StateKind.B_TYPE, metric)
    imag_max = float(np.linalg.eigvals(h).imag.max())
    return MaximizationResult(a_state=a_state, b_state=b_state,
                              achieved_amplitude=sigma,
                              predicted_amplitude=math.exp(imag_max * span.duration / hbar),
                              method="svd-oracle")


def _sphere_step(x, grad, step):
    cand = x + step * grad
    return cand / np.linalg.norm(cand)


def gradient_ascent_max(h, metric: QMetric, span: TimeSpan, restarts=32, seed=0,
                        hbar=1.0, max_iter=10000, gain_tol=1e-12) -> MaximizationResult:
    """Projected gradient ascent over the product of unit spheres.

    Works in metric-square-root coordinates so both spheres are ordinary
    2-norm spheres; retraction by renormalization, backtracking halving
    from step 1.0, stop when the relative amplitude gain drops below
    ``gain_tol``. Best over ``restarts`` seeded restarts, deterministic
    tie-break on the lowest restart index.
    """
    h = as_square_matrix(h, "H")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    m = mat_exp(-1j * h * span.duration / hbar)
    nmat = metric.q_sqrt @ m @ metric.q_sqrt_inv
    nadj = nmat.conj().T
    n = h.shape[0]

    best = None  # (amplitude, restart index, x, y)
    any_converged = False
    rng = np.random.default_rng(seed)
    for r in range(restarts):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        y /= np.linalg.norm(y)
        f = abs(y.conj() @ nmat @ x)
        converged = False
        for _ in range(max_iter):
            # alternate the two sphere factors: a simultaneous step
            # self-interferes near the flat maximizing manifold and
            # degrades to a sublinear crawl
            f_before = f
            s = y.conj() @ nmat @ x
            if abs(s) < 1e-300:
                x = _sphere_step(x, rng.standard_normal(n) + 1j * rng.standard_normal(n), 0.5)
                continue
            gx = nadj @ y * (s / abs(s))
            gx = gx - (x.conj() @ gx).real * x
            step = 1.0
            while step > 1e-16:
                xc = _sphere_step(x, gx, step)
                fc = abs(y.conj() @ nmat @ xc)
                if fc > f:
                    x, f = xc, fc
                    break
                step *= 0.5

            s = y.conj() @ nmat @ x
            gy = nmat @ x * np.conj(s / abs(s))
            gy = gy - (y.conj() @ gy).real * y
            step = 1.0
            while step > 1e-16:
                yc = _sphere_step(y, gy, step)
                fc = abs(yc.conj() @ nmat @ x)
                if fc > f:
                    y, f = yc, fc
                    break
                step *= 0.5

            if (f - f_before) / max(f_before, 1e-300) < gain_tol:
                converged = True
                break
        any_converged = any_converged or converged
        if converged and (best is None or f > best[0]):
            best = (f, r, x, y)
    if not any_converged or best is None:
        raise NoConvergenceError(
            f"no restart met the stopping rule within {max_iter} iterations"
        )

    f, _, x, y = best
    a_state = make_state(metric.q_sqrt_inv @ x, span.t_start, StateKind.A_TYPE, metric)
    b_state = make_state(metric.q_sqrt_inv @ y, span.t_end, StateKind.B_TYPE, metric)
    imag_max = float(np.linalg.eigvals(h).imag.max())
    return MaximizationResult(a_state=a_state, b_state=b_state,
                              achieved_amplitude=float(f),
                              predicted_amplitude=math.exp(imag_max * span.duration / hbar),
                              method="gradient-ascent")


def rat_maximize_b(a_state: EvolvingState, h, span: TimeSpan, theta_c=0.0,
                   hbar=1.0, herm_tol=1e-10) -> MaximizationResult:
    """Optimal future state for a fixed past state under Hermitian H.

    The maximizer is the evolved past state times e^{-i theta_c}; the
    achieved amplitude modulus is exactly 1 for normalized input.
    """
    h = as_square_matrix(h, "H")
    if np.linalg.norm(h - h.conj().T) > herm_tol * max(np.linalg.norm(h), 1e-300):
        raise NotHermitianError("fixed-past maximization requires Hermitian H")
    from .qmetric import identity_metric

    metric = identity_metric(h.shape[0])
    u = mat_exp(-1j * h * span.duration / hbar)
    evolved = u @ a_state.ket
    b_ket = np.exp(-1j * theta_c) * evolved
    b_state = make_state(b_ket, span.t_end, StateKind.B_TYPE, metric)
    achieved = abs(q_inner(b_state.ket, evolved, metric))
    return MaximizationResult(a_state=a_state, b_state=b_state,
                              achieved_amplitude=achieved,
                              predicted_amplitude=1.0, method="analytic")


def random_q_normalized_pair(n, metric: QMetric, rng, span: TimeSpan):
    """Random metric-normalized past/future pair, for bound sampling."""
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a_state = make_state(a, span.t_start, StateKind.A_TYPE, metric)
    b_state = make_state(b, span.t_end, StateKind.B_TYPE, metric)
    return a_state, b_state
