"""Normalized matrix elements between pre- and post-selected states.

The central quantity is <B(t)|_Q O |A(t)> / <B(t)|_Q A(t)>. For a
maximizing state pair and a metric-Hermitian observable it is real,
equals the ordinary metric expectation in the reduced ("tilde") state,
and evolves under the metric-Hermitian part of the Hamiltonian. Each of
those claims has a verification routine here.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    NotHermitianError,
    NotQHermitianError,
    VanishingDenominatorError,
)
from .linalg import commutator
from .qmetric import QMetric, HamiltonianSplit, is_q_hermitian, q_inner, split_h
from .dynamics import EvolvingState, evolve, tilde_state
from .maximize import MaximizationResult
from .validation import as_square_matrix

__all__ = [
    "WeakValueReport",
    "normalized_matrix_element",
    "verify_reality",
    "tilde_equivalence",
    "ehrenfest_check",
    "rat_collapse_check",
]

DENOM_TOL = 1e-12


@dataclass(frozen=True)
class WeakValueReport:
    value: complex
    imag_residual: float
    tilde_delta: float
    aa_delta: float | None
    time: float


def normalized_matrix_element(o, b: EvolvingState, a: EvolvingState,
                              metric: QMetric, h, t, hbar=1.0):
    """<B(t)|_Q O |A(t)> / <B(t)|_Q A(t)>."""
    o = as_square_matrix(o, "O")
    bk = evolve(b, h, metric, t, hbar=hbar)
    ak = evolve(a, h, metric, t, hbar=hbar)
    denom = q_inner(bk.ket, ak.ket, metric)
    scale = bk.q_norm_at_ref * ak.q_norm_at_ref
    if abs(denom) <= DENOM_TOL * max(scale, 1e-300):
        raise VanishingDenominatorError(
            f"|<B|_Q A>| = {abs(denom):.3e} is numerically zero "
            "(near-orthogonal pre/post-selection)"
        )
    return q_inner(bk.ket, o @ ak.ket, metric) / denom


def _tilde_expectation(o, a_max, split, metric, t, hbar):
    st = tilde_state(a_max, split, t, hbar=hbar, metric=metric)
    return q_inner(st.ket, o @ st.ket, metric) / q_inner(st.ket, st.ket, metric)


def verify_reality(o, result: MaximizationResult, metric: QMetric, h,
                   times, hbar=1.0, herm_tol=1e-8):
    """Weak-value reports over ``times`` for a maximizing pair.

    Requires a metric-Hermitian observable; reality is not claimed
    otherwise. ``aa_delta`` is filled only when H is Hermitian.
    """
    o = as_square_matrix(o, "O")
    h = as_square_matrix(h, "H")
    if not is_q_hermitian(o, metric, tol=herm_tol):
        raise NotQHermitianError("observable fails the metric-Hermiticity check")
    split = split_h(h, metric)
    hermitian_h = np.linalg.norm(h - h.conj().T) <= 1e-10 * max(np.linalg.norm(h), 1e-300)

    reports = []
    for t in times:
        value = normalized_matrix_element(o, result.b_state, result.a_state,
                                          metric, h, t, hbar=hbar)
        tilde_val = _tilde_expectation(o, result.a_state, split, metric, t, hbar)
        aa_delta = None
        if hermitian_h:
            ak = evolve(result.a_state, h, metric, t, hbar=hbar)
            aa = q_inner(ak.ket, o @ ak.ket, metric) / q_inner(ak.ket, ak.ket, metric)
            aa_delta = abs(value - aa)
        reports.append(WeakValueReport(
            value=value,
            imag_residual=abs(value.imag) / (1.0 + abs(value)),
            tilde_delta=abs(value - tilde_val),
            aa_delta=aa_delta,
            time=float(t),
        ))
    return reports


def tilde_equivalence(o, result: MaximizationResult, split: HamiltonianSplit,
                      metric: QMetric, times, hbar=1.0):
    """Max over ``times`` of |weak value - tilde-state expectation|."""
    o = as_square_matrix(o, "O")
    h = split.reconstruct()
    worst = 0.0
    for t in times:
        value = normalized_matrix_element(o, result.b_state, result.a_state,
                                          metric, h, t, hbar=hbar)
        tilde_val = _tilde_expectation(o, result.a_state, split, metric, t, hbar)
        worst = max(worst, abs(value - tilde_val))
    return worst


def ehrenfest_check(o, result: MaximizationResult, split: HamiltonianSplit,
                    metric: QMetric, t, dt, hbar=1.0):
    """Central-difference time derivative of the tilde expectation vs the
    exact commutator form. Returns (lhs, rhs, |lhs - rhs|); the error
    shrinks as O(dt^2).
    """
    o = as_square_matrix(o, "O")
    f_plus = _tilde_expectation(o, result.a_state, split, metric, t + dt, hbar).real
    f_minus = _tilde_expectation(o, result.a_state, split, metric, t - dt, hbar).real
    lhs = (f_plus - f_minus) / (2.0 * dt)
    comm = commutator(split.hqh, o)
    rhs = ((1j / hbar) * _tilde_expectation(comm, result.a_state, split, metric, t, hbar)).real
    return lhs, rhs, abs(lhs - rhs)


def rat_collapse_check(o, a_state: EvolvingState, b_max: MaximizationResult,
                       h, t, hbar=1.0, herm_tol=1e-10):
    """|weak value - ordinary expectation in A(t)| for Hermitian H.

    With the future state chosen optimally for the fixed past state the
    weak value collapses to the usual expectation, independently of the
    global phase used in the optimizer.
    """
    h = as_square_matrix(h, "H")
    if np.linalg.norm(h - h.conj().T) > herm_tol * max(np.linalg.norm(h), 1e-300):
        raise NotHermitianError("collapse check requires Hermitian H")
    from .qmetric import identity_metric

    metric = identity_metric(h.shape[0])
    value = normalized_matrix_element(o, b_max.b_state, a_state, metric, h, t, hbar=hbar)
    ak = evolve(a_state, h, metric, t, hbar=hbar)
    aa = q_inner(ak.ket, np.asarray(o, dtype=complex) @ ak.ket, metric) \
        / q_inner(ak.ket, ak.ket, metric)
    return abs(value - aa)
