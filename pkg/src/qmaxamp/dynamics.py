"""Time evolution of past-type, future-type and reduced ("tilde") states.

Past-type states evolve under H, future-type states under the metric
adjoint of H, tilde states under the metric-Hermitian part of H. All
propagation uses the spectral matrix exponential: the dynamics is linear
and closed-form, so no time stepper is needed.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import KindMismatchError, NotHermitianError
from .linalg import mat_exp
from .qmetric import QMetric, HamiltonianSplit, q_adjoint, q_inner, split_h
from .validation import as_complex_vector, as_square_matrix

__all__ = [
    "StateKind",
    "EvolvingState",
    "TimeSpan",
    "make_state",
    "evolve",
    "transition_amplitude",
    "tilde_state",
    "heisenberg_operator",
]


class StateKind(enum.Enum):
    A_TYPE = "A"        # evolves under H
    B_TYPE = "B"        # evolves under the metric adjoint of H
    TILDE = "tilde"     # evolves under the metric-Hermitian part of H


@dataclass(frozen=True)
class EvolvingState:
    """A ket together with its reference time and evolution kind.

    ``q_norm_at_ref`` records the metric norm at ``ref_time`` only; no
    renormalization ever happens mid-evolution (for non-normal H the
    metric norm of a propagated state is genuinely not conserved).
    """

    ket: np.ndarray
    ref_time: float
    kind: StateKind
    q_norm_at_ref: float


@dataclass(frozen=True)
class TimeSpan:
    """Evolution window [t_start, t_end] with positive duration."""

    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"need t_end > t_start, got [{self.t_start}, {self.t_end}]")

    @property
    def duration(self):
        return self.t_end - self.t_start

    def sample(self, count):
        return np.linspace(self.t_start, self.t_end, count)


def make_state(ket, ref_time, kind, metric: QMetric, normalize=True):
    """Build an EvolvingState, metric-normalized at its reference time."""
    ket = as_complex_vector(ket, "ket")
    norm = np.sqrt(q_inner(ket, ket, metric).real)
    if normalize:
        ket = ket / norm
        norm = 1.0
    return EvolvingState(ket=ket, ref_time=float(ref_time), kind=kind,
                         q_norm_at_ref=float(norm))


def _generator(kind, h, metric):
    if kind is StateKind.A_TYPE:
        return h
    if kind is StateKind.B_TYPE:
        return q_adjoint(h, metric)
    return split_h(h, metric).hqh


def evolve(state: EvolvingState, h, metric: QMetric, t, hbar=1.0, method="spectral"):
    """Propagate ``state`` from its reference time to ``t``.

    The generator is selected by the state's kind; the returned state has
    ref_time = t and carries the (possibly changed) metric norm there.
    """
    h = as_square_matrix(h, "H")
    dt = t - state.ref_time
    if dt == 0.0:
        return state
    gen = _generator(state.kind, h, metric)
    ket = mat_exp(-1j * gen * dt / hbar, method=method) @ state.ket
    return EvolvingState(ket=ket, ref_time=float(t), kind=state.kind,
                         q_norm_at_ref=float(np.sqrt(q_inner(ket, ket, metric).real)))


def transition_amplitude(b: EvolvingState, a: EvolvingState, metric: QMetric,
                         h, t, hbar=1.0):
    """<B(t)|_Q A(t)>; independent of t for states evolved consistently."""
    if a.kind is not StateKind.A_TYPE:
        raise KindMismatchError(f"expected a past-type state, got {a.kind}")
    if b.kind is not StateKind.B_TYPE:
        raise KindMismatchError(f"expected a future-type state, got {b.kind}")
    bk = evolve(b, h, metric, t, hbar=hbar)
    ak = evolve(a, h, metric, t, hbar=hbar)
    return q_inner(bk.ket, ak.ket, metric)


def tilde_state(a_max: EvolvingState, split: HamiltonianSplit, t,
                hbar=1.0, metric: QMetric | None = None):
    """Evolve a maximizing past state under the metric-Hermitian generator.

    The metric norm of the result is conserved (the generator is
    metric-Hermitian), so the reference norm is carried over unless a
    metric is supplied to recompute it.
    """
    dt = t - a_max.ref_time
    if dt == 0.0:
        ket = a_max.ket
    else:
        ket = mat_exp(-1j * split.hqh * dt / hbar) @ a_max.ket
    if metric is not None:
        norm = float(np.sqrt(q_inner(ket, ket, metric).real))
    else:
        norm = a_max.q_norm_at_ref
    return EvolvingState(ket=ket, ref_time=float(t), kind=StateKind.TILDE,
                         q_norm_at_ref=norm)


def heisenberg_operator(o, h, t, t_start, hbar=1.0, herm_tol=1e-10):
    """Conjugated operator e^{iH(t-t_start)} O e^{-iH(t-t_start)} for Hermitian H."""
    o = as_square_matrix(o, "O")
    h = as_square_matrix(h, "H")
    if np.linalg.norm(h - h.conj().T) > herm_tol * max(np.linalg.norm(h), 1e-300):
        raise NotHermitianError("Heisenberg conjugation is defined for Hermitian H only")
    u = mat_exp(-1j * h * (t - t_start) / hbar)
    return u.conj().T @ o @ u
