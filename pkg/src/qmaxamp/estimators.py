"""Scikit-learn style estimators over the maximization core.

Each estimator is fit on a complex square Hamiltonian matrix and exposes
the learned maximizing state pair, the metric and the achieved amplitude
as trailing-underscore attributes, so the algorithms compose with the
usual ``get_params`` / ``set_params`` / ``clone`` machinery.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import linalg, qmetric, maximize, weakvalue
from .dynamics import StateKind, TimeSpan, make_state
from .validation import as_square_matrix

__all__ = [
    "AnalyticMaximizer",
    "SvdOracleMaximizer",
    "GradientAscentMaximizer",
    "HermitianPostSelector",
]


class _BaseMaximizer(BaseEstimator):
    """Shared fit plumbing: validate H, diagonalize, build the metric."""

    def __init__(self, t_start=0.0, t_end=1.0, hbar=1.0):
        self.t_start = t_start
        self.t_end = t_end
        self.hbar = hbar

    def _span(self):
        return TimeSpan(self.t_start, self.t_end)

    def fit(self, H, y=None):
        H = as_square_matrix(H, "H")
        self.hamiltonian_ = H
        self.decomposition_ = linalg.eigendecompose(H)
        self.q_metric_ = qmetric.build_q(self.decomposition_)
        self.result_ = self._maximize()
        self.amplitude_ = self.result_.achieved_amplitude
        self.a_state_ = self.result_.a_state
        self.b_state_ = self.result_.b_state
        return self

    def _maximize(self):
        raise NotImplementedError

    def score(self, H=None, y=None):
        """Achieved transition-amplitude modulus."""
        check_is_fitted(self, "result_")
        return self.amplitude_

    def weak_value(self, O, t):
        """Normalized matrix element of O between the fitted pair at time t."""
        check_is_fitted(self, "result_")
        return weakvalue.normalized_matrix_element(
            O, self.b_state_, self.a_state_, self.q_metric_, self.hamiltonian_,
            t, hbar=self.hbar)


class AnalyticMaximizer(_BaseMaximizer):
    """Closed-form maximizing pair from the maximal-imaginary-part band."""

    def __init__(self, t_start=0.0, t_end=1.0, hbar=1.0, weights=None,
                 phases=None, theta_c=0.0, tol_band=1e-9):
        super().__init__(t_start=t_start, t_end=t_end, hbar=hbar)
        self.weights = weights
        self.phases = phases
        self.theta_c = theta_c
        self.tol_band = tol_band

    def _maximize(self):
        subset = maximize.imag_max_subset(self.decomposition_, self.tol_band)
        k = len(subset.indices)
        if self.weights is None:
            params = maximize.MaxFamilyParams.uniform(k, theta_c=self.theta_c)
        else:
            phases = np.zeros(k) if self.phases is None else np.asarray(self.phases)
            params = maximize.MaxFamilyParams(weights=np.asarray(self.weights),
                                              phases=phases, theta_c=self.theta_c)
        return maximize.analytic_max_pair(self.decomposition_, self.q_metric_,
                                          self._span(), params, hbar=self.hbar,
                                          tol_band=self.tol_band)


class SvdOracleMaximizer(_BaseMaximizer):
    """Independent maximizer via the top singular pair of the whitened propagator."""

    def _maximize(self):
        return maximize.svd_oracle_max(self.hamiltonian_, self.q_metric_,
                                       self._span(), hbar=self.hbar)


class GradientAscentMaximizer(_BaseMaximizer):
    """Projected gradient ascent with seeded restarts."""

    def __init__(self, t_start=0.0, t_end=1.0, hbar=1.0, restarts=32, seed=0,
                 max_iter=10000):
        super().__init__(t_start=t_start, t_end=t_end, hbar=hbar)
        self.restarts = restarts
        self.seed = seed
        self.max_iter = max_iter

    def _maximize(self):
        return maximize.gradient_ascent_max(self.hamiltonian_, self.q_metric_,
                                            self._span(), restarts=self.restarts,
                                            seed=self.seed, hbar=self.hbar,
                                            max_iter=self.max_iter)


class HermitianPostSelector(BaseEstimator):
    """Optimal future state for a fixed past state under Hermitian H."""

    def __init__(self, t_start=0.0, t_end=1.0, hbar=1.0, theta_c=0.0):
        self.t_start = t_start
        self.t_end = t_end
        self.hbar = hbar
        self.theta_c = theta_c

    def fit(self, H, a_ket):
        H = as_square_matrix(H, "H")
        span = TimeSpan(self.t_start, self.t_end)
        metric = qmetric.identity_metric(H.shape[0])
        a_state = make_state(a_ket, self.t_start, StateKind.A_TYPE, metric)
        self.hamiltonian_ = H
        self.q_metric_ = metric
        self.a_state_ = a_state
        self.result_ = maximize.rat_maximize_b(a_state, H, span,
                                               theta_c=self.theta_c, hbar=self.hbar)
        self.b_state_ = self.result_.b_state
        self.amplitude_ = self.result_.achieved_amplitude
        return self

    def weak_value(self, O, t):
        check_is_fitted(self, "result_")
        return weakvalue.normalized_matrix_element(
            O, self.b_state_, self.a_state_, self.q_metric_, self.hamiltonian_,
            t, hbar=self.hbar)
