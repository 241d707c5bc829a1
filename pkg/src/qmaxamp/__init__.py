"""Metric-operator inner products, transition-amplitude maximization and
weak values for diagonalizable complex Hamiltonians."""

from . import exceptions
from .linalg import EigenDecomposition, eigendecompose, mat_exp, hermitian_sqrt, svd_max
from .qmetric import (
    QMetric,
    HamiltonianSplit,
    build_q,
    identity_metric,
    q_inner,
    q_adjoint,
    split_h,
    is_q_normal,
    is_q_hermitian,
)
from .dynamics import (
    StateKind,
    EvolvingState,
    TimeSpan,
    make_state,
    evolve,
    transition_amplitude,
    tilde_state,
    heisenberg_operator,
)
from .maximize import (
    ImagMaxSubset,
    MaxFamilyParams,
    MaximizationResult,
    imag_max_subset,
    analytic_max_pair,
    svd_oracle_max,
    gradient_ascent_max,
    rat_maximize_b,
)
from .weakvalue import (
    WeakValueReport,
    normalized_matrix_element,
    verify_reality,
    tilde_equivalence,
    ehrenfest_check,
    rat_collapse_check,
)
from .generators import gen_hamiltonian, gen_q_hermitian_observable
from .harness import ScenarioConfig, RunReport, Tolerances, run_scenario, emit_report
from .estimators import (
    AnalyticMaximizer,
    SvdOracleMaximizer,
    GradientAscentMaximizer,
    HermitianPostSelector,
)

__version__ = "0.1.0"
