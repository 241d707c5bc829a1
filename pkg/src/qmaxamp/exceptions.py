"""Typed errors raised across the package.

Every numerical rejection (non-finite input, defective matrix, lost
positivity, ...) maps to one of these, so callers can distinguish
"your input is out of contract" from genuine bugs.
"""


class QmaxampError(Exception):
    """Base class for all package errors."""


class NonFiniteError(QmaxampError):
    """Input contains NaN or Inf entries."""


class DimensionMismatchError(QmaxampError):
    """Operands have incompatible shapes."""


class NotDiagonalizableError(QmaxampError):
    """Eigenvector matrix is too ill-conditioned or the spectral
    reconstruction residual exceeds tolerance (e.g. Jordan blocks)."""


class NotPositiveDefiniteError(QmaxampError):
    """Matrix expected to be Hermitian positive definite is not."""


class SingularMatrixError(QmaxampError):
    """Linear solve hit a numerically singular matrix."""


class NotHermitianError(QmaxampError):
    """Operation requires a Hermitian matrix."""


class NotQHermitianError(QmaxampError):
    """Operator fails the metric-Hermiticity predicate."""


class KindMismatchError(QmaxampError):
    """Evolving state has the wrong evolution kind for this operation."""


class SubsetMismatchError(QmaxampError):
    """Free parameters do not match the maximal-imaginary-part subset."""


class VanishingDenominatorError(QmaxampError):
    """Transition amplitude in a denominator is numerically zero
    (near-orthogonal pre/post-selection)."""


class NoConvergenceError(QmaxampError):
    """Iterative optimizer failed to meet its stopping rule."""


class BadOptionsError(QmaxampError):
    """Invalid options passed to a generator."""


class IoFailureError(QmaxampError):
    """Report emission could not write its destination."""
