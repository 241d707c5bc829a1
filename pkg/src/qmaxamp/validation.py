"""Input validation helpers.

Thin wrappers around ``np.asarray`` that enforce the contracts shared by
every public entry point: complex dtype, finite entries, square / matching
shapes. They return the validated array so call sites can chain them.
"""

import numpy as np

from .exceptions import DimensionMismatchError, NonFiniteError

__all__ = [
    "as_complex_matrix",
    "as_square_matrix",
    "as_complex_vector",
    "check_same_shape",
]


def as_complex_matrix(m, name="matrix"):
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def as_square_matrix(m, name="matrix"):
    arr = as_complex_matrix(m, name)
    rows, cols = arr.shape
    if rows != cols or rows == 0:
        raise DimensionMismatchError(f"{name} must be square and nonempty, got shape {arr.shape}")
    return arr


def as_complex_vector(v, name="vector"):
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatchError(f"{name} must be a nonempty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def check_same_shape(a, b, names=("first operand", "second operand")):
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"{names[0]} has shape {a.shape} but {names[1]} has shape {b.shape}"
        )
