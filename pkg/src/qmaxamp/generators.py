"""Seeded random instance generators.

All randomness flows through ``np.random.default_rng(seed)``; identical
seeds reproduce identical matrices bit-for-bit on the same build.
"""

import numpy as np

from .exceptions import BadOptionsError
from .qmetric import QMetric, q_adjoint

__all__ = ["gen_hamiltonian", "gen_q_hermitian_observable", "random_unitary"]

KINDS = ("hermitian", "normal-nonhermitian", "nonnormal")


def _complex_gaussian(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_unitary(n, rng):
    q, r = np.linalg.qr(_complex_gaussian(rng, n))
    # fix the QR phase ambiguity
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _spectrum(rng, n, imag_max, degeneracy):
    """Complex eigenvalues with exactly ``degeneracy`` entries at the
    maximal imaginary part ``imag_max`` and the rest clearly below it."""
    re = rng.uniform(-1.0, 1.0, size=n)
    im = np.empty(n)
    im[:degeneracy] = imag_max
    gap = 0.05 * max(1.0, abs(imag_max))
    im[degeneracy:] = imag_max - gap - rng.uniform(0.0, 1.0, size=n - degeneracy)
    return re + 1j * im


def gen_hamiltonian(kind, n, seed, imag_max=1.0, cond_p_max=100.0, degeneracy=1):
    """Random Hamiltonian of the requested spectral class.

    hermitian            -> (M + M^dag)/2 for Gaussian M
    normal-nonhermitian  -> U diag(complex) U^dag, unitary U
    nonnormal            -> P diag(complex) P^-1, random invertible P
                            with condition number <= cond_p_max
    """
    if kind not in KINDS:
        raise BadOptionsError(f"kind must be one of {KINDS}, got {kind!r}")
    if n < 1:
        raise BadOptionsError(f"n must be >= 1, got {n}")
    if not np.isfinite(imag_max):
        raise BadOptionsError("imag_max must be finite")
    if not 1 <= degeneracy <= n:
        raise BadOptionsError(f"degeneracy must be in [1, {n}], got {degeneracy}")
    rng = np.random.default_rng(seed)

    if kind == "hermitian":
        m = _complex_gaussian(rng, n)
        return 0.5 * (m + m.conj().T)

    lam = _spectrum(rng, n, imag_max, degeneracy)
    if kind == "normal-nonhermitian":
        u = random_unitary(n, rng)
        return (u * lam) @ u.conj().T

    if cond_p_max <= 1:
        raise BadOptionsError("cond_p_max must exceed 1")
    for _ in range(1000):
        p = _complex_gaussian(rng, n)
        if np.linalg.cond(p) <= cond_p_max:
            break
    else:
        raise BadOptionsError(
            f"could not draw an eigenvector matrix with condition <= {cond_p_max}"
        )
    return (p * lam) @ np.linalg.inv(p)


def gen_q_hermitian_observable(metric: QMetric, n, seed):
    """Random observable that is Hermitian under the metric inner product."""
    rng = np.random.default_rng(seed)
    m = _complex_gaussian(rng, n)
    return 0.5 * (m + q_adjoint(m, metric))
