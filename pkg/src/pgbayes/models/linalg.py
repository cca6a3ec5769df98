"""Small Gaussian kernel: Cholesky, triangular solves, normal draws.

Conditional Gaussians in the samplers are specified by precision ``Q`` and
linear term ``h`` (so mean = Q^-1 h); nothing here forms an explicit
inverse.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import NotPositiveDefiniteError


def cholesky(A: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite matrix."""
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"{what} is not positive definite") from exc


def cholesky_jitter(A: np.ndarray, start: float = 1e-10, stop: float = 1e-6, what: str = "matrix"):
    """Factor ``A + eps * I``, escalating eps by 10x from ``start`` to ``stop``.

    Returns ``(L, eps)``.
    """
    eye = np.eye(A.shape[0])
    eps = start
    while eps <= stop * (1 + 1e-9):
        try:
            return np.linalg.cholesky(A + eps * eye), eps
        except np.linalg.LinAlgError:
            eps *= 10.0
    raise NotPositiveDefiniteError(f"{what} is not positive definite even with jitter {stop:g}")


def lower_solve(L, b):
    return solve_triangular(L, b, lower=True, check_finite=False)


def upper_solve(L, b):
    """Solve L^T x = b for lower-triangular L."""
    return solve_triangular(L, b, lower=True, trans="T", check_finite=False)


def precision_solve(L, h):
    """Q^-1 h given the lower Cholesky factor of Q."""
    return upper_solve(L, lower_solve(L, h))


def draw_from_precision(Q: np.ndarray, h: np.ndarray, rng: np.random.Generator, what="precision"):
    """One draw from N(Q^-1 h, Q^-1) via a single Cholesky of ``Q``."""
    L = cholesky(Q, what)
    z = rng.standard_normal(h.shape[0])
    return upper_solve(L, lower_solve(L, h) + z)


def mvn_draw(mean: np.ndarray, cov: np.ndarray, rng: np.random.Generator, what="covariance"):
    """One draw from N(mean, cov)."""
    L = cholesky(cov, what)
    return mean + L @ rng.standard_normal(mean.shape[0])


def spd_inverse(A: np.ndarray, what="matrix") -> np.ndarray:
    """Inverse of an SPD matrix through its Cholesky factor (used once, for priors)."""
    L = cholesky(A, what)
    Linv = lower_solve(L, np.eye(A.shape[0]))
    return Linv.T @ Linv
