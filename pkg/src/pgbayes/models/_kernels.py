"""Compiled inner loops for the samplers whose per-iteration work is tiny
enough that interpreter overhead would dominate."""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from ..sampler import _pg_fill


@nb.njit(cache=True)
def chol_lower(A, L):
    """In-place lower Cholesky of A into L; returns False if not PD."""
    p = A.shape[0]
    for j in range(p):
        s = A[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if not s > 0.0:
            return False
        d = math.sqrt(s)
        L[j, j] = d
        for i in range(j + 1, p):
            s = A[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / d
        for i in range(j):
            L[i, j] = 0.0
    return True


@nb.njit(cache=True)
def draw_precision(Q, h, rng, L, out):
    """out ~ N(Q^-1 h, Q^-1); returns False if Q is not PD."""
    p = h.shape[0]
    if not chol_lower(Q, L):
        return False
    w = np.empty(p)
    for i in range(p):  # L w = h
        s = h[i]
        for k in range(i):
            s -= L[i, k] * w[k]
        w[i] = s / L[i, i]
    for i in range(p):
        w[i] += rng.standard_normal()
    for i in range(p - 1, -1, -1):  # L' out = w
        s = w[i]
        for k in range(i + 1, p):
            s -= L[k, i] * out[k]
        out[i] = s / L[i, i]
    return True


@nb.njit(cache=True)
def logit_sweeps(X, n, h, P0, beta, n_iter, thin, rng, out, counts):
    """Run ``n_iter`` logit Gibbs sweeps, storing every ``thin``-th beta in ``out``.

    ``beta`` is updated in place.  Returns the number of sweeps completed;
    fewer than ``n_iter`` means a precision failed to factor.
    """
    N, p = X.shape
    psi = np.empty(N)
    omega = np.empty(N)
    Q = np.empty((p, p))
    L = np.zeros((p, p))
    tc = np.zeros(2, dtype=np.int64)
    k = 0
    for it in range(n_iter):
        for i in range(N):
            s = 0.0
            for j in range(p):
                s += X[i, j] * beta[j]
            psi[i] = s
        _pg_fill(n, psi, rng, counts, tc, omega)
        for a in range(p):
            for b in range(a + 1):
                s = P0[a, b]
                for i in range(N):
                    s += X[i, a] * omega[i] * X[i, b]
                Q[a, b] = s
                Q[b, a] = s
        if not draw_precision(Q, h, rng, L, beta):
            return it
        if out.shape[0] > 0 and (it + 1) % thin == 0:
            out[k, :] = beta
            k += 1
    return n_iter
