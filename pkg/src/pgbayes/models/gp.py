"""Negative-binomial counts with a Gaussian-process log-odds field."""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from ..sampler import pg_draws_unchecked
from .data import GibbsConfig, GPData, PosteriorDraws, run_chain
from .linalg import cholesky, cholesky_jitter, precision_solve


def sq_exp_kernel(data: GPData) -> np.ndarray:
    """K_ij = nugget + exp(-|x_i - x_j|^2 / (2 l^2)), without jitter."""
    d2 = cdist(data.coords, data.coords, "sqeuclidean")
    return data.nugget + np.exp(-d2 / (2.0 * data.length_scale ** 2))


def fit_gp_negbin_gibbs(data: GPData, cfg: GibbsConfig) -> PosteriorDraws:
    """Gibbs sampler for y_i ~ NB(d, logit^-1 psi_i), psi ~ GP(0, K).

    omega_i ~ PG(y_i + d, psi_i).  The field update targets
    N((K^-1 + Omega)^-1 kappa, (K^-1 + Omega)^-1) but never forms K^-1: with
    W = Omega and pseudo-data z = kappa / omega it draws a prior field f and
    noise e ~ N(0, W^-1) and returns
    f + K W^1/2 A^-1 W^1/2 (z - f - e),  A = I + W^1/2 K W^1/2,
    which needs one Cholesky of the well-conditioned A per sweep.
    """
    rng = cfg.rng()
    K = sq_exp_kernel(data)
    LK, jitter = cholesky_jitter(K, what="kernel matrix")
    K = K + jitter * np.eye(K.shape[0])
    y = data.y
    N = y.shape[0]
    b = y + data.d
    kappa = (y - data.d) / 2.0
    eye = np.eye(N)
    state = {"psi": np.zeros(N)}

    def step():
        omega = pg_draws_unchecked(b, state["psi"], rng)
        s = np.sqrt(omega)
        f = LK @ rng.standard_normal(N)
        e = rng.standard_normal(N) / s
        r = s * (kappa / omega - f - e)
        A = eye + (s[:, None] * K) * s[None, :]
        LA = cholesky(A, "GP update matrix")
        state["psi"] = f + K @ (s * precision_solve(LA, r))

    names = [f"psi[{i}]" for i in range(N)]
    return run_chain(step, lambda: state["psi"], cfg, names,
                     {"model": "gp-negbin", "sampler": "pg-gibbs", "jitter": jitter,
                      "length_scale": data.length_scale, "nugget": data.nugget, "d": data.d})
