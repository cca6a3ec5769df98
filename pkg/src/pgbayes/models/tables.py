"""Hierarchical model for a collection of two-arm (2 x 2) tables.

psi_i = (log-odds arm 1, log-odds arm 2) ~ N(mu, Sigma) per center, with a
normal-inverse-Wishart prior on (mu, Sigma).
"""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import invwishart

from ..errors import PGDomainError
from ..sampler import pg_draws_unchecked
from .data import GibbsConfig, PosteriorDraws, TablesData, run_chain


def hyper_from_moments(E_var1: float, E_var2: float, E_rho: float, d: float) -> np.ndarray:
    """Inverse-Wishart scale B from prior expected moments.

    ``E_var1`` is the expected variance of the log-odds ratio, ``E_var2``
    that of the arm-2 log-odds, and ``E_rho`` their expected correlation.
    """
    if not (E_var1 > 0 and E_var2 > 0):
        raise PGDomainError("expected variances must be positive")
    if not abs(E_rho) < 1:
        raise PGDomainError("expected correlation must lie in (-1, 1)")
    if not d > 3:
        raise PGDomainError("d must exceed 3")
    r = E_rho * math.sqrt(E_var1 * E_var2)
    return (d - 3.0) * np.array([[E_var2 + E_var1 + 2.0 * r, E_var2 + r],
                                 [E_var2 + r, E_var2]])


def _draw_psi(Q11, Q12, Q22, h1, h2, rng):
    """Vectorized draws from N(Q^-1 h, Q^-1) for a stack of 2 x 2 precisions."""
    l11 = np.sqrt(Q11)
    l21 = Q12 / l11
    l22 = np.sqrt(Q22 - l21 * l21)
    w1 = h1 / l11
    w2 = (h2 - l21 * w1) / l22
    z = rng.standard_normal((2, Q11.shape[0]))
    x2 = (w2 + z[1]) / l22
    x1 = (w1 + z[0] - l21 * x2) / l11
    return np.column_stack([x1, x2])


def fit_tables_gibbs(data: TablesData, cfg: GibbsConfig) -> PosteriorDraws:
    """Gibbs sampler over omega, the center log-odds psi_i, and (mu, Sigma).

    Output columns: ``psi[i,1]``, ``psi[i,2]``, ``lor[i]`` (= psi_i1 - psi_i2)
    per center, then ``mu[1]``, ``mu[2]``, ``Sigma[1,1]``, ``Sigma[1,2]``,
    ``Sigma[2,2]`` and ``rho``.  Centers are numbered from 1.
    """
    rng = cfg.rng()
    N = data.n_centers
    Y, Ntr = data.Y, data.Ntr
    kappa = Y - Ntr / 2.0
    nflat = Ntr.ravel().astype(float)
    active = nflat > 0
    d_post, k_post = data.d + N, data.k0 + N
    Sigma = data.B / max(data.d - 3.0, 1.0)
    # start at smoothed empirical logits
    psi = np.log((Y + 0.5) / (Ntr - Y + 0.5))
    state = {"psi": psi, "mu": data.m0.copy(), "Sigma": Sigma}

    def step():
        psi, mu, Sigma = state["psi"], state["mu"], state["Sigma"]
        omega = np.zeros(2 * N)
        omega[active] = pg_draws_unchecked(nflat[active], psi.ravel()[active], rng)
        omega = omega.reshape(N, 2)
        S = np.linalg.inv(Sigma)
        Smu = S @ mu
        psi = _draw_psi(omega[:, 0] + S[0, 0], np.full(N, S[0, 1]), omega[:, 1] + S[1, 1],
                        kappa[:, 0] + Smu[0], kappa[:, 1] + Smu[1], rng)
        bar = psi.mean(axis=0)
        dev = psi - bar
        m_post = (data.k0 * data.m0 + N * bar) / k_post
        diff = bar - data.m0
        scale = data.B + dev.T @ dev + (data.k0 * N / k_post) * np.outer(diff, diff)
        Sigma = invwishart.rvs(df=d_post, scale=scale, random_state=rng)
        mu = m_post + np.linalg.cholesky(Sigma / k_post) @ rng.standard_normal(2)
        state.update(psi=psi, mu=mu, Sigma=Sigma)

    def record():
        psi, mu, S = state["psi"], state["mu"], state["Sigma"]
        per = np.column_stack([psi, psi[:, 0] - psi[:, 1]]).ravel()
        return np.concatenate([per, mu, [S[0, 0], S[0, 1], S[1, 1], S[0, 1] / math.sqrt(S[0, 0] * S[1, 1])]])

    names = [f"{lab}[{i + 1}]" if lab == "lor" else f"psi[{i + 1},{lab}]"
             for i in range(N) for lab in ("1", "2", "lor")]
    names += ["mu[1]", "mu[2]", "Sigma[1,1]", "Sigma[1,2]", "Sigma[2,2]", "rho"]
    return run_chain(step, record, cfg, names, {"model": "tables", "sampler": "pg-gibbs",
                                                "d": data.d, "k0": data.k0, "B": data.B.tolist()})
