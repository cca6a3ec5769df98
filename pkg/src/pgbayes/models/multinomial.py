"""Multinomial logit with the last category as reference (beta_J = 0)."""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from ..errors import ConvergenceError, PGDomainError
from ..sampler import pg_draws_unchecked
from .data import GaussianPrior, GibbsConfig, MultinomialData, PosteriorDraws, run_chain
from .linalg import draw_from_precision
from .logit import independence_metropolis, laplace_factor


def _priors(data: MultinomialData, prior) -> list[GaussianPrior]:
    K = data.n_categories - 1
    priors = [prior] * K if isinstance(prior, GaussianPrior) else list(prior)
    if len(priors) != K:
        raise PGDomainError(f"need one prior per non-reference category ({K})")
    if any(p.dim != data.X.shape[1] for p in priors):
        raise PGDomainError("prior dimension does not match the design")
    return priors


def coef_names(P: int, K: int) -> list[str]:
    return [f"beta[{j},{k}]" for j in range(K) for k in range(P)]


def _linear(X, B):
    """N x J matrix of linear predictors, reference column zero."""
    return np.column_stack([X @ B, np.zeros(X.shape[0])])


def fit_multinomial_gibbs(data: MultinomialData, prior: GaussianPrior | Sequence[GaussianPrior],
                          cfg: GibbsConfig) -> PosteriorDraws:
    """Category-at-a-time PG Gibbs sampler.

    For category j: eta_ij = x_i' beta_j - C_ij with
    C_ij = log sum_{k != j} exp(x_i' beta_k), omega_ij ~ PG(n_i, eta_ij), and
    beta_j ~ N(m_j, V_j) where V_j^-1 = X' Omega_j X + V0^-1 and
    V_j^-1 m_j = X'(kappa_j + Omega_j C_j) + V0^-1 m0.
    """
    priors = _priors(data, prior)
    rng = cfg.rng()
    X, Y, n = data.X, data.Y, data.n
    P, K = X.shape[1], data.n_categories - 1
    kappa = Y[:, :K] - n[:, None] / 2.0
    B = np.column_stack([p.mean for p in priors])

    def step():
        for j in range(K):
            lin = _linear(X, B)
            lin[:, j] = -np.inf
            C = logsumexp(lin, axis=1)
            omega = pg_draws_unchecked(n, X @ B[:, j] - C, rng)
            pj = priors[j]
            Q = (X.T * omega) @ X + pj.precision
            h = X.T @ (kappa[:, j] + omega * C) + pj.precision_mean
            B[:, j] = draw_from_precision(Q, h, rng, f"posterior precision of category {j}")

    return run_chain(step, lambda: B.T.ravel(), cfg, coef_names(P, K),
                     {"model": "mlogit", "sampler": "pg-gibbs", "acceptance_rate": 1.0})


def multinomial_log_posterior(theta, data: MultinomialData, priors) -> float:
    X, Y = data.X, data.Y
    P, K = X.shape[1], data.n_categories - 1
    B = theta.reshape(K, P).T
    lin = _linear(X, B)
    ll = float(np.sum(Y * lin) - np.sum(data.n * logsumexp(lin, axis=1)))
    for j, pj in enumerate(priors):
        d = B[:, j] - pj.mean
        ll -= 0.5 * float(d @ pj.precision @ d)
    return ll


def _grad(theta, data, priors):
    X, Y = data.X, data.Y
    P, K = X.shape[1], data.n_categories - 1
    B = theta.reshape(K, P).T
    lin = _linear(X, B)
    prob = np.exp(lin - logsumexp(lin, axis=1, keepdims=True))
    G = X.T @ (Y[:, :K] - data.n[:, None] * prob[:, :K])
    for j, pj in enumerate(priors):
        G[:, j] -= pj.precision @ (B[:, j] - pj.mean)
    return G.T.ravel()


def multinomial_hessian(theta, data: MultinomialData, priors) -> np.ndarray:
    """Negative Hessian of the log posterior, category-major ordering."""
    X = data.X
    P, K = X.shape[1], data.n_categories - 1
    B = theta.reshape(K, P).T
    lin = _linear(X, B)
    prob = np.exp(lin - logsumexp(lin, axis=1, keepdims=True))[:, :K]
    H = np.zeros((K * P, K * P))
    for a in range(K):
        for b in range(K):
            w = data.n * (prob[:, a] * ((a == b) - prob[:, b]))
            H[a * P:(a + 1) * P, b * P:(b + 1) * P] = (X.T * w) @ X
        H[a * P:(a + 1) * P, a * P:(a + 1) * P] += priors[a].precision
    return H


def multinomial_mode(data: MultinomialData, prior, tol: float = 1e-10,
                     max_iter: int = 500) -> np.ndarray:
    """Posterior mode by damped Newton steps on the concave log posterior."""
    priors = _priors(data, prior)
    theta = np.concatenate([p.mean for p in priors])
    f = multinomial_log_posterior(theta, data, priors)
    for _ in range(max_iter):
        step = np.linalg.solve(multinomial_hessian(theta, data, priors), _grad(theta, data, priors))
        t = 1.0
        while True:
            cand = theta + t * step
            fc = multinomial_log_posterior(cand, data, priors)
            if fc >= f - 1e-12 * abs(f) or t < 1e-10:
                break
            t *= 0.5
        theta, f = cand, fc
        if float(np.max(np.abs(t * step))) < tol:
            return theta
    raise ConvergenceError(f"mode search did not converge in {max_iter} Newton steps")


def fit_multinomial_metropolis(data: MultinomialData, prior, cfg: GibbsConfig,
                               max_condition: float = 1e6) -> PosteriorDraws:
    """Independence Metropolis at the mode with the Hessian as proposal precision.

    Raises :class:`HessianError` when the Hessian is not positive definite
    or its condition number exceeds ``max_condition``.
    """
    priors = _priors(data, prior)
    mode = multinomial_mode(data, priors)
    L = laplace_factor(multinomial_hessian(mode, data, priors), max_condition)
    P, K = data.X.shape[1], data.n_categories - 1
    return independence_metropolis(
        lambda t: multinomial_log_posterior(t, data, priors), mode, L, cfg, coef_names(P, K),
        {"model": "mlogit", "sampler": "ind-mh", "mode": mode.tolist()},
    )
