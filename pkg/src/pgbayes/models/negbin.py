"""Negative-binomial regression with integer dispersion.

y_i ~ NB(d, p_i) with logit p_i = psi_i = x_i' beta, so E[y_i] = d exp(psi_i).
"""
from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from ..errors import PGDomainError
from ..sampler import pg_draws_unchecked
from .data import GaussianPrior, GibbsConfig, NegBinData, PosteriorDraws, run_chain
from .linalg import draw_from_precision


def negbin_loglik(y, psi, d) -> float:
    """Sum of NB log pmfs, size d and success log-odds psi."""
    soft = np.logaddexp(0.0, psi)
    return float(np.sum(gammaln(y + d) - gammaln(d) - gammaln(y + 1.0) + y * psi - (y + d) * soft))


def _log_prior(beta, prior: GaussianPrior) -> float:
    r = beta - prior.mean
    return -0.5 * float(r @ prior.precision @ r)


def has_intercept(X) -> bool:
    return X.shape[1] > 0 and bool(np.all(X[:, 0] == 1.0))


def fit_negbin_gibbs(data: NegBinData, prior: GaussianPrior, cfg: GibbsConfig,
                     sample_d: bool = True, d_max: int = 10_000) -> PosteriorDraws:
    """Gibbs sampler: omega ~ PG(y + d, psi), Gaussian beta, then a +/-1
    Metropolis move on d (flat prior on 1..d_max; moves to 0 are rejected).

    With an intercept (constant first column) the d move also shifts
    beta[0] by log d - log d', which keeps the fitted means fixed; the map
    is volume-preserving and its own reverse, so the plain posterior ratio
    is the acceptance ratio.  The output then also carries
    ``alpha = beta[0] + log d``, the intercept on the log-mean scale.
    """
    if prior.dim != data.X.shape[1]:
        raise PGDomainError("prior dimension does not match the design")
    rng = cfg.rng()
    X, y = data.X, data.y
    P = X.shape[1]
    state = {"beta": prior.mean.copy(), "d": data.d, "acc": 0, "tries": 0}
    intercept = has_intercept(X)

    def step():
        d = state["d"]
        psi = X @ state["beta"]
        omega = pg_draws_unchecked(y + d, psi, rng)
        kappa = (y - d) / 2.0
        Q = (X.T * omega) @ X + prior.precision
        beta = draw_from_precision(Q, X.T @ kappa + prior.precision_mean, rng,
                                   "posterior precision of beta")
        state["beta"] = beta
        if sample_d:
            prop = d + (1 if rng.random() < 0.5 else -1)
            state["tries"] += 1
            if 1 <= prop <= d_max:
                new = beta.copy()
                if intercept:
                    new[0] += np.log(d) - np.log(prop)
                log_ratio = (negbin_loglik(y, X @ new, prop) - negbin_loglik(y, X @ beta, d)
                             + _log_prior(new, prior) - _log_prior(beta, prior))
                if np.log(rng.random()) <= log_ratio:
                    state.update(d=prop, beta=new)
                    state["acc"] += 1

    def record():
        beta, d = state["beta"], state["d"]
        extra = [beta[0] + np.log(d)] if intercept else []
        return np.concatenate([beta, extra, [d]])

    names = [f"beta[{k}]" for k in range(P)] + (["alpha"] if intercept else []) + ["d"]
    draws = run_chain(step, record, cfg, names, {"model": "negbin", "sampler": "pg-gibbs"})
    if sample_d:
        draws.meta["d_acceptance_rate"] = state["acc"] / max(state["tries"], 1)
    return draws
