"""Binomial logistic regression: PG Gibbs sampler, EM mode finder, and an
independence-Metropolis baseline built on the Laplace approximation."""
from __future__ import annotations

import time

import numpy as np

from ..errors import (ConvergenceError, HessianError, NotPositiveDefiniteError, NumericalError,
                      PGDomainError)
from ..sampler import HIST_BINS
from ._kernels import logit_sweeps
from .data import GaussianPrior, GibbsConfig, PosteriorDraws, RegressionData, run_chain
from .linalg import cholesky, draw_from_precision, precision_solve, upper_solve


def coef_names(p: int, prefix: str = "beta") -> list[str]:
    return [f"{prefix}[{j}]" for j in range(p)]


def _check(data: RegressionData, prior: GaussianPrior):
    if prior.dim != data.n_coef:
        raise PGDomainError(
            f"prior has dimension {prior.dim} but the design has {data.n_coef} columns"
        )


def log_posterior(beta, data: RegressionData, prior: GaussianPrior) -> float:
    """Exact log posterior of the logit model up to an additive constant."""
    psi = data.X @ beta
    loglik = float(np.sum(data.y * psi - data.n * np.logaddexp(0.0, psi)))
    d = beta - prior.mean
    return loglik - 0.5 * float(d @ prior.precision @ d)


def pg_expectation(b, psi):
    """E[omega] for omega ~ PG(b, psi), vectorized; b/4 at psi = 0."""
    psi = np.abs(np.asarray(psi, dtype=float))
    h = psi / 2.0
    small = h < 1e-4
    ratio = np.where(small, 1.0 - h * h / 3.0, np.tanh(h) / np.where(small, 1.0, h))
    return np.asarray(b, dtype=float) * ratio / 4.0


def fit_logit_gibbs(data: RegressionData, prior: GaussianPrior, cfg: GibbsConfig) -> PosteriorDraws:
    """Polya-Gamma Gibbs sampler for the binomial logit model.

    Alternates omega_i ~ PG(n_i, x_i' beta) and beta ~ N(m, V) with
    V^-1 = X' Omega X + B^-1 and V^-1 m = X' kappa + B^-1 b.  Rows with
    n_i = 0 carry no likelihood and get no latent draw.
    """
    _check(data, prior)
    rng = cfg.rng()
    active = data.n > 0
    X = np.ascontiguousarray(data.X[active])
    n = data.n[active].astype(float)
    h = data.X.T @ data.kappa + prior.precision_mean
    beta = prior.mean.copy()
    counts = np.zeros(2 + HIST_BINS, dtype=np.int64)
    names = coef_names(data.n_coef)

    def sweeps(n_iter, out):
        done = logit_sweeps(X, n, h, prior.precision, beta, n_iter, cfg.thin, rng, out, counts)
        if done < n_iter:
            raise NotPositiveDefiniteError("posterior precision of beta is not positive definite")

    sweeps(cfg.n_burn, np.empty((0, data.n_coef)))
    out = np.empty((cfg.n_keep, data.n_coef))
    start = time.perf_counter()
    sweeps(cfg.n_samples, out)
    seconds = time.perf_counter() - start
    if not np.all(np.isfinite(out)):
        raise NumericalError("chain produced non-finite draws")
    meta = {"seed": cfg.seed, "n_samples": cfg.n_samples, "n_burn": cfg.n_burn, "thin": cfg.thin,
            "model": "logit", "sampler": "pg-gibbs", "acceptance_rate": 1.0}
    return PosteriorDraws(names, out, seconds, meta)


def fit_logit_em(data: RegressionData, prior: GaussianPrior, tol: float = 1e-10,
                 max_iter: int = 10_000, beta0=None, callback=None) -> np.ndarray:
    """Posterior mode by EM with Polya-Gamma complete-data statistics.

    E-step: omega_i = E[PG(n_i, psi_i)] = n_i tanh(psi_i / 2) / (2 psi_i).
    M-step: weighted ridge solve (X' Omega X + B^-1) beta = X' kappa + B^-1 b.
    Stops once the max-norm change in beta is below ``tol``.  ``callback``
    (if given) is called as ``callback(iteration, beta, log_posterior)``
    after every M-step.
    """
    if not tol > 0:
        raise PGDomainError("tol must be positive")
    _check(data, prior)
    X = data.X
    h = X.T @ data.kappa + prior.precision_mean
    beta = prior.mean.copy() if beta0 is None else np.asarray(beta0, dtype=float).copy()
    for it in range(1, max_iter + 1):
        omega = pg_expectation(data.n, X @ beta)
        Q = (X.T * omega) @ X + prior.precision
        new = precision_solve(cholesky(Q, "EM system matrix"), h)
        change = float(np.max(np.abs(new - beta)))
        beta = new
        if callback is not None:
            callback(it, beta, log_posterior(beta, data, prior))
        if change < tol:
            return beta
    raise ConvergenceError(f"EM did not converge in {max_iter} iterations")


def logit_hessian(beta, data: RegressionData, prior: GaussianPrior) -> np.ndarray:
    """Negative Hessian of the log posterior (the Laplace precision)."""
    p = 1.0 / (1.0 + np.exp(-(data.X @ beta)))
    w = data.n * p * (1.0 - p)
    return (data.X.T * w) @ data.X + prior.precision


def laplace_factor(H: np.ndarray, max_condition: float) -> np.ndarray:
    """Cholesky factor of a Laplace precision, refusing ill-conditioned ones."""
    try:
        L = cholesky(H, "Hessian at the posterior mode")
    except NotPositiveDefiniteError as exc:
        raise HessianError(
            "Hessian at the posterior mode is not positive definite; "
            "use the Polya-Gamma Gibbs sampler instead"
        ) from exc
    cond = float(np.linalg.cond(H))
    if not cond <= max_condition:
        raise HessianError(
            f"Hessian at the posterior mode is ill-conditioned (condition number {cond:.3g}); "
            "use the Polya-Gamma Gibbs sampler instead"
        )
    return L


def independence_metropolis(log_target, mode, L, cfg: GibbsConfig, names, meta):
    """Independence MH with proposal N(mode, (L L')^-1); starts at the mode."""
    rng = cfg.rng()
    p = mode.shape[0]

    def log_q(b):
        r = L.T @ (b - mode)
        return -0.5 * float(r @ r)

    state = {"x": mode.copy(), "lp": log_target(mode), "lq": 0.0, "acc": 0, "tries": 0}

    def step():
        prop = mode + upper_solve(L, rng.standard_normal(p))
        lp, lq = log_target(prop), log_q(prop)
        log_ratio = (lp - state["lp"]) + (state["lq"] - lq)
        state["tries"] += 1
        if np.log(rng.random()) <= log_ratio:
            state.update(x=prop, lp=lp, lq=lq)
            state["acc"] += 1

    draws = run_chain(step, lambda: state["x"], cfg, names, meta)
    draws.meta["acceptance_rate"] = state["acc"] / state["tries"] if state["tries"] else float("nan")
    return draws


def fit_logit_metropolis(data: RegressionData, prior: GaussianPrior, cfg: GibbsConfig,
                         max_condition: float = 1e6) -> PosteriorDraws:
    """Independence Metropolis with a normal proposal at the posterior mode.

    The proposal precision is the Hessian at the mode.  Raises
    :class:`HessianError` when that Hessian cannot be factored or is
    ill-conditioned beyond ``max_condition``.
    """
    _check(data, prior)
    mode = fit_logit_em(data, prior, tol=1e-10)
    L = laplace_factor(logit_hessian(mode, data, prior), max_condition)
    return independence_metropolis(
        lambda b: log_posterior(b, data, prior), mode, L, cfg, coef_names(data.n_coef),
        {"model": "logit", "sampler": "ind-mh", "mode": mode.tolist()},
    )
