"""Random-intercept logit: logit p_ij = m + delta_j + x_ij' beta."""
from __future__ import annotations

import numpy as np

from ..errors import PGDomainError
from ..sampler import pg_draws_unchecked
from .data import GaussianPrior, GibbsConfig, MixedData, PosteriorDraws, run_chain
from .linalg import draw_from_precision


def fit_mixed_gibbs(data: MixedData, prior_fixed: GaussianPrior, cfg: GibbsConfig,
                    phi_shape: float = 1.0, phi_rate: float = 1.0) -> PosteriorDraws:
    """Gibbs sampler for the random-intercept logit model.

    delta_j ~ N(0, 1/phi), phi ~ Ga(shape, rate), m flat, beta ~ prior_fixed.
    Each sweep draws omega, then (m, delta, beta) jointly from one Gaussian
    with precision Z' Omega Z + diag(0, phi I, B^-1), then phi.
    """
    if prior_fixed.dim != data.X.shape[1]:
        raise PGDomainError("prior_fixed dimension does not match the fixed-effect design")
    if not (phi_shape > 0 and phi_rate > 0):
        raise PGDomainError("phi prior shape and rate must be positive")
    rng = cfg.rng()
    J, P = data.n_groups, data.X.shape[1]
    N = data.group.shape[0]
    D = 1 + J + P
    Z = np.zeros((N, D))
    Z[:, 0] = 1.0
    Z[np.arange(N), 1 + data.group] = 1.0
    Z[:, 1 + J:] = data.X
    active = data.n > 0
    Za, na = Z[active], data.n[active].astype(float)
    kappa = data.y - data.n / 2.0
    h = Z.T @ kappa
    h[1 + J:] += prior_fixed.precision_mean
    P0 = np.zeros((D, D))
    P0[1 + J:, 1 + J:] = prior_fixed.precision
    dg = np.arange(1, 1 + J)
    state = {"theta": np.zeros(D), "phi": phi_shape / phi_rate}

    def step():
        theta = state["theta"]
        omega = pg_draws_unchecked(na, Za @ theta, rng)
        Q = (Za.T * omega) @ Za + P0
        Q[dg, dg] += state["phi"]
        theta = draw_from_precision(Q, h, rng, "joint precision of (m, delta, beta)")
        delta = theta[1:1 + J]
        state["theta"] = theta
        state["phi"] = rng.gamma(phi_shape + J / 2.0, 1.0 / (phi_rate + 0.5 * float(delta @ delta)))

    def record():
        theta = state["theta"]
        return np.concatenate([theta[:1], theta[1:1 + J], theta[0] + theta[1:1 + J],
                               theta[1 + J:], [state["phi"]]])

    names = (["m"] + [f"delta[{j}]" for j in range(J)] + [f"alpha[{j}]" for j in range(J)]
             + [f"beta[{k}]" for k in range(P)] + ["phi"])
    return run_chain(step, record, cfg, names, {"model": "mixed", "sampler": "pg-gibbs"})
