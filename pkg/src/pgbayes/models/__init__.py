"""Polya-Gamma Gibbs samplers for binomial-likelihood models."""
from .data import (GaussianPrior, GibbsConfig, GPData, MixedData, MultinomialData, NegBinData,
                   PosteriorDraws, RegressionData, TablesData)
from .datasets import skene_wakefield, synthetic_logit
from .gp import fit_gp_negbin_gibbs, sq_exp_kernel
from .logit import fit_logit_em, fit_logit_gibbs, fit_logit_metropolis, log_posterior
from .mixed import fit_mixed_gibbs
from .multinomial import fit_multinomial_gibbs, fit_multinomial_metropolis
from .negbin import fit_negbin_gibbs
from .tables import fit_tables_gibbs, hyper_from_moments

__all__ = [
    "GaussianPrior", "GibbsConfig", "GPData", "MixedData", "MultinomialData", "NegBinData",
    "PosteriorDraws", "RegressionData", "TablesData",
    "skene_wakefield", "synthetic_logit",
    "fit_gp_negbin_gibbs", "sq_exp_kernel",
    "fit_logit_em", "fit_logit_gibbs", "fit_logit_metropolis", "log_posterior",
    "fit_mixed_gibbs", "fit_multinomial_gibbs", "fit_multinomial_metropolis",
    "fit_negbin_gibbs", "fit_tables_gibbs", "hyper_from_moments",
]
