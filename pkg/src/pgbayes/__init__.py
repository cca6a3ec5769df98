"""Polya-Gamma distribution tools and data-augmented Gibbs samplers."""
from .core import (
    PGDomainError,
    PGParams,
    ProposalMixture,
    T_STAR,
    TiltedJacobiSeries,
    jacobi_coeff,
    pg_density,
    pg_laplace,
    pg_mean,
    pg_variance,
    verify_identity,
)
from .sampler import (
    SamplerStats,
    make_rng,
    sample_jacobi,
    sample_pg,
    sample_pg1,
    sample_pg_naive,
    sample_tig_large_mu,
    sample_tig_small_mu,
)

__version__ = "0.1.0"
from .diagnostics import EfficiencyReport, ess, esr, summarize
from .errors import ConvergenceError, HessianError, NotPositiveDefiniteError, NumericalError
