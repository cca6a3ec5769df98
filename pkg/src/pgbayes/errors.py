"""Exception types shared across the package."""
import numpy as np


class PGDomainError(ValueError):
    """Argument outside the domain of a function or model."""


class NumericalError(RuntimeError):
    """A numerical routine failed on otherwise valid input."""


class NotPositiveDefiniteError(NumericalError, np.linalg.LinAlgError):
    """Cholesky factorization failed: the matrix is not positive definite."""


class HessianError(NotPositiveDefiniteError):
    """Laplace approximation unusable; fit the model with the Gibbs sampler instead."""


class ConvergenceError(NumericalError):
    """An iterative optimizer hit its iteration cap."""
