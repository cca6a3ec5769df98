"""Input containers, configuration, and the posterior-draw record."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import NumericalError, PGDomainError
from .linalg import cholesky, spd_inverse


def _as_matrix(X, name="X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise PGDomainError(f"{name} must be a 2-d array")
    if not np.all(np.isfinite(X)):
        raise PGDomainError(f"{name} has non-finite entries")
    return X


def _as_counts(v, name) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise PGDomainError(f"{name} must be a vector")
    if np.any(a < 0) or np.any(a != np.round(a)):
        raise PGDomainError(f"{name} must hold nonnegative integers")
    return a


@dataclass
class RegressionData:
    """Binomial regression data: ``y[i]`` successes out of ``n[i]`` trials."""

    X: np.ndarray
    y: np.ndarray
    n: np.ndarray | None = None

    def __post_init__(self):
        self.X = _as_matrix(self.X)
        self.y = _as_counts(self.y, "y")
        self.n = np.ones_like(self.y) if self.n is None else _as_counts(self.n, "n")
        N = self.X.shape[0]
        if self.y.shape[0] != N or self.n.shape[0] != N:
            raise PGDomainError("X, y and n disagree on the number of observations")
        if np.any(self.y > self.n):
            raise PGDomainError("y must not exceed n")

    @property
    def kappa(self) -> np.ndarray:
        return self.y - self.n / 2.0

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def n_coef(self) -> int:
        return self.X.shape[1]


@dataclass
class GaussianPrior:
    """N(mean, cov) prior; the precision and its linear term are cached."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        p = self.mean.shape[0]
        if self.cov.shape != (p, p):
            raise PGDomainError("prior covariance shape does not match the mean")
        if not np.allclose(self.cov, self.cov.T):
            raise PGDomainError("prior covariance must be symmetric")
        cholesky(self.cov, "prior covariance")
        self.precision = spd_inverse(self.cov, "prior covariance")
        self.precision_mean = self.precision @ self.mean

    @classmethod
    def isotropic(cls, p: int, variance: float = 100.0, mean: float = 0.0) -> "GaussianPrior":
        return cls(np.full(p, float(mean)), variance * np.eye(p))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass
class GibbsConfig:
    """Chain length settings; ``n_samples`` counts post-burn-in iterations."""

    n_samples: int = 10_000
    n_burn: int = 2_000
    thin: int = 1
    seed: int | None = 0

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise PGDomainError("n_samples must be at least 1")
        if int(self.n_burn) < 0:
            raise PGDomainError("n_burn must be nonnegative")
        if int(self.thin) < 1:
            raise PGDomainError("thin must be at least 1")
        self.n_samples, self.n_burn, self.thin = int(self.n_samples), int(self.n_burn), int(self.thin)

    @property
    def n_keep(self) -> int:
        return self.n_samples // self.thin

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class PosteriorDraws:
    """Retained draws (rows) by parameter (columns) plus run metadata.

    ``sampling_seconds`` covers the post-burn-in iterations only.
    """

    names: list[str]
    draws: np.ndarray
    sampling_seconds: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float)
        if self.draws.ndim != 2 or self.draws.shape[1] != len(self.names):
            raise PGDomainError("draws must be a matrix with one column per name")

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.names.index(name)]

    def columns(self, prefix: str) -> np.ndarray:
        idx = [i for i, nm in enumerate(self.names) if nm.startswith(prefix)]
        return self.draws[:, idx]

    def mean(self) -> np.ndarray:
        return self.draws.mean(axis=0)


def run_chain(step: Callable[[], None], record: Callable[[], np.ndarray],
              cfg: GibbsConfig, names: Sequence[str], meta: dict | None = None) -> PosteriorDraws:
    """Drive ``step`` through burn-in and sampling, keeping every ``thin``-th state."""
    for _ in range(cfg.n_burn):
        step()
    out = np.empty((cfg.n_keep, len(names)))
    k = 0
    start = time.perf_counter()
    for it in range(1, cfg.n_keep * cfg.thin + 1):
        step()
        if it % cfg.thin == 0:
            out[k] = record()
            k += 1
    for _ in range(cfg.n_samples - cfg.n_keep * cfg.thin):
        step()
    seconds = time.perf_counter() - start
    if not np.all(np.isfinite(out)):
        raise NumericalError("chain produced non-finite draws")
    info = {"seed": cfg.seed, "n_samples": cfg.n_samples, "n_burn": cfg.n_burn, "thin": cfg.thin}
    info.update(meta or {})
    return PosteriorDraws(list(names), out, seconds, info)


@dataclass
class MixedData:
    """Grouped binomial data for a random-intercept logit model.

    ``group[i]`` in ``0..n_groups-1``; groups without observations are
    allowed.  ``X`` holds fixed effects only (the global intercept is
    part of the model) and may have zero columns.
    """

    group: np.ndarray
    X: np.ndarray
    y: np.ndarray
    n: np.ndarray | None = None
    n_groups: int | None = None

    def __post_init__(self):
        g = np.asarray(self.group)
        if g.ndim != 1 or g.size and (np.any(g < 0) or np.any(g != np.round(g))):
            raise PGDomainError("group must be a vector of nonnegative integer labels")
        self.group = g.astype(np.int64)
        N = self.group.shape[0]
        X = np.asarray(self.X, dtype=float)
        self.X = X.reshape(N, 0) if X.size == 0 else _as_matrix(X)
        self.y = _as_counts(self.y, "y")
        self.n = np.ones_like(self.y) if self.n is None else _as_counts(self.n, "n")
        if self.X.shape[0] != N or self.y.shape[0] != N or self.n.shape[0] != N:
            raise PGDomainError("group, X, y and n disagree on the number of observations")
        if np.any(self.y > self.n):
            raise PGDomainError("y must not exceed n")
        J = int(self.group.max()) + 1 if N else 0
        self.n_groups = J if self.n_groups is None else int(self.n_groups)
        if self.n_groups < J:
            raise PGDomainError("a group label exceeds n_groups")
        if not np.any(self.n > 0):
            raise PGDomainError("at least one group must have observations")


@dataclass
class NegBinData:
    """Counts with design ``X`` and an initial integer dispersion ``d``."""

    X: np.ndarray
    y: np.ndarray
    d: int = 1

    def __post_init__(self):
        self.X = _as_matrix(self.X)
        self.y = _as_counts(self.y, "y")
        if self.y.shape[0] != self.X.shape[0]:
            raise PGDomainError("X and y disagree on the number of observations")
        if int(self.d) != self.d or self.d < 1:
            raise PGDomainError("dispersion d must be an integer >= 1")
        self.d = int(self.d)


@dataclass
class MultinomialData:
    """Category counts ``Y`` (N x J); the last category is the reference."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.X = _as_matrix(self.X)
        Y = np.asarray(self.Y, dtype=float)
        if Y.ndim != 2 or Y.shape[0] != self.X.shape[0]:
            raise PGDomainError("Y must be an N x J matrix matching X")
        if Y.shape[1] < 2:
            raise PGDomainError("need at least two categories")
        if np.any(Y < 0) or np.any(Y != np.round(Y)):
            raise PGDomainError("Y must hold nonnegative integers")
        if np.any(Y.sum(axis=1) <= 0):
            raise PGDomainError("every row of Y needs a positive total")
        self.Y = Y

    @property
    def n(self) -> np.ndarray:
        return self.Y.sum(axis=1)

    @property
    def n_categories(self) -> int:
        return self.Y.shape[1]


@dataclass
class TablesData:
    """Two-arm success counts per center plus a normal-inverse-Wishart prior.

    Sigma ~ IW(d, B) (mean B / (d - 3) in two dimensions) and
    mu | Sigma ~ N(m0, Sigma / k0).
    """

    y1: np.ndarray
    n1: np.ndarray
    y2: np.ndarray
    n2: np.ndarray
    d: float = 4.0
    B: np.ndarray = field(default_factory=lambda: np.array([[0.754, 0.857], [0.857, 1.480]]))
    m0: np.ndarray = field(default_factory=lambda: np.zeros(2))
    k0: float = 0.1

    def __post_init__(self):
        self.d = float(self.d)
        self.y1, self.n1 = _as_counts(self.y1, "y1"), _as_counts(self.n1, "n1")
        self.y2, self.n2 = _as_counts(self.y2, "y2"), _as_counts(self.n2, "n2")
        N = self.y1.shape[0]
        if N < 1 or any(a.shape[0] != N for a in (self.n1, self.y2, self.n2)):
            raise PGDomainError("need at least one center and equal-length count vectors")
        if np.any(self.y1 > self.n1) or np.any(self.y2 > self.n2):
            raise PGDomainError("successes must not exceed trials")
        self.B = np.asarray(self.B, dtype=float)
        if self.B.shape != (2, 2) or not np.allclose(self.B, self.B.T):
            raise PGDomainError("B must be a symmetric 2 x 2 matrix")
        cholesky(self.B, "B")
        if not self.d > 1:
            raise PGDomainError("d must exceed 1 for a proper inverse-Wishart prior")
        self.m0 = np.asarray(self.m0, dtype=float).reshape(2)
        if not self.k0 > 0:
            raise PGDomainError("k0 must be positive")
        if not self.d + N > 2:
            raise PGDomainError("inverse-Wishart update needs d + N > 2")

    @property
    def n_centers(self) -> int:
        return self.y1.shape[0]

    @property
    def Y(self) -> np.ndarray:
        return np.column_stack([self.y1, self.y2])

    @property
    def Ntr(self) -> np.ndarray:
        return np.column_stack([self.n1, self.n2])


@dataclass
class GPData:
    """Counts at spatial locations with fixed squared-exponential kernel settings."""

    coords: np.ndarray
    y: np.ndarray
    length_scale: float = 1.0
    nugget: float = 0.0
    d: int = 1

    def __post_init__(self):
        self.coords = _as_matrix(self.coords, "coords")
        self.y = _as_counts(self.y, "y")
        if self.y.shape[0] != self.coords.shape[0]:
            raise PGDomainError("coords and y disagree on the number of sites")
        if not self.length_scale > 0:
            raise PGDomainError("length_scale must be positive")
        if not self.nugget >= 0:
            raise PGDomainError("nugget must be nonnegative")
        if int(self.d) != self.d or self.d < 1:
            raise PGDomainError("NB size d must be an integer >= 1")
        self.d = int(self.d)
