"""MCMC efficiency diagnostics and posterior summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PGDomainError

MIN_CHAIN = 10
ESS_CLAMP = 1.2


def _chain(values) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise PGDomainError("a chain must be one-dimensional")
    if x.shape[0] < MIN_CHAIN:
        raise PGDomainError(f"a chain needs at least {MIN_CHAIN} values")
    if not np.all(np.isfinite(x)):
        raise PGDomainError("chain has non-finite values")
    return x


def autocovariance(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased (divide-by-M) sample autocovariances for lags 0..max_lag via FFT."""
    M = x.shape[0]
    d = x - x.mean()
    nfft = 1 << (2 * M - 1).bit_length()
    f = np.fft.rfft(d, nfft)
    return np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1] / M


def _levinson(acov: np.ndarray, max_order: int):
    """Yule-Walker fits of every order 0..max_order.

    Returns a list of coefficient vectors and the matching innovation
    variances.
    """
    phi = np.zeros(0)
    sigma2 = acov[0]
    coefs, variances = [phi], [sigma2]
    for k in range(1, max_order + 1):
        refl = (acov[k] - phi @ acov[k - 1:0:-1]) / sigma2
        phi = np.concatenate([phi - refl * phi[::-1], [refl]])
        sigma2 = sigma2 * (1.0 - refl * refl)
        if not sigma2 > 0:
            break
        coefs.append(phi)
        variances.append(sigma2)
    return coefs, variances


def spectrum0_ar(values) -> tuple[float, int]:
    """Spectral density at frequency zero from an AIC-selected AR fit.

    The order is capped at max(1, floor(10 log10 M)).  Returns the density
    (normalized so white noise gives its variance) and the chosen order.
    """
    x = _chain(values)
    M = x.shape[0]
    cap = min(M - 2, max(1, int(math.floor(10.0 * math.log10(M)))))
    acov = autocovariance(x, cap)
    if not acov[0] > 0:
        raise PGDomainError("chain is constant; spectral density undefined")
    coefs, variances = _levinson(acov, cap)
    aic = [M * math.log(v) + 2.0 * p for p, v in enumerate(variances)]
    order = int(np.argmin(aic))
    phi, s2 = coefs[order], variances[order]
    s2 *= M / (M - (order + 1))
    return s2 / (1.0 - phi.sum()) ** 2, order


def ess(values) -> float:
    """Effective sample size M * var / S(0), clamped to (0, 1.2 M]."""
    x = _chain(values)
    M = x.shape[0]
    s0, _ = spectrum0_ar(x)
    value = M * x.var(ddof=1) / s0
    return float(min(max(value, np.finfo(float).tiny), ESS_CLAMP * M))


def esr(values, sampling_seconds: float) -> float:
    """Effective samples per second of sampling time."""
    if not sampling_seconds > 0:
        raise PGDomainError("sampling_seconds must be positive")
    return ess(values) / sampling_seconds


@dataclass
class EfficiencyReport:
    names: list[str]
    ess: np.ndarray
    esr: np.ndarray
    seconds: float

    @classmethod
    def from_draws(cls, draws) -> "EfficiencyReport":
        """Per-column ESS/ESR; constant columns (e.g. a stuck integer) are skipped."""
        names, e = [], []
        for j, nm in enumerate(draws.names):
            col = draws.draws[:, j]
            if np.ptp(col) == 0:
                continue
            names.append(nm)
            e.append(ess(col))
        e = np.asarray(e)
        seconds = draws.sampling_seconds
        if not seconds > 0:
            raise PGDomainError("sampling_seconds must be positive")
        return cls(names, e, e / seconds, seconds)

    @staticmethod
    def _roll(v) -> dict:
        if v.size == 0:
            return {"min": float("nan"), "median": float("nan"), "max": float("nan")}
        return {"min": float(v.min()), "median": float(np.median(v)), "max": float(v.max())}

    @property
    def ess_summary(self) -> dict:
        return self._roll(self.ess)

    @property
    def esr_summary(self) -> dict:
        return self._roll(self.esr)

    def to_dict(self) -> dict:
        return {
            "seconds": self.seconds,
            "ess": self.ess_summary,
            "esr": self.esr_summary,
            "per_parameter": {n: {"ess": float(a), "esr": float(b)}
                              for n, a, b in zip(self.names, self.ess, self.esr)},
        }


def summarize(draws, probs: Sequence[float] = (0.025, 0.25, 0.5, 0.75, 0.975)) -> dict:
    """Mean, standard deviation and quantiles for each column of ``draws``.

    ``draws`` may be a PosteriorDraws or a plain matrix (columns named
    by index).
    """
    probs = [float(p) for p in probs]
    if any(not 0.0 < p < 1.0 for p in probs):
        raise PGDomainError("quantile levels must lie strictly between 0 and 1")
    if hasattr(draws, "draws"):
        mat, names = draws.draws, list(draws.names)
    else:
        mat = np.asarray(draws, dtype=float)
        mat = mat[:, None] if mat.ndim == 1 else mat
        names = [str(j) for j in range(mat.shape[1])]
    if mat.shape[0] == 0:
        raise PGDomainError("no draws to summarize")
    q = np.quantile(mat, probs, axis=0) if probs else np.empty((0, mat.shape[1]))
    sd = mat.std(axis=0, ddof=1) if mat.shape[0] > 1 else np.zeros(mat.shape[1])
    return {
        nm: {"mean": float(mat[:, j].mean()), "sd": float(sd[j]),
             "quantiles": {f"{p:g}": float(q[i, j]) for i, p in enumerate(probs)}}
        for j, nm in enumerate(names)
    }
