"""Analytic functions of the Polya-Gamma family.

Everything here is deterministic: Laplace transform, density, the first two
moments, the piecewise Jacobi coefficients that drive the exact sampler, and
the envelope constants of its proposal.  The tilt ``c`` only ever enters
through ``c**2``, so it is folded to ``|c|`` at every entry point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, log_ndtr

from .errors import PGDomainError

__all__ = [
    "PGDomainError",
    "PGParams",
    "TiltedJacobiSeries",
    "ProposalMixture",
    "T_STAR",
    "log_cosh",
    "pg_laplace",
    "pg_log_laplace",
    "pg_mean",
    "pg_variance",
    "pg_density",
    "jacobi_coeff",
    "verify_identity",
    "ig_cdf",
]

SERIES_RTOL = 1e-14
SERIES_MAX_TERMS = 200


@dataclass(frozen=True)
class PGParams:
    """Shape ``b`` > 0 and tilt ``c`` of PG(b, c); ``c`` is stored as ``|c|``."""

    b: float
    c: float = 0.0

    def __post_init__(self):
        b = float(self.b)
        if not (b > 0 and math.isfinite(b)):
            raise PGDomainError(f"PG shape must be positive and finite, got b={self.b!r}")
        c = float(self.c)
        if not math.isfinite(c):
            raise PGDomainError(f"PG tilt must be finite, got c={self.c!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", abs(c))


def _params(params, c=None) -> PGParams:
    if isinstance(params, PGParams):
        return params
    return PGParams(params, 0.0 if c is None else c)


def log_cosh(x):
    """log(cosh(x)) without overflow."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def pg_log_laplace(params, t: float, c: float | None = None) -> float:
    """log E[exp(-t * omega)] for omega ~ PG(b, c)."""
    p = _params(params, c)
    t = float(t)
    if not t >= 0:
        raise PGDomainError(f"Laplace argument must be nonnegative, got t={t!r}")
    inner = math.sqrt((p.c * p.c / 2.0 + t) / 2.0)
    return p.b * (log_cosh(p.c / 2.0) - log_cosh(inner))


def pg_laplace(params, t: float, c: float | None = None) -> float:
    """E[exp(-t * omega)] for omega ~ PG(b, c).

    ``params`` is a :class:`PGParams` or the shape ``b`` (with ``c`` passed
    separately).
    """
    return math.exp(pg_log_laplace(params, t, c))


def pg_mean(params, c: float | None = None) -> float:
    """Exact mean b * tanh(c/2) / (2c), with the c -> 0 limit b/4."""
    p = _params(params, c)
    h = p.c / 2.0
    if h < 1e-4:
        # tanh(h)/h = 1 - h^2/3 + 2h^4/15 - ...
        ratio = 1.0 - h * h / 3.0 + 2.0 * h**4 / 15.0
    else:
        ratio = math.tanh(h) / h
    return p.b * ratio / 4.0


def pg_variance(params, c: float | None = None) -> float:
    """Variance sum_k b / d_k^2 with d_k = 2 (k - 1/2)^2 pi^2 + c^2 / 2.

    Summed in blocks until the last increment falls below 1e-14 of the
    running total.
    """
    p = _params(params, c)
    c2h = p.c * p.c / 2.0
    total = 0.0
    start = 1
    block = 512
    while True:
        k = np.arange(start, start + block, dtype=float)
        d = 2.0 * (k - 0.5) ** 2 * math.pi**2 + c2h
        terms = 1.0 / (d * d)
        total += float(terms.sum())
        if terms[-1] < SERIES_RTOL * total:
            break
        start += block
    return p.b * total


def _density_log_terms(n, x, b):
    """log of |n-th term| of the PG(b, 0) alternating series (array over x)."""
    return (
        (b - 1.0) * math.log(2.0)
        - gammaln(b)
        + gammaln(n + b)
        - gammaln(n + 1.0)
        + np.log(2.0 * n + b)
        - 0.5 * np.log(2.0 * math.pi * x**3)
        - (2.0 * n + b) ** 2 / (8.0 * x)
    )


def _jacobi_right_density(x):
    # PG(1,0) density via the large-argument Jacobi series; PG(1,0) = J*(1)/4.
    X = 4.0 * x
    total = np.zeros_like(X)
    for n in range(SERIES_MAX_TERMS):
        term = math.pi * (n + 0.5) * np.exp(-((n + 0.5) ** 2) * math.pi**2 * X / 2.0)
        total += term if n % 2 == 0 else -term
        if np.all(term < SERIES_RTOL * np.abs(total)):
            break
    return 4.0 * total


def _untilted_series_mp(x: float, b: float) -> float:
    """PG(b, 0) density at a single point in extended precision.

    Used where the double-precision alternating sum has cancelled away its
    significant digits (large x, b > 1).  Falls back to the leading-pole
    asymptote b-form (2 pi)^b x^(b-1) e^(-pi^2 x / 2) / Gamma(b) if the series
    has not converged within the term cap.
    """
    import mpmath as mp

    log_peak = max(
        float(_density_log_terms(float(n), np.array([x]), b)[0]) for n in range(0, SERIES_MAX_TERMS, 5)
    )
    log_target = b * math.log(2 * math.pi) + (b - 1) * math.log(x) - math.pi**2 * x / 2 - math.lgamma(b)
    digits = int((log_peak - log_target) / math.log(10)) + 25
    with mp.workdps(max(30, digits)):
        xm, bm = mp.mpf(x), mp.mpf(b)
        pre = (bm - 1) * mp.log(2) - mp.loggamma(bm) - mp.log(2 * mp.pi * xm**3) / 2
        total = mp.mpf(0)
        term = mp.mpf(0)
        for n in range(SERIES_MAX_TERMS):
            term = mp.exp(
                pre + mp.loggamma(n + bm) - mp.loggamma(n + 1) + mp.log(2 * n + bm)
                - (2 * n + bm) ** 2 / (8 * xm)
            )
            total += term if n % 2 == 0 else -term
            if n > 0 and term < SERIES_RTOL * abs(total) and term < mp.exp(log_peak) * 1e-30:
                return float(total)
    return math.exp(log_target)


def pg_density(x, params, c: float | None = None):
    """Density of PG(b, c) at ``x`` (scalar or array, all entries > 0).

    Evaluated as the alternating inverse-Gaussian series of the untilted
    PG(b, 0) density times the tilt cosh^b(c/2) exp(-c^2 x / 2).  For b = 1
    and large x the equivalent exponential-kernel series is used instead,
    which avoids cancellation in the tail; for other b, points where the
    double-precision sum has lost its digits are recomputed with mpmath.
    """
    p = _params(params, c)
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise PGDomainError("PG density is defined for x > 0 only")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)

    right = (p.b == 1.0) & (4.0 * flat > T_STAR)
    if np.any(right):
        out[right] = _jacobi_right_density(flat[right])
    left = ~right
    if np.any(left):
        xs = flat[left]
        total = np.zeros_like(xs)
        peak = np.zeros_like(xs)
        prev = np.full_like(xs, np.inf)
        done = np.zeros(xs.shape, dtype=bool)
        for n in range(SERIES_MAX_TERMS):
            term = np.exp(_density_log_terms(float(n), xs, p.b))
            signed = term if n % 2 == 0 else -term
            total = np.where(done, total, total + signed)
            peak = np.maximum(peak, term)
            # terms may grow before they decay; stop only on the decaying side
            done |= (term < SERIES_RTOL * np.abs(total)) & (term <= prev)
            prev = term
            if done.all():
                break
        lossy = ~done | (peak * 1e-15 * SERIES_MAX_TERMS > 1e-11 * np.abs(total))
        for i in np.flatnonzero(lossy):
            total[i] = _untilted_series_mp(float(xs[i]), p.b)
        out[left] = total

    log_tilt = p.b * log_cosh(p.c / 2.0) - p.c * p.c * flat / 2.0
    out = np.maximum(out, 0.0) * np.exp(log_tilt)
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


# --- Jacobi series for the exact sampler -------------------------------------

def _a0_left(t):
    return math.pi / 2.0 * (2.0 / (math.pi * t)) ** 1.5 * math.exp(-1.0 / (2.0 * t))


def _a0_right(t):
    return math.pi / 2.0 * math.exp(-(math.pi**2) * t / 8.0)


def _solve_t_star() -> float:
    return brentq(
        lambda t: math.log(_a0_left(t)) - math.log(_a0_right(t)),
        0.3, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps,
    )


#: Truncation point where both branches of a_0 agree; numerically 2/pi.
T_STAR: float = _solve_t_star()


def jacobi_coeff_untilted(n, x, t: float = T_STAR):
    """Piecewise coefficient a_n(x) of the J*(1) density, branch x <= t vs x > t."""
    xa = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    if np.any(~(xa > 0)):
        raise PGDomainError("Jacobi coefficients are defined for x > 0 only")
    h = n + 0.5
    with np.errstate(divide="ignore", over="ignore"):
        left = math.pi * h * (2.0 / (math.pi * xa)) ** 1.5 * np.exp(-2.0 * h * h / xa)
        right = math.pi * h * np.exp(-h * h * math.pi**2 * xa / 2.0)
    out = np.where(xa <= t, left, right)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TiltedJacobiSeries:
    """Alternating series of the tilted Jacobi density f(x|z) of J*(1, z).

    Coefficients are a_n(x|z) = cosh(z) exp(-z^2 x / 2) a_n(x); the partial
    sums S_n interlace around f(x|z) for every x > 0 when ``t`` lies in the
    overlap of the two branches' monotonicity intervals.
    """

    z: float = 0.0
    t: float = T_STAR

    def __post_init__(self):
        object.__setattr__(self, "z", abs(float(self.z)))
        if not self.t > 0:
            raise PGDomainError("truncation point must be positive")

    def log_tilt(self, x):
        return log_cosh(self.z) - self.z * self.z * np.asarray(x, dtype=float) / 2.0

    def coeff(self, n, x):
        return jacobi_coeff_untilted(n, x, self.t) * np.exp(self.log_tilt(x))

    def partial_sum(self, n: int, x):
        total = 0.0
        for i in range(n + 1):
            a = self.coeff(i, x)
            total = total + (a if i % 2 == 0 else -a)
        return total

    def density(self, x):
        """f(x|z) itself, via the PG(1, 2z) density and the x/4 rescaling."""
        x = np.asarray(x, dtype=float)
        return pg_density(x / 4.0, PGParams(1.0, 2.0 * self.z)) / 4.0


def jacobi_coeff(n, x, series: TiltedJacobiSeries):
    """a_n(x|z) for the given tilted series."""
    return series.coeff(n, x)


def ig_cdf(t: float, mu: float, lam: float = 1.0) -> float:
    """CDF of the inverse-Gaussian IG(mu, lam) at t; ``mu = inf`` allowed.

    The exp(2 lam / mu) Phi(.) product is formed in log space.
    """
    if t <= 0:
        return 0.0
    s = math.sqrt(lam / t)
    if math.isinf(mu):
        return 2.0 * math.exp(log_ndtr(-s))
    first = math.exp(log_ndtr(s * (t / mu - 1.0)))
    second = math.exp(2.0 * lam / mu + log_ndtr(-s * (t / mu + 1.0)))
    return first + second


@dataclass(frozen=True)
class ProposalMixture:
    """Two-component envelope of the J*(1, z) sampler.

    ``p`` is the mass of the left (truncated inverse-Gaussian) kernel on
    (0, t] and ``q`` the mass of the right (truncated exponential) kernel on
    (t, inf); ``p + q`` is the envelope constant c(z, t) >= 1.
    """

    z: float = 0.0
    t: float = T_STAR
    K: float = field(init=False)
    p: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        z = abs(float(self.z))
        object.__setattr__(self, "z", z)
        K = math.pi**2 / 8.0 + z * z / 2.0
        mu = math.inf if z == 0 else 1.0 / z
        # cosh(z) * 2 e^{-z} = 1 + e^{-2z}
        p = (1.0 + math.exp(-2.0 * z)) * ig_cdf(self.t, mu)
        q = math.exp(log_cosh(z) + math.log(math.pi / (2.0 * K)) - K * self.t)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def c(self) -> float:
        return self.p + self.q

    @property
    def acceptance(self) -> float:
        return 1.0 / (self.p + self.q)


def verify_identity(a: float, b: float, psi: float) -> float:
    """Residual of (e^psi)^a / (1+e^psi)^b = 2^-b e^{kappa psi} E[e^{-omega psi^2/2}].

    ``omega ~ PG(b, 0)`` and ``kappa = a - b/2``.  Both sides are formed in
    log space before the absolute difference is taken.
    """
    if not b > 0:
        raise PGDomainError("identity requires b > 0")
    log_lhs = a * psi - b * np.logaddexp(0.0, psi)
    kappa = a - b / 2.0
    log_rhs = -b * math.log(2.0) + kappa * psi + pg_log_laplace(PGParams(b, 0.0), psi * psi / 2.0)
    return abs(math.exp(log_lhs) - math.exp(log_rhs))
