"""Random-variate generation for the Polya-Gamma family.

The exact PG(1, z) sampler draws from the tilted Jacobi law J*(1, z/2) by
alternating-series rejection and rescales by 1/4.  Integer shapes are sums of
PG(1, z) draws; a fractional remainder is served by a truncated
sum-of-gammas draw.

Randomness always comes from a caller-owned :class:`numpy.random.Generator`
(the "stream").  The hot loops are compiled with numba, which consumes the
generator's bit stream directly, so a fixed seed reproduces the same draws
whether a value is requested singly or in bulk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .core import T_STAR, PGDomainError

__all__ = [
    "RngStream",
    "make_rng",
    "SamplerStats",
    "TIGStats",
    "sample_jacobi",
    "sample_pg1",
    "sample_pg",
    "sample_pg_naive",
    "sample_tig_large_mu",
    "sample_tig_small_mu",
    "MAX_REJECTIONS",
    "HIST_BINS",
    "FRACTIONAL_TERMS",
]

RngStream = np.random.Generator

MAX_REJECTIONS = 10_000
HIST_BINS = 16
FRACTIONAL_TERMS = 200

_PI = math.pi
_PI2 = math.pi * math.pi
_LOG2 = math.log(2.0)

# counts layout: [proposals, acceptances, hist[L=0], hist[L=1], ...]
_N_COUNTS = 2 + HIST_BINS


def make_rng(seed=None) -> RngStream:
    """A fresh PCG64 stream; identical seeds give identical draw sequences."""
    return np.random.default_rng(seed)


@dataclass
class SamplerStats:
    """Counters for the PG(1, z) rejection loop.

    ``partial_sum_histogram[n]`` counts proposal decisions taken after
    inspecting ``n`` partial sums (S_1 is the first); the last bin collects
    everything beyond it.
    """

    counts: np.ndarray = field(default_factory=lambda: np.zeros(_N_COUNTS, dtype=np.int64))

    @property
    def proposals(self) -> int:
        return int(self.counts[0])

    @property
    def acceptances(self) -> int:
        return int(self.counts[1])

    @property
    def partial_sum_histogram(self) -> np.ndarray:
        return self.counts[2:]

    @property
    def acceptance_rate(self) -> float:
        return self.acceptances / self.proposals if self.proposals else float("nan")

    def prob_more_than(self, n: int) -> float:
        """Empirical P(L > n) over all proposals."""
        if not self.proposals:
            return float("nan")
        return float(self.partial_sum_histogram[n + 1:].sum()) / self.proposals

    def reset(self):
        self.counts[:] = 0


@dataclass
class TIGStats:
    """Trial/acceptance counters for the truncated inverse-Gaussian loops."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))

    @property
    def trials(self) -> int:
        return int(self.counts[0])

    @property
    def accepts(self) -> int:
        return int(self.counts[1])

    @property
    def acceptance_rate(self) -> float:
        return self.accepts / self.trials if self.trials else float("nan")


# --- compiled kernels -----------------------------------------------------------

@nb.njit(cache=True)
def _norm_log_cdf(x):
    if x > -20.0:
        return math.log(0.5 * math.erfc(-x / math.sqrt(2.0)))
    # asymptotic tail, ample for the mixture weight
    return -0.5 * x * x - math.log(-x) - 0.5 * math.log(2.0 * _PI)


@nb.njit(cache=True)
def _log_ig_cdf(t, z):
    """log P(X <= t), X ~ IG(1/z, 1); z = 0 is the inverse-chi-square limit."""
    s = 1.0 / math.sqrt(t)
    if z == 0.0:
        return _LOG2 + _norm_log_cdf(-s)
    a = _norm_log_cdf(s * (t * z - 1.0))
    b = 2.0 * z + _norm_log_cdf(-s * (t * z + 1.0))
    hi = max(a, b)
    return hi + math.log(math.exp(a - hi) + math.exp(b - hi))


@nb.njit(cache=True)
def _a_coef(n, x, t):
    h = n + 0.5
    if x <= t:
        return _PI * h * math.exp(-1.5 * math.log(0.5 * _PI * x) - 2.0 * h * h / x)
    return _PI * h * math.exp(-0.5 * h * h * _PI2 * x)


@nb.njit(cache=True)
def _tig_large_mu(z, t, rng, tc):
    """IG(1/z, 1) truncated to (0, t] when 1/z > t (or z = 0)."""
    while True:
        while True:
            e1 = rng.standard_exponential()
            e2 = rng.standard_exponential()
            if e1 * e1 <= 2.0 * e2 / t:
                break
        x = t / ((1.0 + t * e1) * (1.0 + t * e1))
        tc[0] += 1
        if rng.random() <= math.exp(-0.5 * z * z * x):
            tc[1] += 1
            return x


@nb.njit(cache=True)
def _ig_draw(mu, rng):
    """Untruncated IG(mu, 1) by the many-to-one transformation."""
    y = rng.standard_normal()
    y = y * y
    a = 0.5 * mu * y
    # mu + mu^2 y/2 - mu/2 sqrt(4 mu y + mu^2 y^2), written without cancellation
    x = mu / (1.0 + a + math.sqrt(a * (2.0 + a)))
    if rng.random() > mu / (mu + x):
        x = mu * mu / x
    return x


@nb.njit(cache=True)
def _tig_small_mu(z, t, rng, tc):
    """IG(1/z, 1) truncated to (0, t] when 1/z <= t."""
    mu = 1.0 / z
    while True:
        x = _ig_draw(mu, rng)
        tc[0] += 1
        if x <= t:
            tc[1] += 1
            return x


@nb.njit(cache=True)
def _tig_fill(z, t, small, rng, tc, out):
    for i in range(out.shape[0]):
        out[i] = _tig_small_mu(z, t, rng, tc) if small else _tig_large_mu(z, t, rng, tc)


@nb.njit(cache=True)
def _jacobi_one(z, t, rng, counts, tc):
    """One exact draw from J*(1, z), z >= 0."""
    K = 0.125 * _PI2 + 0.5 * z * z
    log_right = math.log(0.5 * _PI / K) - K * t
    log_left = _LOG2 - z + _log_ig_cdf(t, z)
    right_prob = 1.0 / (1.0 + math.exp(log_left - log_right))
    mu_large = z == 0.0 or 1.0 / z > t
    for _ in range(MAX_REJECTIONS):
        u = rng.random()
        v = rng.random()
        if u < right_prob:
            x = t + rng.standard_exponential() / K
        elif mu_large:
            x = _tig_large_mu(z, t, rng, tc)
        else:
            x = _tig_small_mu(z, t, rng, tc)
        s = _a_coef(0, x, t)
        y = v * s
        n = 0
        counts[0] += 1
        while True:
            n += 1
            if n % 2 == 1:
                s -= _a_coef(n, x, t)
                if y <= s:
                    counts[1] += 1
                    counts[2 + min(n, HIST_BINS - 1)] += 1
                    return x
            else:
                s += _a_coef(n, x, t)
                if y > s:
                    counts[2 + min(n, HIST_BINS - 1)] += 1
                    break
    raise RuntimeError("PG(1, z) sampler exceeded its rejection cap; this indicates a defect")


@nb.njit(cache=True)
def _jacobi_fill(z, t, rng, counts, tc, out):
    for i in range(out.shape[0]):
        out[i] = _jacobi_one(z, t, rng, counts, tc)


@nb.njit(cache=True)
def _naive_one(b, z, n_terms, rng):
    c2 = z * z / (4.0 * _PI2)
    total = 0.0
    for k in range(1, n_terms + 1):
        h = k - 0.5
        total += rng.standard_gamma(b) / (h * h + c2)
    return total / (2.0 * _PI2)


@nb.njit(cache=True)
def _naive_fill(b, z, n_terms, rng, out):
    for i in range(out.shape[0]):
        out[i] = _naive_one(b, z, n_terms, rng)


@nb.njit(cache=True)
def _pg_fill(b, z, rng, counts, tc, out):
    """out[i] ~ PG(b[i], z[i]) elementwise; b[i] == 0 yields exactly 0."""
    t = T_STAR
    for i in range(out.shape[0]):
        bi = b[i]
        zi = 0.5 * abs(z[i])
        whole = int(math.floor(bi))
        frac = bi - whole
        total = 0.0
        for _ in range(whole):
            total += _jacobi_one(zi, t, rng, counts, tc)
        total *= 0.25
        if frac > 0.0:
            total += _naive_one(frac, z[i], FRACTIONAL_TERMS, rng)
        out[i] = total


# --- public API -----------------------------------------------------------------

def _counts(stats):
    return stats.counts if stats is not None else np.zeros(_N_COUNTS, dtype=np.int64)


def sample_jacobi(z: float, rng: RngStream, stats: SamplerStats | None = None, size=None,
                  t: float = T_STAR):
    """Exact draws from the tilted Jacobi distribution J*(1, z).

    ``z`` is on the Jacobi scale, so PG(1, c) corresponds to z = |c|/2.
    """
    z = abs(float(z))
    if not math.isfinite(z):
        raise PGDomainError("tilt must be finite")
    out = np.empty(1 if size is None else int(size))
    _jacobi_fill(z, float(t), rng, _counts(stats), np.zeros(2, dtype=np.int64), out)
    return float(out[0]) if size is None else out


def sample_pg1(z: float, rng: RngStream, stats: SamplerStats | None = None, size=None):
    """Exact PG(1, z) draws: J*(1, |z|/2) / 4.

    Returns a float when ``size`` is None, else an array of ``size`` draws.
    """
    z = float(z)
    if not math.isfinite(z):
        raise PGDomainError("tilt must be finite")
    out = sample_jacobi(abs(z) / 2.0, rng, stats, 1 if size is None else size)
    out = out / 4.0
    return float(out[0]) if size is None else out


def sample_pg(b, z, rng: RngStream, stats: SamplerStats | None = None, size=None):
    """Draws from PG(b, z); ``b`` and ``z`` broadcast against each other.

    Integer ``b`` is exact (sum of ``b`` PG(1, z) draws).  A fractional part
    ``e = b - floor(b)`` adds a 200-term sum-of-gammas PG(e, z) draw, which
    is an approximation.  Entries with ``b == 0`` are allowed inside arrays
    and return 0, the point mass PG(0, z); a scalar ``b`` must be positive.
    Cost is linear in ``b``.
    """
    scalar = np.ndim(b) == 0 and np.ndim(z) == 0 and size is None
    if scalar and not float(b) > 0:
        raise PGDomainError(f"PG shape must be positive, got b={b!r}")
    bb, zz = np.broadcast_arrays(np.asarray(b, dtype=float), np.asarray(z, dtype=float))
    if size is not None:
        bb = np.broadcast_to(bb, size)
        zz = np.broadcast_to(zz, size)
    if np.any(~(bb >= 0)) or np.any(~np.isfinite(bb)):
        raise PGDomainError("PG shape must be nonnegative and finite")
    if np.any(~np.isfinite(zz)):
        raise PGDomainError("PG tilt must be finite")
    out = np.empty(bb.size)
    _pg_fill(np.ascontiguousarray(bb, dtype=float).ravel(),
             np.ascontiguousarray(zz, dtype=float).ravel(),
             rng, _counts(stats), np.zeros(2, dtype=np.int64), out)
    if scalar:
        return float(out[0])
    return out.reshape(bb.shape)


def pg_draws_unchecked(b: np.ndarray, z: np.ndarray, rng: RngStream,
                       stats: SamplerStats | None = None) -> np.ndarray:
    """PG(b[i], z[i]) for float64 vectors already known to be valid.

    Skips the argument checks of :func:`sample_pg`; meant for sampler inner
    loops.
    """
    out = np.empty(b.shape[0])
    _pg_fill(b, z, rng, _counts(stats), np.zeros(2, dtype=np.int64), out)
    return out


def sample_pg_naive(b: float, z: float, n_terms: int, rng: RngStream, size=None):
    """Truncated sum-of-gammas PG(b, z) draw.

    (1 / 2 pi^2) sum_{k <= n_terms} g_k / ((k - 1/2)^2 + z^2 / (4 pi^2)) with
    g_k ~ Ga(b, 1).  Biased low by the omitted tail; a reference, not a
    production sampler.
    """
    b = float(b)
    if not b > 0:
        raise PGDomainError(f"PG shape must be positive, got b={b!r}")
    n_terms = int(n_terms)
    if n_terms < 1:
        raise PGDomainError("need at least one term")
    out = np.empty(1 if size is None else int(size))
    _naive_fill(b, float(z), n_terms, rng, out)
    return float(out[0]) if size is None else out


def _tig_args(z, t):
    z, t = abs(float(z)), float(t)
    if not t > 0:
        raise PGDomainError("truncation point must be positive")
    return z, t


def _tig(z, t, small, rng, stats, size):
    tc = stats.counts if stats is not None else np.zeros(2, dtype=np.int64)
    out = np.empty(1 if size is None else int(size))
    _tig_fill(z, t, small, rng, tc, out)
    return float(out[0]) if size is None else out


def sample_tig_large_mu(z: float, t: float, rng: RngStream, stats: TIGStats | None = None,
                        size=None):
    """IG(1/z, 1) truncated to (0, t], for the regime 1/z > t (z = 0 allowed).

    Proposal is the truncated inverse chi-square built from two unit
    exponentials; acceptance probability exp(-z^2 X / 2).
    """
    z, t = _tig_args(z, t)
    if z != 0 and not 1.0 / z > t:
        raise PGDomainError("large-mean regime requires 1/z > t")
    return _tig(z, t, False, rng, stats, size)


def sample_tig_small_mu(z: float, t: float, rng: RngStream, stats: TIGStats | None = None,
                        size=None):
    """IG(1/z, 1) truncated to (0, t], for the regime 1/z <= t.

    Untruncated inverse-Gaussian draws are repeated until one lands in (0, t].
    """
    z, t = _tig_args(z, t)
    if z == 0 or 1.0 / z > t:
        raise PGDomainError("small-mean regime requires 1/z <= t")
    return _tig(z, t, True, rng, stats, size)
