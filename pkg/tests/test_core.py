import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as hst
from scipy import integrate

from conftest import closed_variance, series_mean, weierstrass_inv_cosh
from pgbayes import (PGDomainError, PGParams, ProposalMixture, T_STAR, TiltedJacobiSeries,
                     jacobi_coeff, pg_density, pg_laplace, pg_mean, pg_variance,
                     sample_pg, verify_identity)
from pgbayes.core import jacobi_coeff_untilted


# --- parameters and domain -------------------------------------------------------

def test_params_validation():
    with pytest.raises(PGDomainError):
        PGParams(0.0, 1.0)
    with pytest.raises(PGDomainError):
        PGParams(-1.0, 1.0)
    with pytest.raises(PGDomainError):
        PGParams(float("inf"), 0.0)
    assert PGParams(2.0, -3.0).c == 3.0


def test_domain_errors():
    with pytest.raises(PGDomainError):
        pg_laplace(PGParams(1, 0), -0.1)
    with pytest.raises(PGDomainError):
        pg_density(0.0, PGParams(1, 0))
    with pytest.raises(PGDomainError):
        pg_density(-1.0, PGParams(1, 0))
    with pytest.raises(PGDomainError):
        pg_mean(0.0, 1.0)


# --- Laplace transform -----------------------------------------------------------

def test_laplace_at_zero_is_one():
    assert pg_laplace(PGParams(1, 0), 0.0) == 1.0
    assert pg_laplace(PGParams(7.5, 3.0), 0.0) == pytest.approx(1.0, abs=1e-15)


def test_laplace_matches_weierstrass_product():
    oracle = weierstrass_inv_cosh(1.0)
    assert oracle == pytest.approx(0.6480543, abs=1e-6)
    assert pg_laplace(PGParams(1, 0), 2.0) == pytest.approx(1 / math.cosh(1.0), rel=1e-14)
    assert pg_laplace(PGParams(1, 0), 2.0) == pytest.approx(oracle, rel=1e-6)


def test_laplace_large_b_no_overflow():
    v = pg_laplace(PGParams(5000.0, 40.0), 3.0)
    assert 0.0 < v < 1.0 and math.isfinite(v)


def test_laplace_monte_carlo():
    rng = np.random.default_rng(11)
    w = sample_pg(2.0, 3.0, rng, size=1_000_000)
    e = np.exp(-w)
    se = e.std() / math.sqrt(e.size)
    assert abs(e.mean() - pg_laplace(PGParams(2, 3), 1.0)) < 4 * se


# --- moments --------------------------------------------------------------------

def test_mean_examples():
    assert pg_mean(PGParams(1, 0)) == 0.25
    assert pg_mean(PGParams(3, 0)) == pytest.approx(0.75, abs=1e-15)
    assert pg_mean(PGParams(1, 2)) == pytest.approx(math.tanh(1) / 4, rel=1e-14)
    assert pg_mean(PGParams(1, 2)) == pytest.approx(series_mean(1, 2), rel=1e-6)


def test_mean_continuous_near_zero():
    assert pg_mean(1, 1e-6) == pytest.approx(0.25, rel=1e-12)
    assert pg_mean(1, 2e-4) == pytest.approx(math.tanh(1e-4) / 4e-4, rel=1e-13)


def test_variance_examples():
    assert pg_variance(PGParams(1, 0)) == pytest.approx(1 / 24, abs=1e-12)
    assert pg_variance(PGParams(2, 0)) == pytest.approx(1 / 12, abs=1e-12)
    for c in (0.3, 1.0, 4.0, 10.0, 50.0):
        assert pg_variance(1, c) == pytest.approx(closed_variance(1, c), rel=1e-12)


def test_variance_monte_carlo():
    rng = np.random.default_rng(12)
    x = sample_pg(1.0, 4.0, rng, size=1_000_000)
    v = x.var(ddof=1)
    se = math.sqrt((np.mean((x - x.mean()) ** 4) - v * v) / x.size)
    assert abs(v - pg_variance(1, 4)) < 4 * se


def test_moment_consistency_with_laplace():
    # t < 0 is outside the domain, so use the second-order one-sided stencil
    h = 1e-5
    for b, c in ((1, 0), (2, 1.5), (10, 4)):
        p = PGParams(b, c)
        d = (3 * pg_laplace(p, 0.0) - 4 * pg_laplace(p, h) + pg_laplace(p, 2 * h)) / (2 * h)
        assert d == pytest.approx(pg_mean(p), rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(hst.floats(0.1, 50), hst.floats(0, 30))
def test_evenness(b, c):
    assert pg_laplace(b, 0.7, c=-c) == pg_laplace(b, 0.7, c=c)
    assert pg_mean(b, -c) == pg_mean(b, c)
    assert pg_variance(b, -c) == pg_variance(b, c)
    assert pg_density(0.3, PGParams(b, -c)) == pg_density(0.3, PGParams(b, c))


# --- density --------------------------------------------------------------------

@pytest.mark.parametrize("b", [1, 2, 5, 10])
@pytest.mark.parametrize("c", [0, 1, 3, 10])
def test_density_normalizes(b, c):
    p = PGParams(b, c)
    f = lambda x: float(pg_density(x, p))
    m = pg_mean(p)
    s = math.sqrt(pg_variance(p))
    pts = [m / 4, m, m + 2 * s]
    total = sum(integrate.quad(f, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=400)[0]
                for lo, hi in zip([1e-12] + pts, pts + [m + 60 * s]))
    assert total == pytest.approx(1.0, abs=1e-6)


def test_density_first_moment():
    p = PGParams(2, 1.0)
    m = integrate.quad(lambda x: x * float(pg_density(x, p)), 1e-12, 20, limit=400)[0]
    assert m == pytest.approx(pg_mean(p), rel=1e-7)


@settings(max_examples=50, deadline=None)
@given(hst.floats(0.05, 3.0), hst.floats(0.1, 12.0), hst.sampled_from([1.0, 2.0, 4.5]))
def test_tilting_identity(x, c, b):
    lhs = pg_density(x, PGParams(b, c))
    base = pg_density(x, PGParams(b, 0))
    rhs = math.cosh(c / 2) ** b * math.exp(-c * c * x / 2) * base
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_density_matches_kde():
    from scipy.stats import gaussian_kde
    rng = np.random.default_rng(13)
    x = sample_pg(1.0, 2.0, rng, size=200_000)
    kde = gaussian_kde(x, bw_method=0.05)
    grid = np.linspace(0.06, 0.5, 12)
    f = pg_density(grid, PGParams(1, 2))
    assert np.max(np.abs(kde(grid) - f) / f) < 0.05


def test_density_vectorized():
    grid = np.array([0.1, 0.2, 0.4])
    v = pg_density(grid, PGParams(1, 0))
    assert v.shape == (3,)
    assert v[1] == pytest.approx(pg_density(0.2, PGParams(1, 0)), rel=1e-15)


# --- Jacobi series ---------------------------------------------------------------

def test_truncation_point_continuity():
    assert T_STAR == pytest.approx(2 / math.pi, abs=1e-12)
    left = jacobi_coeff_untilted(0, T_STAR * (1 - 1e-15))
    right = jacobi_coeff_untilted(0, T_STAR * (1 + 1e-15))
    assert left == pytest.approx(right, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(hst.floats(0.02, 4.0), hst.floats(0, 8), hst.integers(0, 8))
def test_coefficient_ratio_tilt_cancels(x, z, n):
    s = TiltedJacobiSeries(z)
    s0 = TiltedJacobiSeries(0.0)
    # deep terms at small x underflow to zero in double precision
    assume(jacobi_coeff(n + 1, x, s) > 1e-300 and jacobi_coeff(n + 1, x, s0) > 1e-300)
    r = jacobi_coeff(n + 1, x, s) / jacobi_coeff(n, x, s)
    r0 = jacobi_coeff(n + 1, x, s0) / jacobi_coeff(n, x, s0)
    assert r == pytest.approx(r0, rel=1e-12)
    assert jacobi_coeff(n + 1, x, s) < jacobi_coeff(n, x, s)


def test_envelope_interlacing():
    rng = np.random.default_rng(14)
    for _ in range(100):
        x = float(rng.uniform(0.05, 3.0))
        z = float(rng.uniform(0.0, 5.0))
        s = TiltedJacobiSeries(z)
        S = [s.partial_sum(n, x) for n in range(11)]
        f = float(s.density(x))
        a = [float(s.coeff(n, x)) for n in range(11)]
        for n in range(4):
            # S_n and S_{n+2} differ by a_{n+1} - a_{n+2}; strict unless below one ulp
            gap = a[n + 1] - a[n + 2]
            strict = gap > 4 * np.spacing(abs(S[n]))
            if n % 2 == 0:
                assert S[n + 2] < S[n] if strict else S[n + 2] <= S[n]
            else:
                assert S[n + 2] > S[n] if strict else S[n + 2] >= S[n]
        assert S[1] <= f * (1 + 1e-12) and f <= S[2] * (1 + 1e-12)


def test_proposal_mixture():
    pm = ProposalMixture(1.378)
    assert pm.p >= 0 and pm.q >= 0 and pm.c >= 1
    assert pm.K == pytest.approx(math.pi ** 2 / 8 + 1.378 ** 2 / 2)
    # the rounded truncation point 0.64 reproduces the published minimum exactly
    assert ProposalMixture(1.378, 0.64).acceptance == pytest.approx(0.9991977, abs=5e-8)
    assert pm.acceptance == pytest.approx(0.9991982, abs=5e-8)
    worst = min(ProposalMixture(z).acceptance for z in np.linspace(0, 20, 401))
    assert worst >= 0.99919


# --- integral identity --------------------------------------------------------------

def test_identity_examples():
    assert verify_identity(0, 1, 0) == pytest.approx(0, abs=1e-15)
    assert verify_identity(1, 2, 1.7) < 1e-10
    assert verify_identity(3, 10, -4) < 1e-10


def test_identity_against_mpmath():
    import mpmath as mp
    mp.mp.dps = 40
    a, b, psi = mp.mpf(1), mp.mpf(2), mp.mpf(1.7)
    lhs = mp.e ** (a * psi) / (1 + mp.e ** psi) ** b
    kappa = a - b / 2
    rhs = mp.mpf(2) ** (-b) * mp.e ** (kappa * psi) / mp.cosh(mp.sqrt(psi ** 2 / 4)) ** b
    assert float(abs(lhs - rhs)) < 1e-35
    assert verify_identity(1.0, 2.0, 1.7) < 1e-15


@settings(max_examples=200, deadline=None)
@given(hst.sampled_from([1.0, 2.0, 10.0, 100.0]), hst.floats(0, 1), hst.floats(-30, 30))
def test_identity_property(b, frac, psi):
    assert verify_identity(frac * b, b, psi) < 1e-10
