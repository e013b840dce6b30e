import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import loggamma as c_loggamma

from hslg.dist import (FTheta, GridSampler, LogGammaInc, QDistSpec,
                       beta_sample, f_theta, invgamma, loggamma_inc, q_dist)
from hslg.specfun import digamma, trigamma

EULER = 0.5772156649015328606


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(20240811)


# ---------------------------------------------------------------------------
# inverse gamma


def test_invgamma_logpdf_point():
    assert invgamma(1.0).logpdf(1.0) == pytest.approx(-1.0, abs=1e-14)


def test_invgamma_negative_domain():
    with pytest.raises(ValueError):
        invgamma(0.0)
    assert invgamma(2.0).logpdf(-0.5) == -math.inf


def test_invgamma_moments(rng):
    ig = invgamma(3.0)
    x = ig.sample(rng, size=10**6)
    se = x.std() / 1000.0
    assert abs(x.mean() - 0.5) < 3 * se
    lx = np.log(x)
    se = lx.std() / 1000.0
    assert abs(lx.mean() + digamma(3.0)) < 3 * se


# ---------------------------------------------------------------------------
# signed log-gamma


def test_loggamma_inc_mode_and_mass():
    lg = loggamma_inc(LogGammaInc(2.0, +1))
    grid = np.linspace(-30, 10, 400001)
    dens = np.exp(lg.logpdf(grid))
    assert abs(np.trapz(dens, grid) - 1.0) < 1e-8
    assert grid[np.argmax(dens)] == pytest.approx(math.log(2.0), abs=1e-4)
    assert lg.mode() == pytest.approx(math.log(2.0), abs=1e-12)


def test_loggamma_inc_mean(rng):
    lg = loggamma_inc(LogGammaInc(1.0, +1))
    x = lg.sample(rng, size=10**6)
    se = x.std() / 1000.0
    assert abs(x.mean() + EULER) < 3 * se
    lgm = loggamma_inc(LogGammaInc(1.7, -1))
    y = lgm.sample(rng, size=2 * 10**5)
    se = y.std() / math.sqrt(y.size)
    assert abs(y.mean() + digamma(1.7)) < 3 * se


# ---------------------------------------------------------------------------
# f_theta


def test_ftheta_symmetry_by_quadrature():
    ft = f_theta(FTheta(1.0))
    xs = np.linspace(0.1, 18.0, 60)
    assert np.max(np.abs(ft.density_quad(xs) - ft.density_quad(-xs))) < 1e-10


def test_ftheta_quad_matches_closed_form():
    for th in (0.5, 1.0, 2.0):
        ft = f_theta(FTheta(th))
        xs = np.linspace(-20, 20, 81)
        assert np.max(np.abs(ft.density_quad(xs) / np.exp(ft.logpdf(xs)) - 1)) < 1e-12


def test_ftheta_tail_bounds():
    lo = math.exp(-2 * math.e)
    for th in (0.5, 1.0, 2.0):
        ft = f_theta(FTheta(th))
        hi = math.gamma(2 * th)
        g = np.linspace(-20, 20, 161)
        v = math.gamma(th) ** 2 * ft.density_quad(g) * np.exp(th * np.abs(g))
        assert np.all(v >= lo - 1e-12)
        assert np.all(v <= hi + 1e-12)


def test_ftheta_variance(rng):
    ft = f_theta(FTheta(1.0))
    x = ft.sample(rng, size=10**6)
    v = x.var()
    se = np.std((x - x.mean()) ** 2) / 1000.0
    assert abs(v - 2 * trigamma(1.0)) < 3 * se


def test_cf_against_gamma_function_oracle():
    ft = f_theta(FTheta(1.0))
    t = np.linspace(0.0, 30.0, 61)
    exact = np.exp(2 * (np.real(c_loggamma(1.0 + 1j * t)) - c_loggamma(1.0)))
    assert np.max(np.abs(ft.cf(t) - exact)) < 1e-12
    assert ft.cf(np.array([0.0]))[0] == pytest.approx(1.0, abs=1e-14)
    assert np.all(ft.cf(t) <= 1.0 / (1.0 + t**2) + 1e-12)


def test_cf_truncation_stability():
    ft = f_theta(FTheta(1.0))
    t = np.linspace(0.0, 30.0, 31)
    a = ft.log_cf(t, factors=10_000)
    b = ft.log_cf(t, factors=20_000)
    assert np.max(np.abs(a - b)) < 1e-10


def test_conv_density_n1_and_n2():
    ft = f_theta(FTheta(1.0))
    xs = np.linspace(-15, 15, 31)
    assert np.max(np.abs(ft.conv_density(1, xs) - np.exp(ft.logpdf(xs)))) < 1e-12
    # n = 2 against direct quadrature of the convolution
    y, w = np.polynomial.legendre.leggauss(400)
    lo, hi = -40.0, 40.0
    yy = 0.5 * (hi + lo) + 0.5 * (hi - lo) * y
    for x in (0.0, 1.5, 5.0):
        direct = float(np.sum(np.exp(ft.logpdf(yy) + ft.logpdf(x - yy)) * w)
                       * 0.5 * (hi - lo))
        assert ft.conv_density(2, x) == pytest.approx(direct, abs=1e-12)


def test_local_clt_sharp_rate():
    ft = f_theta(FTheta(1.0))
    sig2 = 2 * trigamma(1.0)
    sups = []
    for n in (100, 1000, 10000):
        xg = np.linspace(-2, 2, 81)
        fn = ft.conv_density(n, xg * math.sqrt(n))
        phi = np.exp(-(xg**2) / (2 * sig2)) / math.sqrt(2 * math.pi * sig2)
        sups.append(float(np.max(np.abs(math.sqrt(n) * fn / phi - 1))))
    assert sups[0] > sups[1] > sups[2]
    assert sups[2] <= 0.02


def test_sampler_ks_against_quadrature_cdf(rng):
    ft = f_theta(FTheta(1.0))
    m = 10**6
    x = np.sort(ft.sample(rng, size=m))
    grid = np.linspace(-35, 35, 7001)
    dens = np.exp(ft.logpdf(grid))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1])
                                           * np.diff(grid))])
    cdf /= cdf[-1]
    emp = np.searchsorted(x, grid, side="right") / m
    assert np.max(np.abs(emp - cdf)) <= 4.0 / math.sqrt(m)


# ---------------------------------------------------------------------------
# q distributions


def test_q_mode_trivial():
    q = q_dist(QDistSpec(2.0, 2.0, +1, 1.3, 1.3))
    assert q.mode() == pytest.approx(1.3 - math.log(2.0), abs=1e-12)


def test_q_normalization():
    for spec in (QDistSpec(1.0, 1.0, +1, 0.0, 0.0),
                 QDistSpec(0.9, 1.1, -1, 0.5, -0.3),
                 QDistSpec(2.0, 0.5, +1, -2.0, 3.0)):
        assert q_dist(spec).normalization_check() == pytest.approx(1.0, abs=1e-7)


def test_q_tail_decay_by_quadrature():
    a, b = 0.4, -0.6
    q = q_dist(QDistSpec(1.0, 1.0, +1, a, b))
    grid = np.linspace(min(a, b) - 40, max(a, b) + 40, 200001)
    dens = np.exp(q.logpdf(grid))
    probs = []
    for r in (2.0, 4.0, 8.0):
        mask = (grid < min(a, b) - 2 * r) | (grid > max(a, b) + 2 * r)
        probs.append(float(np.trapz(np.where(mask, dens, 0.0), grid)))
    # exponential decay in r: each doubling of r cuts the mass by far
    # more than e^{-2} per unit of r difference
    assert probs[1] < probs[0] * math.exp(-2.0)
    assert probs[2] < probs[1] * math.exp(-4.0)


def test_q_grid_vs_exact_transform(rng):
    q = q_dist(QDistSpec(0.9, 1.4, -1, 0.2, -1.0))
    m = 2 * 10**5
    a = np.sort(q.sample(rng, size=m))
    b = np.sort(q.sample_exact(rng, size=m))
    grid = np.linspace(-8, 8, 801)
    ks = np.max(np.abs(np.searchsorted(a, grid) / m - np.searchsorted(b, grid) / m))
    assert ks < 1.36 * math.sqrt(2.0 / m) * 2


@given(st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.3, 3), st.floats(0.3, 3),
       st.sampled_from([-1, +1]))
@settings(max_examples=25, deadline=None)
def test_q_quantile_monotone(a, b, t1, t2, sign):
    q = q_dist(QDistSpec(t1, t2, sign, a, b))
    us = np.linspace(0.05, 0.95, 10)
    qs = q.quantile(us)
    assert np.all(np.diff(qs) >= 0)


# ---------------------------------------------------------------------------
# beta


def test_beta_uniform(rng):
    bs = beta_sample(1.0, 1.0)
    x = bs.sample(rng, size=10**6)
    assert abs(x.mean() - 0.5) < 3 * x.std() / 1000.0


def test_beta_log_mean(rng):
    bs = beta_sample(0.9, 0.2)
    x = np.log(bs.sample(rng, size=10**6))
    se = x.std() / 1000.0
    assert abs(x.mean() - (digamma(0.9) - digamma(1.1))) < 3 * se
    assert bs.mean_log() == pytest.approx(digamma(0.9) - digamma(1.1), abs=1e-13)


def test_beta_small_alpha_bound():
    theta = 1.0
    for a1 in (1e-2, 1e-3):
        bs = beta_sample(theta - a1, 2 * a1)
        assert abs(bs.mean_log()) <= 2 * a1 * trigamma(theta / 2.0)


def test_beta_domain():
    with pytest.raises(ValueError):
        beta_sample(0.0, 1.0)


# ---------------------------------------------------------------------------
# grid sampler machinery


def test_grid_sampler_normalization_and_cdf():
    g = GridSampler(lambda x: -0.5 * np.asarray(x) ** 2, -10, 10)
    assert g.normalization == pytest.approx(math.sqrt(2 * math.pi), rel=1e-6)
    from scipy.stats import norm
    xs = np.linspace(-3, 3, 13)
    assert np.max(np.abs(g.cdf(xs) - norm.cdf(xs))) < 1e-6
    us = np.linspace(0.01, 0.99, 21)
    assert np.max(np.abs(g.quantile(us) - norm.ppf(us))) < 5e-5
