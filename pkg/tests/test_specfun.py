import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hslg.specfun import (ThetaP, digamma, nu_constant, point2line_constants,
                          tetragamma, theta_c_solve, trigamma)

EULER = 0.5772156649015328606
ZETA3 = 1.2020569031595942854


def series_digamma(z, terms=200_000):
    """Truncated series for the digamma plus an integral tail correction."""
    n = np.arange(terms, dtype=float)
    s = np.sum(1.0 / (n + 1.0) - 1.0 / (n + z))
    # sum_{n>=T} (1/(n+1) - 1/(n+z)) ~ (z-1) * int_T dx/(x+1)(x+z) + midpoint
    a = terms - 0.5
    tail = math.log((a + z) / (a + 1.0))
    return -EULER + s + tail


def series_trigamma(z, terms=200_000):
    n = np.arange(terms, dtype=float)
    s = np.sum((n + z) ** -2.0)
    a = terms - 0.5
    return float(s + 1.0 / (a + z))


def series_tetragamma(z, terms=200_000):
    n = np.arange(terms, dtype=float)
    s = -2.0 * np.sum((n + z) ** -3.0)
    a = terms - 0.5
    return float(s - 1.0 / (a + z) ** 2)


def test_digamma_special_values():
    assert digamma(1.0) == pytest.approx(-EULER, abs=1e-12)
    assert digamma(2.0) == pytest.approx(1.0 - EULER, abs=1e-12)


def test_digamma_half_vs_series_oracle():
    assert digamma(0.5) == pytest.approx(series_digamma(0.5), abs=1e-10)


def test_trigamma_tetragamma_values():
    assert trigamma(1.0) == pytest.approx(math.pi**2 / 6.0, abs=1e-12)
    assert tetragamma(1.0) == pytest.approx(-2.0 * ZETA3, abs=1e-12)
    assert trigamma(2.0) == pytest.approx(trigamma(1.0) - 1.0, abs=1e-12)


@pytest.mark.parametrize("z", [0.5, 0.9, 1.7, 3.3])
def test_polygamma_series_oracles(z):
    assert trigamma(z) == pytest.approx(series_trigamma(z), abs=1e-9)
    assert tetragamma(z) == pytest.approx(series_tetragamma(z), abs=1e-9)


def test_recurrences_grid():
    for z in np.arange(0.1, 10.0001, 0.1):
        assert abs(digamma(z + 1) - digamma(z) - 1 / z) <= 1e-11
        assert abs(trigamma(z + 1) - trigamma(z) + 1 / z**2) <= 1e-11
        assert abs(tetragamma(z + 1) - tetragamma(z) - 2 / z**3) <= 1e-11


@given(st.floats(min_value=0.05, max_value=50.0))
@settings(max_examples=200, deadline=None)
def test_signs(z):
    assert trigamma(z) > 0
    assert tetragamma(z) < 0


def test_domain_errors():
    for fn in (digamma, trigamma, tetragamma, nu_constant):
        with pytest.raises(ValueError):
            fn(0.0)
        with pytest.raises(ValueError):
            fn(-1.3)


def test_nu_value_and_stability():
    # composed from the series oracles (~4 significant digits quoted)
    assert nu_constant(1.0) == pytest.approx(0.8400, abs=2e-4)
    direct = trigamma(1.0) ** 2 * (-tetragamma(1.0)) ** (-4.0 / 3.0)
    oracle = series_trigamma(1.0, 200_000) ** 2 * (
        -series_tetragamma(1.0, 200_000)
    ) ** (-4.0 / 3.0)
    assert nu_constant(1.0) == pytest.approx(direct, abs=1e-14)
    assert nu_constant(1.0) == pytest.approx(oracle, abs=1e-8)
    # doubling the series truncation does not move the oracle
    oracle2 = series_trigamma(1.0, 400_000) ** 2 * (
        -series_tetragamma(1.0, 400_000)
    ) ** (-4.0 / 3.0)
    assert oracle == pytest.approx(oracle2, abs=1e-10)


def test_nu_finite_difference_reconstruction():
    h = 1e-4
    for th in (0.7, 1.0, 2.5):
        t1 = (digamma(th + h) - digamma(th - h)) / (2 * h)
        t2 = (digamma(th + h) - 2 * digamma(th) + digamma(th - h)) / h**2
        fd = t1**2 * (-t2) ** (-4.0 / 3.0)
        assert nu_constant(th) == pytest.approx(fd, abs=1e-6)


def test_theta_c_symmetric_case():
    assert theta_c_solve(ThetaP(1.0, 1.0)) == 1.0
    assert theta_c_solve(ThetaP(0.37, 1.0)) == 0.37


def test_theta_c_residual_grid():
    for th in np.linspace(0.25, 4.0, 20):
        for p in np.linspace(1.0, 3.0, 20):
            tc = theta_c_solve(ThetaP(float(th), float(p)))
            assert 0.0 < tc < 2.0 * th
            assert abs(trigamma(tc) - p * trigamma(2 * th - tc)) <= 1e-11


def test_theta_c_monotone_in_p():
    prev = math.inf
    for p in np.linspace(1.0, 6.0, 25):
        tc = theta_c_solve(ThetaP(1.0, float(p)))
        assert tc <= prev + 1e-13
        prev = tc


def test_point2line_p1_exact():
    th = 1.3
    f, sigma = point2line_constants(ThetaP(th, 1.0))
    assert f == pytest.approx(-2.0 * digamma(th), abs=1e-13)
    assert sigma**3 == pytest.approx(-tetragamma(th), rel=1e-12)


def test_sigma_ratio_tends_to_one():
    th = 1.0
    ratios = []
    for p in (1.5, 1.1, 1.01, 1.001):
        _, s = point2line_constants(ThetaP(th, p))
        ratios.append(s / (-tetragamma(th)) ** (1.0 / 3.0))
    diffs = [abs(r - 1.0) for r in ratios]
    assert diffs == sorted(diffs, reverse=True)
    assert diffs[-1] < 1e-3


def test_expansion_remainder_bounded():
    th, M = 1.0, 1.0
    rems = []
    for N in (10**3, 10**4, 10**5, 10**6):
        k = M * N ** (2.0 / 3.0)
        p = (N + k) / (N - k)
        f, _ = point2line_constants(ThetaP(th, p))
        rems.append(
            (N - k) * f + 2 * N * digamma(th)
            - M * M * N ** (1.0 / 3.0) * trigamma(th) ** 2 / tetragamma(th)
        )
    assert max(abs(r) for r in rems) < 10.0
    # no N^{1/3} growth: the largest-N remainders have settled
    assert abs(rems[-1] - rems[-2]) < 0.2


def test_thetap_validation():
    with pytest.raises(ValueError):
        ThetaP(-1.0, 1.0)
    with pytest.raises(ValueError):
        ThetaP(1.0, 0.9)
