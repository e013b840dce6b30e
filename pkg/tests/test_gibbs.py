import math

import numpy as np
import pytest

from hslg.dist import QDistSpec, q_dist
from hslg.gibbs import (ColoredDomain, CouplingOrderError, GibbsSpec,
                        MonotoneCoupledChains, bottom_free_sample, domain_kkt,
                        domain_kkt_prime, domain_lambda_star, heat_bath_sweep,
                        log_density, site_conditional, two_sided_conditional_sample,
                        v_normalizer_estimate)
from hslg.specfun import digamma


def _ks_two_sample(a, b):
    a = np.sort(np.asarray(a))
    b = np.sort(np.asarray(b))
    allv = np.concatenate([a, b])
    return float(np.max(np.abs(
        np.searchsorted(a, allv, side="right") / a.size
        - np.searchsorted(b, allv, side="right") / b.size)))


def explicit_kkt_logdensity(k, T, y, z, alpha, theta, u):
    """The closed-form K_{k,T} density, written independently of the module.

    u maps (i, j) -> value on the domain; boundary conventions: u_{k+1,2j} =
    z_j, u_{1,2T-1} = y_1, u_{i,2T} = y_i, u_{i,2T+1} = +inf.
    """
    def uu(i, j):
        if (i, j) in u:
            return u[(i, j)]
        if i == k + 1 and j % 2 == 0 and 1 <= j // 2 <= T:
            return z[j // 2 - 1]
        if i == 1 and j == 2 * T - 1:
            return y[0]
        if 2 <= i <= k and j == 2 * T:
            return y[i - 1]
        if j == 2 * T + 1:
            return math.inf
        raise KeyError((i, j))

    def logW(a, b2, c):
        out = 0.0
        for t in (b2, c):
            if a != -math.inf and t != math.inf:
                out -= math.exp(a - t)
        return out

    def logG(th, sgn, yv):
        return th * sgn * yv - math.exp(sgn * yv) - math.lgamma(th)

    total = 0.0
    for i in range(1, k + 1):
        total += (alpha if i % 2 == 0 else -alpha) * uu(i, 1)
        for j in range(1, T - (1 if i == 1 else 0) + 1):
            total += logW(uu(i + 1, 2 * j), uu(i, 2 * j + 1), uu(i, 2 * j - 1))
        for j in range(1, 2 * T - 1 - (1 if i == 1 else 0) + 1):
            sgn = 1 if j % 2 == 1 else -1
            total += logG(theta, sgn, uu(i, j) - uu(i, j + 1))
    return total


def test_log_density_matches_explicit_formula():
    # differences of log-densities across random states must agree exactly
    k, T, alpha, theta = 2, 3, 0.8, 1.1
    y = [0.4, -0.2]
    z = [0.1, -0.5, 0.9]
    dom = domain_kkt(k, T, y, z, alpha, theta)
    spec = GibbsSpec(dom)
    rng = np.random.default_rng(0)
    verts = sorted(dom.vertices)
    ref = None
    for _ in range(6):
        vals = rng.normal(size=len(verts))
        u = dict(zip(verts, vals))
        st = spec.new_state(vals)
        got = log_density(spec, st)
        want = explicit_kkt_logdensity(k, T, y, z, alpha, theta, u)
        if ref is None:
            ref = got - want
        else:
            assert got - want == pytest.approx(ref, abs=1e-10)


def test_translation_invariance():
    c = 0.83
    y = np.array([1.0, 0.5])
    z = np.array([0.0, -0.5, 0.2])
    d1 = domain_kkt(2, 3, y, z, alpha=1.0, theta=1.0)
    d2 = domain_kkt(2, 3, y + c, z + c, alpha=1.0, theta=1.0)
    s1, s2 = GibbsSpec(d1), GibbsSpec(d2)
    rng = np.random.default_rng(1)
    for _ in range(4):
        vals = rng.normal(size=len(d1.vertices))
        assert log_density(s2, s2.new_state(vals + c)) == pytest.approx(
            log_density(s1, s1.new_state(vals)), abs=1e-9)


def test_restriction_identity():
    # conditional log-density of a subdomain depends only on its boundary:
    # perturbing sites outside Lambda' and its boundary cancels in the
    # difference of log-densities across Lambda'-states
    dom = domain_kkt(2, 4, [0.2, -0.1], [0.0, 0.1, -0.3, 0.2], 0.7, 1.0)
    spec = GibbsSpec(dom)
    comp = dom.compiled()
    verts = sorted(dom.vertices)
    rng = np.random.default_rng(3)
    base = rng.normal(size=len(verts))
    sub = [(1, 1), (1, 2), (2, 1), (2, 2)]  # Lambda'
    sub_boundary = {(1, 3), (2, 3), (2, 4), (3, 2)}  # graph boundary within domain
    far = [v for v in verts if v not in sub and v not in sub_boundary]
    va = base.copy()
    vb = base.copy()
    for v in sub:
        vb[verts.index(v)] += rng.normal()
    d_ref = (log_density(spec, spec.new_state(vb))
             - log_density(spec, spec.new_state(va)))
    # perturb the far field; the conditional difference must not move
    va2, vb2 = va.copy(), vb.copy()
    for v in far:
        shift = rng.normal()
        va2[verts.index(v)] += shift
        vb2[verts.index(v)] += shift
    d_new = (log_density(spec, spec.new_state(vb2))
             - log_density(spec, spec.new_state(va2)))
    assert d_new == pytest.approx(d_ref, abs=1e-9)


def test_triple_weight_and_black_edge_values():
    from hslg.gibbs import _triple_w

    assert _triple_w(0.0, 0.0, 0.0) == pytest.approx(-2.0)
    assert _triple_w(0.0, math.inf, 0.0) == pytest.approx(-1.0)
    assert _triple_w(-math.inf, 0.0, 0.0) == 0.0


def test_site_conditional_is_qdist():
    dom = domain_kkt(1, 2, y=[0.7], z=[0.1, -0.3], alpha=0.6, theta=1.0)
    spec = GibbsSpec(dom)
    st = spec.new_state(np.array([0.3, -0.2]))
    sc = site_conditional(spec, st, (1, 2))
    qd = q_dist(QDistSpec(1.0, 1.0, +1, 0.3, 0.7))
    xs = np.linspace(-4, 3, 9)
    assert np.max(np.abs(sc.logpdf(xs) - qd.logpdf(xs))) < 1e-6


def test_site_conditional_normalization_and_monotone_cdf():
    dom = domain_kkt(2, 3, [0.4, -0.2], [0.1, -0.5, 0.9], 0.8, 1.1)
    spec = GibbsSpec(dom)
    rng = np.random.default_rng(5)
    vals = rng.normal(size=len(dom.vertices))
    st = spec.new_state(vals)
    sc = site_conditional(spec, st, (1, 3))
    g = np.linspace(-25, 15, 100001)
    mass = np.trapz(np.exp(sc.logpdf(g)), g)
    assert mass == pytest.approx(1.0, abs=1e-8)
    # raising any neighbor lowers the conditional CDF pointwise
    comp = spec.domain.compiled()
    xs = np.linspace(-3, 3, 7)
    base_cdf = sc.cdf(xs)
    for nb in [(1, 2), (1, 4), (2, 2), (2, 4)]:
        vals2 = vals.copy()
        vals2[sorted(dom.vertices).index(nb)] += 0.9
        sc2 = site_conditional(spec, spec.new_state(vals2), (1, 3))
        assert np.all(sc2.cdf(xs) <= base_cdf + 1e-9)


def test_conditional_matches_joint_ratio():
    dom = domain_kkt(1, 2, y=[0.7], z=[0.1, -0.3], alpha=0.6, theta=1.0)
    spec = GibbsSpec(dom)
    st_a = spec.new_state(np.array([0.3, -0.2]))
    st_b = spec.new_state(np.array([0.9, -0.2]))
    sc = site_conditional(spec, st_a, (1, 1))
    assert (sc.logpdf(0.9) - sc.logpdf(0.3)) == pytest.approx(
        log_density(spec, st_b) - log_density(spec, st_a), abs=1e-10)


def test_one_site_heat_bath_is_exact():
    dom = ColoredDomain(
        vertices=[(1, 3)],
        boundary={(1, 2): 0.2, (1, 4): -0.4, (2, 2): -0.6, (2, 4): 0.1},
        theta=1.0, alpha=0.5,
    )
    spec = GibbsSpec(dom)
    rng = np.random.default_rng(7)
    m = 10**5
    draws = np.empty(m)
    st = spec.new_state()
    for i in range(m):
        heat_bath_sweep(spec, st, rng)
        draws[i] = st.values[0]
    sc = site_conditional(spec, spec.new_state(), (1, 3))
    grid = np.sort(draws)
    ks = float(np.max(np.abs(np.arange(1, m + 1) / m - sc.cdf(grid))))
    assert ks <= 4.0 / math.sqrt(m)


def test_heat_bath_vs_exact_bottom_free_k1():
    # K_{1,2} bottom-free: heat bath marginals against the exact sampler
    theta, alpha, T = 1.0, 0.4, 2
    y = [0.6]
    dom = domain_kkt(1, T, y=y, z=[-math.inf] * T, alpha=alpha, theta=theta)
    spec = GibbsSpec(dom)
    rng = np.random.default_rng(11)
    m = 30_000
    hb = np.empty((m, 2))
    st = spec.new_state()
    heat_bath_sweep(spec, st, rng, n_sweeps=50)
    for i in range(m):
        heat_bath_sweep(spec, st, rng, n_sweeps=4)
        hb[i] = st.values[:2]
    ex = np.empty((m, 2))
    for i in range(m):
        smp = bottom_free_sample(1, T, y, alpha, theta, rng)
        ex[i] = [smp.curves[(1, 1)], smp.curves[(1, 2)]]
    assert _ks_two_sample(hb[:, 0], ex[:, 0]) <= 0.02
    assert _ks_two_sample(hb[:, 1], ex[:, 1]) <= 0.02


def test_bottom_free_k1_pin_and_mean_increment():
    theta, alpha, T = 1.0, 0.3, 8
    rng = np.random.default_rng(13)
    m = 20_000
    incs = np.empty(m)
    for i in range(m):
        smp = bottom_free_sample(1, T, [1.5], alpha, theta, rng)
        # rightward odd increment
        incs[i] = smp.curves[(1, 5)] - smp.curves[(1, 3)]
    se = incs.std() / math.sqrt(m)
    assert abs(incs.mean() - (digamma(theta + alpha) - digamma(theta - alpha))) \
        <= 3 * se


def _weighted_cdf(x, lw, grid):
    w = np.exp(lw - lw.max())
    w /= w.sum()
    order = np.argsort(x)
    return np.interp(grid, x[order], np.cumsum(w[order]))


def test_bottom_free_k2_routes_agree():
    # critical and supercritical representations of the same measure; the
    # critical route is only efficient for small alpha, so test there
    theta, alpha, T = 1.0, 0.05, 6
    rng = np.random.default_rng(17)
    m = 40_000
    xs = np.empty(m)
    ws = np.empty(m)
    for i in range(m):
        smp = bottom_free_sample(2, T, [1.0, -1.0], alpha, theta, rng,
                                 method="critical")
        xs[i] = smp.curves[(2, 2)]
        ws[i] = smp.log_weight
    ess_c = 1.0 / np.sum((np.exp(ws - ws.max()) / np.exp(ws - ws.max()).sum()) ** 2)
    # supercritical route on the skeleton only: L_2(2) = S2(1), importance
    # weights g * W^sc over pinned free pairs
    from hslg.walks import _g_log, reversed_pair_batch, wsc_weight_batch

    s1, s2 = reversed_pair_batch(T, 1.0, -1.0, theta, rng, 400_000)
    lw2 = _g_log(alpha, s2[:, 0] - s1[:, 0]) + wsc_weight_batch(s1, s2)
    grid = np.linspace(-6, 4, 26)
    d = np.max(np.abs(_weighted_cdf(xs, ws, grid)
                      - _weighted_cdf(s2[:, 0], lw2, grid)))
    assert ess_c > 2000
    assert d <= 0.03


@pytest.mark.slow
def test_bottom_free_k2_supercritical_vs_heat_bath():
    # the cross-sampler check at T=8, alpha=1: WPRW route vs heat bath
    theta, alpha, T = 1.0, 1.0, 8
    y = [0.0, -2.0]
    rng = np.random.default_rng(19)
    from hslg.walks import _g_log, reversed_pair_batch, wsc_weight_batch

    s1, s2 = reversed_pair_batch(T, y[0], y[1], theta, rng, 2_000_000)
    lw = _g_log(alpha, s2[:, 0] - s1[:, 0]) + wsc_weight_batch(s1, s2)
    w = np.exp(lw - lw.max())
    w /= w.sum()
    ess = 1.0 / np.sum(w**2)
    assert ess >= 1e5
    dom = domain_kkt(2, T, y=y, z=[-math.inf] * T, alpha=alpha, theta=theta)
    spec = GibbsSpec(dom)
    comp = dom.compiled()
    idx = sorted(dom.vertices).index((2, 2))
    st = spec.new_state(np.linspace(y[0], y[1], len(dom.vertices)))
    heat_bath_sweep(spec, st, rng, n_sweeps=3000)
    m = 120_000
    hb = np.empty(m)
    for i in range(m):
        heat_bath_sweep(spec, st, rng, n_sweeps=2)
        hb[i] = st.values[idx]
    grid = np.quantile(hb, np.linspace(0.03, 0.97, 25))
    d = np.max(np.abs(_weighted_cdf(s2[:, 0], lw, grid)
                      - np.searchsorted(np.sort(hb), grid) / m))
    assert d <= 0.03


def test_monotone_coupling_identical_and_shifted():
    y = np.array([0.3, -0.4])
    z = np.array([-0.2, 0.1, -0.6, 0.4])
    rng = np.random.default_rng(23)
    specs = [GibbsSpec(domain_kkt(2, 4, y, z, 1.0, 1.0)),
             GibbsSpec(domain_kkt(2, 4, y, z, 1.0, 1.0))]
    ch = MonotoneCoupledChains(specs)
    ch.states[1].values[:] = ch.states[0].values
    for _ in range(20):
        ch.sweep(rng)
    n = len(specs[0].domain.compiled().order)
    assert np.array_equal(ch.states[0].values[:n], ch.states[1].values[:n])
    # constant-shift boundaries: chains differ by exactly c at every site
    c = 0.9
    specs2 = [GibbsSpec(domain_kkt(2, 4, y, z, 1.0, 1.0)),
              GibbsSpec(domain_kkt(2, 4, y + c, z + c, 1.0, 1.0))]
    ch2 = MonotoneCoupledChains(specs2)
    for _ in range(30):
        ch2.sweep(rng)
    gap = ch2.states[1].values[:n] - ch2.states[0].values[:n]
    assert np.max(np.abs(gap - c)) < 1e-9


def test_monotone_coupling_rejects_unordered_boundaries():
    y = np.array([0.3, -0.4])
    z = np.array([-0.2, 0.1, -0.6, 0.4])
    s1 = GibbsSpec(domain_kkt(2, 4, y, z, 1.0, 1.0))
    s2 = GibbsSpec(domain_kkt(2, 4, y - 1.0, z + 1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        MonotoneCoupledChains([s1, s2])


def test_v_normalizer_trivial_and_monotone():
    theta, alpha, T = 1.0, 0.3, 4
    rng = np.random.default_rng(29)
    est, se = v_normalizer_estimate([0.5], [-math.inf] * T, 1, T, 400,
                                    alpha, theta, rng)
    assert est == pytest.approx(1.0, abs=1e-14)
    est_hi, _ = v_normalizer_estimate([0.5], [1e3] * T, 1, T, 400, alpha,
                                      theta, rng)
    assert est_hi < 1e-6
    # raising one z coordinate cannot increase the normalizer (within error)
    rng1 = np.random.default_rng(31)
    rng2 = np.random.default_rng(31)
    lo, se_lo = v_normalizer_estimate([0.5], [-1.0] * T, 1, T, 4000, alpha,
                                      theta, rng1)
    hi, se_hi = v_normalizer_estimate([0.5], [-1.0, 0.5, -1.0, -1.0], 1, T,
                                      4000, alpha, theta, rng2)
    assert hi <= lo + 1e-12  # same stream: pathwise monotone


def test_two_sided_conditional():
    theta = 1.0
    rng = np.random.default_rng(37)
    T1, T2 = 1, 7
    paths, lw = two_sided_conditional_sample([-math.inf] * (T2 - T1), 0.0, 1.0,
                                             T1, T2, theta, rng, n_samples=200)
    assert np.allclose(lw, 0.0)
    assert np.allclose(paths[:, 0], 0.0)
    assert np.allclose(paths[:, -1], 1.0)
    # flat symmetric case: weighted mean path is flat within error
    z = np.full(T2 - T1, -3.0)
    paths, lw = two_sided_conditional_sample(z, 0.0, 0.0, T1, T2, theta, rng,
                                             n_samples=20_000)
    w = np.exp(lw - lw.max())
    w /= w.sum()
    mean_mid = float(np.sum(w * paths[:, 3]))
    se = math.sqrt(float(np.sum(w**2 * (paths[:, 3] - mean_mid) ** 2)))
    assert abs(mean_mid) <= 4 * se + 0.05


def test_two_sided_matches_heat_bath():
    # conditional law of the odd points between two pins, given the z row
    theta = 1.0
    T1, T2 = 1, 7
    a, b = 0.3, -0.5
    z = np.array([-1.0, -0.4, -1.5, 0.2, -0.7, -1.1])
    rng = np.random.default_rng(41)
    m = 30_000
    paths, lw = two_sided_conditional_sample(z, a, b, T1, T2, theta, rng,
                                             n_samples=m)
    # heat-bath twin: curve-1 vertices strictly between the pins
    verts = [(1, j) for j in range(2 * T1, 2 * T2 - 2)]
    boundary = {(1, 2 * T1 - 1): a, (1, 2 * T2 - 1): b}
    for j in range(T1, T2):
        boundary[(2, 2 * j)] = float(z[j - T1])
    dom = ColoredDomain(vertices=verts, boundary=boundary, theta=theta,
                        alpha=0.0)
    spec = GibbsSpec(dom)
    st = spec.new_state()
    heat_bath_sweep(spec, st, rng, n_sweeps=100)
    hb = np.empty((m // 3, 3))
    comp = dom.compiled()
    cols = [sorted(dom.vertices).index((1, 2 * j + 1)) for j in (1, 3, 5)]
    for i in range(m // 3):
        heat_bath_sweep(spec, st, rng, n_sweeps=3)
        hb[i] = st.values[cols]
    w = np.exp(lw - lw.max())
    w /= w.sum()
    for pick, col in ((1, 0), (3, 1), (5, 2)):
        xs = paths[:, pick - (T1 - 1)]
        order = np.argsort(xs)
        grid = np.linspace(np.quantile(hb[:, col], 0.02),
                           np.quantile(hb[:, col], 0.98), 21)
        wc = np.interp(grid, xs[order], np.cumsum(w[order]))
        hc = np.searchsorted(np.sort(hb[:, col]), grid) / hb.shape[0]
        assert np.max(np.abs(wc - hc)) <= 0.03


def test_lambda_star_boundary_shape():
    N = 3
    vals = {(i, j): float(i * 10 + j)
            for i in range(1, N + 1)
            for j in range(1, 2 * N - 2 * i + 2 + 1)}
    dom = domain_lambda_star(N, vals, alpha=1.0, theta=1.0)
    assert (1, 6) in dom.boundary and dom.boundary[(1, 6)] == 16.0
    assert (2, 4) in dom.boundary and (3, 2) in dom.boundary
    # phantom vertices outside K_N enter at -inf
    assert dom.boundary.get((2, 6)) == -math.inf
    assert (3, 1) not in dom.boundary  # N odd: no red partner in the boundary


def test_kkt_prime_domain():
    dom = domain_kkt_prime(2, 3, y=[0.1, -0.2], w=[0.3, 0.4], alpha=0.5,
                           theta=1.0)
    assert (1, 5) in dom.boundary and (2, 5) in dom.boundary
    assert (3, 2) in dom.boundary and (3, 4) in dom.boundary
    assert len(dom.vertices) == 2 * (2 * 3 - 2)
