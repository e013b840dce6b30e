"""The acceptance suite: every numerically checkable identity and scaling
claim at desk scale, each with its tolerance pinned.

Criteria are exposed as CRITERIA (id, description, callable); the callable
returns (passed, detail).  `hslg verify` and tests/test_acceptance.py both
consume this table, so the CLI and pytest always agree.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import ensemble as ens
from . import gibbs as gb
from . import polymer as pl
from . import walks as wk
from .dist import FTheta, QDistSpec, f_theta, invgamma, q_dist
from .harness.config import ExperimentConfig
from .harness import experiments as ex
from .specfun import (ThetaP, digamma, nu_constant, point2line_constants,
                      tetragamma, theta_c_solve, trigamma)

__all__ = ["CRITERIA", "run_criteria"]


def _rng(seed, tag):
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence((seed, 424242, tag))))


# ---------------------------------------------------------------------------
# 1. exact identities


def criterion_1(seed=1):
    details = []
    ok = True
    # Catalan path counts, exact integers
    catalan = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]
    for N in range(1, 11):
        got = pl.count_paths_unit(N, N)
        if got != catalan[N - 1]:
            ok = False
            details.append(f"catalan N={N}: {got} != {catalan[N-1]}")
    # DP vs enumeration on 100 random fields
    params = pl.PolymerParams(theta=1.0, alpha=0.5)
    worst = 0.0
    rng = _rng(seed, 1)
    for t in range(100):
        fld = pl.gen_weights(7, params, int(rng.integers(2**62)))
        for (m, n) in [(3, 2), (5, 5), (7, 3), (6, 6), (7, 7), (4, 4)]:
            a = pl.logZ_point(fld, m, n)
            b = pl.brute_force_logZ(fld, m, n)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    if worst > 1e-10:
        ok = False
    details.append(f"dp_vs_enum rel {worst:.2e} (tol 1e-10)")
    # 2 Z_sym^(1) = Z pathwise, all p+q <= 12, several disorders
    worst2 = 0.0
    for t in range(5):
        fld = pl.gen_weights(6, params, int(rng.integers(2**62)))
        sym = ens.symmetrize(fld)
        for m in range(1, 12):
            for n in range(1, min(m, 12 - m) + 1):
                d = abs(math.log(2.0) + ens.logZ_sym(sym, 1, m, n)
                        - pl.logZ_point(fld, m, n))
                worst2 = max(worst2, d)
    if worst2 > 1e-12:
        ok = False
    details.append(f"2Zsym1=Z {worst2:.2e} (tol 1e-12)")
    # top-curve identity pathwise at N=24
    N = 24
    fld = pl.gen_weights(N, params, int(rng.integers(2**62)))
    sym = ens.symmetrize(fld)
    le = ens.build_line_ensemble(sym, N, 1.0, depth=1)
    cent = 2.0 * N * digamma(1.0)
    worst3 = max(
        abs(le.value(1, 2 * j + 1) - (pl.logZ_point(fld, N + j, N - j) + cent))
        for j in range(N)
    )
    if worst3 > 1e-9:
        ok = False
    details.append(f"top_curve {worst3:.2e} (tol 1e-9)")
    # LGV (r=2, N<=5) vs disjoint-tuple enumeration on 50 disorders
    worst4 = 0.0
    for t in range(50):
        N = 4 if t % 2 else 5
        fld = pl.gen_weights(N, params, int(rng.integers(2**62)))
        sym = ens.symmetrize(fld)
        m, n = (5, 4) if N == 4 else (6, 4)
        lgv = ens.logZ_sym_lgv(sym, 2, m, n)
        enum = ens.logZ_sym_enum(sym, 2, m, n)
        pair = ens.logZ_sym(sym, 2, m, n)
        worst4 = max(worst4, abs(lgv - enum) / max(1.0, abs(enum)),
                     abs(pair - enum) / max(1.0, abs(enum)))
    if worst4 > 1e-9:
        ok = False
    details.append(f"lgv_r2_vs_enum rel {worst4:.2e} (tol 1e-9)")
    return ok, "; ".join(details)


# ---------------------------------------------------------------------------
# 2. density / oracle suite


def criterion_2(seed=1):
    details = []
    ok = True
    # normalizations to 1e-8
    ft = f_theta(FTheta(1.0))
    xs = np.linspace(-60.0, 60.0, 24001)
    mass = float(np.trapz(np.exp(ft.logpdf(xs)), xs))
    if abs(mass - 1.0) > 1e-8:
        ok = False
    details.append(f"f_theta mass {mass - 1.0:+.2e}")
    qd = q_dist(QDistSpec(1.0, 2.0, +1, 0.5, -0.7))
    qm = qd.normalization_check()
    if abs(qm - 1.0) > 1e-8:
        ok = False
    details.append(f"q mass {qm - 1.0:+.2e}")
    ig = invgamma(2.5)
    xg = np.linspace(1e-9, 400.0, 400001)
    im = float(np.trapz(np.exp(ig.logpdf(xg)), xg))
    if abs(im - 1.0) > 1e-7:  # heavy power tail: quadrature window limited
        ok = False
    details.append(f"invgamma mass {im - 1.0:+.2e}")
    # tail bounds on the symmetric increment density
    for th in (0.5, 1.0, 2.0):
        f2 = f_theta(FTheta(th))
        g = np.linspace(-20, 20, 201)
        val = math.gamma(th) ** 2 * f2.density_quad(g) * np.exp(th * np.abs(g))
        lo, hi = math.exp(-2 * math.e), math.gamma(2 * th)
        if not (np.all(val >= lo - 1e-12) and np.all(val <= hi + 1e-12)):
            ok = False
            details.append(f"tail bounds failed at theta={th}")
    details.append("tail bounds ok")
    # characteristic function bound
    t = np.linspace(0.0, 40.0, 401)
    psi = ft.cf(t)
    if abs(psi[0] - 1.0) > 1e-12 or np.any(psi > 1.0 / (1.0 + t**2) + 1e-12):
        ok = False
    details.append("cf bound ok")
    # local CLT sharp-rate check
    sig2 = 2.0 * trigamma(1.0)
    sups = []
    for n in (100, 1000, 10000):
        xgrid = np.linspace(-2, 2, 81)
        fn = ft.conv_density(n, xgrid * math.sqrt(n))
        phi = np.exp(-(xgrid**2) / (2 * sig2)) / math.sqrt(2 * math.pi * sig2)
        sups.append(float(np.max(np.abs(math.sqrt(n) * fn / phi - 1.0))))
    if not (sups[0] > sups[1] > sups[2] and sups[2] <= 0.02):
        ok = False
    details.append("local CLT sups " + ", ".join(f"{s:.2e}" for s in sups))
    return ok, "; ".join(details)


# ---------------------------------------------------------------------------
# 3. special functions


def criterion_3(seed=1):
    details = []
    ok = True
    worst = 0.0
    for z in np.arange(0.1, 10.0001, 0.1):
        worst = max(
            worst,
            abs(digamma(z + 1) - digamma(z) - 1.0 / z),
            abs(trigamma(z + 1) - trigamma(z) + 1.0 / z**2),
            abs(tetragamma(z + 1) - tetragamma(z) - 2.0 / z**3),
        )
    if worst > 1e-11:
        ok = False
    details.append(f"recurrences {worst:.2e} (tol 1e-11)")
    worst = 0.0
    for th in np.linspace(0.25, 4.0, 20):
        for p in np.linspace(1.0, 3.0, 20):
            tc = theta_c_solve(ThetaP(float(th), float(p)))
            worst = max(worst, abs(trigamma(tc) - p * trigamma(2 * th - tc)))
    if worst > 1e-11:
        ok = False
    details.append(f"theta_c residual {worst:.2e} (tol 1e-11)")
    # boundedness of the point-to-line expansion remainder
    theta, M = 1.0, 1.0
    rems = []
    for N in (10**3, 10**4, 10**5, 10**6):
        k = M * N ** (2.0 / 3.0)
        p = (N + k) / (N - k)
        f_c, sigma_c = point2line_constants(ThetaP(theta, p))
        rem = ((N - k) * f_c + 2 * N * digamma(theta)
               - M * M * N ** (1.0 / 3.0) * trigamma(theta) ** 2 / tetragamma(theta))
        rems.append(rem)
    spread = max(abs(r) for r in rems)
    if spread > 10.0:  # O(1) remainder: bounded, no N^{1/3} growth
        ok = False
    details.append("calcc remainders " + ", ".join(f"{r:.3f}" for r in rems))
    sp = point2line_constants(ThetaP(theta, 1.0 + 1e-6))[1]
    if abs(sp / (-tetragamma(theta)) ** (1 / 3) - 1.0) > 1e-5:
        ok = False
    details.append("sigma ratio at p->1 ok")
    return ok, "; ".join(details)


# ---------------------------------------------------------------------------
# 4. Gibbs correctness


def criterion_4(seed=1, samples=100_000):
    cfg = ExperimentConfig("gibbs_consistency", {
        "n_values": "3,4", "samples": str(samples), "sweeps": "8",
        "seed": str(seed),
    })
    res = ex.run_gibbs_consistency(cfg)
    mx = max(res.summary.values())
    ok = mx <= 0.02
    cfg2 = ExperimentConfig("gibbs_consistency", {
        "n_values": "3", "samples": str(max(20_000, samples // 5)),
        "sweeps": "8", "alpha_perturb": "0.75", "seed": str(seed),
    })
    res2 = ex.run_gibbs_consistency(cfg2)
    mx2 = max(res2.summary.values())
    ok = ok and (mx2 > 0.05)
    return ok, f"max KS {mx:.4f} (tol 0.02); negative control {mx2:.4f} (> 0.05)"


# ---------------------------------------------------------------------------
# 5. monotone coupling


def criterion_5(seed=1, sweeps=10_000):
    rng = _rng(seed, 5)
    k, T = 2, 4
    y_lo = np.array([0.0, -0.5])
    z_lo = np.array([-1.0, -0.8, -1.2, -0.9])
    specs = []
    for shift in (0.0, 0.7):
        dom = gb.domain_kkt(k, T, y=y_lo + shift, z=z_lo + shift,
                            alpha=1.0, theta=1.0)
        specs.append(gb.GibbsSpec(dom))
    chains = gb.MonotoneCoupledChains(specs)
    keep_lo = []
    keep_hi = []
    n_int = len(specs[0].domain.compiled().order)
    for s in range(sweeps):
        chains.sweep(rng)
        if s >= 200:
            keep_lo.append(chains.states[0].values[:n_int].copy())
            keep_hi.append(chains.states[1].values[:n_int].copy())
    ok = chains.max_violation <= 1e-12
    detail = f"max order violation {chains.max_violation:.2e} over {sweeps} sweeps"
    # stochastic dominance of marginals within 2x the MC band
    lo = np.array(keep_lo)
    hi = np.array(keep_hi)
    m = lo.shape[0]
    band = 2.0 * 1.36 * math.sqrt(2.0 / m) * 6.0  # generous: sweeps correlate
    worst = 0.0
    for site in range(n_int):
        qs = np.quantile(lo[:, site], [0.1, 0.3, 0.5, 0.7, 0.9])
        flo = np.searchsorted(np.sort(lo[:, site]), qs, side="right") / m
        fhi = np.searchsorted(np.sort(hi[:, site]), qs, side="right") / m
        worst = max(worst, float(np.max(fhi - flo)))  # F_hi <= F_lo expected
    ok = ok and worst <= band
    detail += f"; dominance excess {worst:.3f} (band {band:.3f})"
    return ok, detail


# ---------------------------------------------------------------------------
# 6. WPRW cross-validation


def criterion_6(seed=1):
    theta, zeta = 1.0, 1.0
    n = 64
    x, y = 0.0, -8.0
    rng = _rng(seed, 6)
    # importance-sampling estimate of E[S1(1)] under WPRW
    est, se_is, ess = wk.wprw_estimate(
        n, x, y, lambda s1, s2: s1[0], 600_000, zeta, theta, rng,
        method="reversed")
    # heat-bath estimate on the bottom-free domain K_{2,n}
    T = n
    dom = gb.domain_kkt(2, T, y=[x, y], z=[-math.inf] * T, alpha=zeta,
                        theta=theta)
    spec = gb.GibbsSpec(dom)
    comp = dom.compiled()
    idx = comp.index[(1, 1)]
    n_chains, per_chain, burn, thin = 24, 700, 1500, 8
    means = []
    for c in range(n_chains):
        crng = _rng(seed, 600 + c)
        st = spec.new_state()
        st.values[: len(comp.order)] = np.linspace(x, y, len(comp.order))
        gb.heat_bath_sweep(spec, st, crng, n_sweeps=burn)
        vals = np.empty(per_chain)
        for i in range(per_chain):
            gb.heat_bath_sweep(spec, st, crng, n_sweeps=thin)
            vals[i] = st.values[idx]
        means.append(float(vals.mean()))
    hb = float(np.mean(means))
    se_hb = float(np.std(means, ddof=1) / math.sqrt(n_chains))
    comb = math.hypot(se_is, se_hb)
    diff = est - hb
    ok = abs(diff) <= 3.0 * comb
    detail = (f"E[S1(1)]: IS {est:.3f}+-{se_is:.3f} (ESS {ess:.0f}) vs "
              f"heat-bath {hb:.3f}+-{se_hb:.3f}; diff {diff:+.3f} "
              f"(3*comb {3*comb:.3f})")
    # entrance law KS against the 2D quadrature of the marginal
    u, _ = wk.prw_entrance_batch(n, x, y, zeta, theta, rng, size=30_000)
    ct = wk.ConvTable(theta)
    ug = np.linspace(-70, 70, 1601)
    vg = np.linspace(-78, 62, 1601)
    lu = ct.logpdf(n - 1, x - ug)
    lv = ct.logpdf(n - 1, y - vg)
    gz = zeta * (vg[None, :] - ug[:, None]) - np.exp(
        np.minimum(vg[None, :] - ug[:, None], 60.0))
    m2 = lu[:, None] + lv[None, :] + gz
    m2 -= m2.max()
    dens_u = np.exp(m2).sum(axis=1)
    cdf_u = np.cumsum(dens_u)
    cdf_u /= cdf_u[-1]
    emp = np.sort(u)
    ks = float(np.max(np.abs(
        np.searchsorted(emp, ug, side="right") / emp.size - cdf_u)))
    ok = ok and ks <= 0.02
    detail += f"; entrance KS {ks:.4f} (tol 0.02)"
    return ok, detail


# ---------------------------------------------------------------------------
# 7. scaling slopes (walks)


def criterion_7(seed=1, ni_replicas=100_000, wsc_replicas=1_600_000):
    rng = _rng(seed, 7)
    rec = wk.ni_scaling_campaign(1.0, 0.0, [64, 128, 256, 512, 1024, 2048, 4096],
                                 ni_replicas, 1.0, rng)
    ok = -0.55 <= rec.slope <= -0.45
    detail = f"NI slope {rec.slope:.3f} (window [-0.55,-0.45])"
    rec2 = wk.wsc_denominator_campaign(
        [64, 128, 256, 512, 1024, 2048, 4096], wsc_replicas, 1.0, 1.0, rng)
    ok2 = -0.6 <= rec2.slope <= -0.4 and min(rec2.extras["ess"]) >= 50
    detail += (f"; E[W^sc] slope {rec2.slope:.3f} (window [-0.6,-0.4]), "
               f"min ESS {min(rec2.extras['ess']):.0f}")
    return ok and ok2, detail


# ---------------------------------------------------------------------------
# 8-10, 12: polymer campaigns


def criterion_8(seed=1, replicas=2000):
    cfg = ExperimentConfig("fluctuation_exponent", {
        "replicas": str(replicas), "seed": str(seed),
    })
    res = ex.run_fluctuation_exponent(cfg)
    s = res.summary["slope"]
    ok = 0.28 <= s <= 0.39
    return ok, f"slope {s:.4f} (window [0.28, 0.39])"


def criterion_9(seed=1, replicas=2000):
    cfg = ExperimentConfig("transversal_scaling", {
        "replicas": str(replicas), "seed": str(seed),
    })
    res = ex.run_transversal_scaling(cfg)
    ratio = res.summary["collapse_256_1024"]
    ok = 2.0 / 3.0 <= ratio <= 1.5
    return ok, f"Var(F(1)-F(0)) ratio 1024/256 = {ratio:.3f} (window [0.667, 1.5])"


def criterion_10(seed=1, replicas=2000):
    cfg = ExperimentConfig("parabola", {
        "replicas": str(replicas), "seed": str(seed),
    })
    res = ex.run_parabola(cfg)
    width = res.summary["median_band_width"]
    ok = width <= 4.0 and res.summary["monotonicity_violations"] == 0
    return ok, (f"median band width {width:.3f} (tol 4.0), "
                f"monotonicity violations {res.summary['monotonicity_violations']}")


def criterion_11(seed=1, ordering_samples=1000, endpoint_samples=300):
    cfg = ExperimentConfig("ordering", {
        "replicas": str(ordering_samples), "seed": str(seed),
    })
    res = ex.run_ordering(cfg)
    fmax = res.summary["max_frequency"]
    ok = fmax <= 1e-2
    detail = f"ordering max violation freq {fmax:.2e} (tol 1e-2)"
    cfg2 = ExperimentConfig("endpoint_tightness", {
        "replicas": str(endpoint_samples), "seed": str(seed),
    })
    res2 = ex.run_endpoint_tightness(cfg2)
    worst = 1.0
    for key, v in res2.summary.items():
        r = max(v, 1.0 / v)
        worst = max(worst, r)
    ok = ok and worst <= 1.5
    detail += f"; endpoint IQR worst ratio {worst:.3f} (tol 1.5)"
    return ok, detail


def criterion_12(seed=1, replicas=2000):
    cfg = ExperimentConfig("point2line_clt", {
        "replicas": str(replicas), "seed": str(seed),
    })
    res = ex.run_point2line_clt(cfg)
    me = res.summary["mean_error"]
    ve = res.summary["variance_error"]
    ok = abs(me) <= 0.3 and abs(ve) <= 0.25
    return ok, f"mean error {me:+.3f} (tol 0.3); variance error {ve:+.3f} (tol 0.25)"


CRITERIA = [
    (1, "exact identities (Catalan, DP vs enumeration, 2Zsym=Z, top curve, LGV)",
     criterion_1),
    (2, "density and oracle suite (normalizations, tail bounds, cf, local CLT)",
     criterion_2),
    (3, "special functions (recurrences, theta_c residuals, expansion remainder)",
     criterion_3),
    (4, "Gibbs consistency at N=3,4 with negative control", criterion_4),
    (5, "monotone coupling order preservation and stochastic dominance",
     criterion_5),
    (6, "WPRW cross-validation (IS vs heat bath; entrance law)", criterion_6),
    (7, "NI probability and E[W^sc] scaling slopes", criterion_7),
    (8, "KPZ fluctuation exponent slope", criterion_8),
    (9, "transversal scale collapse", criterion_9),
    (10, "parabolic decay of the point-to-line process", criterion_10),
    (11, "ordering violations and endpoint tightness", criterion_11),
    (12, "point-to-line standardized statistic vs TW-GUE", criterion_12),
]


def run_criteria(selected=None, seed: int = 1) -> bool:
    if isinstance(selected, str):
        selected = [int(s) for s in selected.split(",") if s.strip()]
    wanted = set(selected) if selected else None
    all_ok = True
    for cid, desc, fn in CRITERIA:
        if wanted is not None and cid not in wanted:
            continue
        t0 = time.time()
        try:
            ok, detail = fn(seed=seed)
        except Exception as exc:  # surfaced, not swallowed
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        dt = time.time() - t0
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] criterion {cid:2d} ({dt:7.1f}s): {desc}")
        print(f"        {detail}")
        all_ok = all_ok and ok
    return all_ok
