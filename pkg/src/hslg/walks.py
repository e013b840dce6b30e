"""Random walks, bridges, paired walks, and their conditioned statistics.

Increments are the symmetric log-gamma differences f_theta; bridges are
sampled exactly (up to quadrature) by sequential conditioning through the
n-fold convolution oracle, so there is no mixing question anywhere in this
module.  The weighted paired random walk is always handled by importance
sampling: expectations are self-normalized and effective sample sizes are
reported rather than hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .dist import FTheta, FThetaDist, f_theta

__all__ = [
    "EstimationError",
    "BridgeSpec",
    "WprwSample",
    "ConvTable",
    "walk_sample",
    "bridge_sample",
    "bridge_sample_batch",
    "modified_bridge_sample",
    "prw_sample",
    "prw_entrance_batch",
    "reversed_pair_batch",
    "wsc_weight",
    "wsc_weight_batch",
    "wprw_estimate",
    "ni_indicator",
    "gap_indicator",
    "gap_lower_bound_constant",
    "ni_scaling_campaign",
    "ni_bridge_frequency",
    "conditioned_diagnostics",
    "wsc_denominator_campaign",
    "modulus_of_continuity",
]


class EstimationError(ArithmeticError):
    """An importance-sampling or rejection estimate fell below its budget."""


@dataclass(frozen=True)
class BridgeSpec:
    """An n-step walk or bridge of f_theta increments.

    ``end=None`` is a free walk; ``variant='modified'`` with (p, q) replaces
    the first p and last q steps by free walks joined by a bridge.
    """

    n: int
    start: float
    theta: float
    end: float | None = None
    variant: str = "bridge"
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.variant == "modified":
            if not (self.p >= 1 and self.p + self.q <= self.n):
                raise ValueError("modified bridge needs p >= 1, p + q <= n")


@dataclass
class WprwSample:
    """A paired-walk draw: two pinned paths and the soft-NI log-weight."""

    s1: np.ndarray
    s2: np.ndarray
    x: float
    y: float
    log_wsc: float = dc_field(init=False)

    def __post_init__(self):
        if abs(self.s1[-1] - self.x) > 1e-9 or abs(self.s2[-1] - self.y) > 1e-9:
            raise ValueError("paths must be pinned at (x, y)")
        self.log_wsc = wsc_weight(self.s1, self.s2)


# ---------------------------------------------------------------------------
# convolution tables (cached Fourier oracle grids)


class ConvTable:
    """Cached log f^{*m} on grids, for bridge conditioning and entrance laws."""

    _cache: dict = {}

    def __new__(cls, theta: float):
        key = float(theta)
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj.theta = key
            obj.ft = f_theta(FTheta(key))
            obj._tables = {}
            cls._cache[key] = obj
        return cls._cache[key]

    def table(self, m: int):
        """(grid, log_density) for f^{*m} on |z| <= 25 sqrt(m) (+ margin)."""
        if m not in self._tables:
            if m == 1:
                self._tables[m] = None  # closed form used directly
            else:
                sig = math.sqrt(self.ft.variance())
                half = 25.0 * math.sqrt(m) * max(sig, 1.0) + 20.0
                npts = max(1024, int(half / (0.01 * sig * math.sqrt(m))) | 1)
                grid = np.linspace(-half, half, npts)
                dens = self.ft.conv_density(m, grid)
                with np.errstate(divide="ignore"):
                    logd = np.log(np.maximum(dens, 0.0))
                self._tables[m] = (grid, logd)
        return self._tables[m]

    def logpdf(self, m: int, z):
        """Interpolated log f^{*m}(z); -inf outside the tabulated window."""
        z = np.asarray(z, dtype=float)
        if m == 1:
            return self.ft.logpdf(z)
        grid, logd = self.table(m)
        out = np.interp(z, grid, logd, left=-np.inf, right=-np.inf)
        return out


# ---------------------------------------------------------------------------
# walks and bridges


def walk_sample(spec: BridgeSpec, rng) -> np.ndarray:
    """Free walk: S(1) = start, i.i.d. f_theta increments."""
    ft = f_theta(FTheta(spec.theta))
    incs = ft.sample(rng, size=spec.n - 1)
    return spec.start + np.concatenate([[0.0], np.cumsum(incs)])


def bridge_sample_batch(n: int, a, b, theta: float, rng, size: int,
                        grid_points: int = 512) -> np.ndarray:
    """``size`` bridges S(1)=a to S(n)=b, sampled by sequential conditioning.

    Step k draws from density(z) propto f(z - S(k-1)) * f^{*(n-k)}(b - z);
    the first factor confines z to a window of width ~100/theta around
    S(k-1), on which the product is tabulated and inverted per sample.
    ``a``/``b`` may be scalars or length-``size`` arrays.
    """
    ct = ConvTable(theta)
    ft = ct.ft
    a = np.broadcast_to(np.asarray(a, dtype=float), (size,)).copy()
    b = np.broadcast_to(np.asarray(b, dtype=float), (size,))
    out = np.empty((size, n))
    out[:, 0] = a
    half = 50.0 / theta + 10.0
    rel = np.linspace(-half, half, grid_points)
    logf_rel = ft.logpdf(rel)  # shared first factor on the relative grid
    h = rel[1] - rel[0]
    rows = np.arange(size)
    for k in range(2, n):
        m = n - k
        grids = out[:, k - 2][:, None] + rel[None, :]
        lp = logf_rel[None, :] + ct.logpdf(m, b[:, None] - grids)
        mx = lp.max(axis=1, keepdims=True)
        w = np.exp(lp - mx)
        # trapezoid cell masses and linear-density within-cell inversion
        mass = 0.5 * (w[:, :-1] + w[:, 1:])  # * h, common factor cancels
        cdf = np.cumsum(mass, axis=1)
        u = rng.uniform(size=size) * cdf[:, -1]
        idx = (cdf < u[:, None]).sum(axis=1)  # cell index
        idx = np.clip(idx, 0, grid_points - 2)
        clo = np.where(idx > 0,
                       np.take_along_axis(cdf, np.maximum(idx - 1, 0)[:, None],
                                          axis=1)[:, 0], 0.0)
        rem = u - clo
        w0 = w[rows, idx]
        w1 = w[rows, idx + 1]
        dw = w1 - w0
        disc = np.sqrt(np.maximum(w0 * w0 + 2.0 * dw * rem, 0.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(np.abs(dw) > 1e-12 * np.maximum(w0, 1e-300),
                         (disc - w0) / dw,
                         rem / np.maximum(w0, 1e-300))
        t = np.clip(np.nan_to_num(t, nan=0.5), 0.0, 1.0)
        out[:, k - 1] = grids[rows, idx] + t * h
    out[:, n - 1] = b
    return out


def bridge_sample(spec: BridgeSpec, rng) -> np.ndarray:
    """One path of the walk / bridge / modified bridge in ``spec``."""
    if spec.variant == "modified":
        return modified_bridge_sample(spec, rng)
    if spec.end is None or spec.variant == "walk":
        return walk_sample(spec, rng)
    return bridge_sample_batch(spec.n, spec.start, spec.end, spec.theta,
                               rng, size=1)[0]


def modified_bridge_sample(spec: BridgeSpec, rng) -> np.ndarray:
    """Free walk on [1,p], reversed free walk on [n-q,n], bridge between."""
    if spec.variant != "modified":
        raise ValueError("spec.variant must be 'modified'")
    n, p, q = spec.n, spec.p, spec.q
    ft = f_theta(FTheta(spec.theta))
    out = np.empty(n)
    out[0] = spec.start
    if p > 1:
        out[1:p] = spec.start + np.cumsum(ft.sample(rng, size=p - 1))
    if q >= 1:
        if spec.end is None:
            raise ValueError("modified bridge needs an endpoint")
        back = spec.end - np.cumsum(ft.sample(rng, size=q))
        out[n - 1] = spec.end
        out[n - 1 - q : n - 1] = back[::-1][:-1] if q > 1 else back[:0]
        out[n - 1 - q] = back[-1]
    elif spec.end is not None:
        out[n - 1] = spec.end
    lo, hi = p, n - q  # positions p..n-q (1-based) form the bridge
    if hi > lo + 1:
        mid = bridge_sample_batch(hi - lo + 1, out[lo - 1], out[hi - 1],
                                  spec.theta, rng, size=1)[0]
        out[lo - 1 : hi] = mid
    elif q == 0 and p < n:
        # pure walk beyond p when there is no right part at all
        out[p:] = out[p - 1] + np.cumsum(ft.sample(rng, size=n - p))
    return out


# ---------------------------------------------------------------------------
# paired random walks


def _g_log(zeta: float, z):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        return zeta * z - np.exp(z) - math.lgamma(zeta)


def prw_entrance_batch(n: int, x: float, y: float, zeta: float, theta: float,
                       rng, size: int, max_batches: int = 4000):
    """Entrance pairs (S1(1), S2(1)) by rejection.

    Proposal: independent bridge endpoints u = x - U, v = y - V with U, V
    exact sums of n-1 increments; acceptance g(v-u) / max g (the envelope
    is bounded since g peaks at log zeta).  Raises
    :class:`EstimationError` if the acceptance rate falls under 1e-4.
    """
    ft = f_theta(FTheta(theta))
    gmax = zeta * math.log(zeta) - zeta - math.lgamma(zeta)
    out_u = np.empty(size)
    out_v = np.empty(size)
    got = 0
    tried = 0
    for _ in range(max_batches):
        chunk = max(1024, 2 * (size - got))
        uu = ft.sample(rng, size=(chunk, n - 1)).sum(axis=1)
        vv = ft.sample(rng, size=(chunk, n - 1)).sum(axis=1)
        u = x - uu
        v = y - vv
        acc = np.log(rng.uniform(size=chunk)) < _g_log(zeta, v - u) - gmax
        tried += chunk
        k = int(acc.sum())
        take = min(k, size - got)
        out_u[got : got + take] = u[acc][:take]
        out_v[got : got + take] = v[acc][:take]
        got += take
        if got >= size:
            break
        if tried > 10_000 and got / tried < 1e-4:
            raise EstimationError(
                f"entrance rejection acceptance {got/tried:.2e} below 1e-4"
            )
    if got < size:
        raise EstimationError("entrance rejection exhausted its batch budget")
    return out_u, out_v


def prw_sample(n: int, x: float, y: float, zeta: float, theta: float,
               rng) -> WprwSample:
    """One paired-random-walk draw pinned at (x, y).

    The entrance pair is drawn from the exact two-dimensional law
    (rejection against independent bridge endpoints with the bounded
    g-envelope); the two paths are then independent bridges.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    u, v = prw_entrance_batch(n, x, y, zeta, theta, rng, size=1)
    s1 = bridge_sample_batch(n, u[0], x, theta, rng, size=1)[0]
    s2 = bridge_sample_batch(n, v[0], y, theta, rng, size=1)[0]
    return WprwSample(s1=s1, s2=s2, x=x, y=y)


def reversed_pair_batch(n: int, x: float, y: float, theta: float, rng,
                        size: int):
    """Pinned free path pairs plus nothing else: the PRW base measure.

    By symmetry of f_theta, running free walks backwards from the pins (x,
    y) produces path pairs whose density against Lebesgue is the product of
    increment densities; the PRW law is this measure reweighted by
    g_zeta(S2(1) - S1(1)).  Returns (s1, s2) of shape (size, n).
    """
    ft = f_theta(FTheta(theta))
    inc1 = ft.sample(rng, size=(size, n - 1))
    inc2 = ft.sample(rng, size=(size, n - 1))
    s1 = np.empty((size, n))
    s2 = np.empty((size, n))
    s1[:, n - 1] = x
    s2[:, n - 1] = y
    s1[:, : n - 1] = x - np.cumsum(inc1, axis=1)[:, ::-1]
    s2[:, : n - 1] = y - np.cumsum(inc2, axis=1)[:, ::-1]
    return s1, s2


def wsc_weight(s1, s2) -> float:
    """log W^sc = -e^{S2(1)-S1(2)} - sum_{k=2}^{n-1} (e^{S2(k)-S1(k+1)} + e^{S2(k)-S1(k)})."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    n = s1.size
    if n < 3:
        raise ValueError("W^sc needs n >= 3")
    out = -math.exp(s2[0] - s1[1])
    mid = s2[1 : n - 1]
    out -= float(np.sum(np.exp(mid - s1[2:n]) + np.exp(mid - s1[1 : n - 1])))
    return out


def wsc_weight_batch(s1, s2) -> np.ndarray:
    """Row-wise log W^sc for (size, n) path arrays.

    Overflow to -inf (weight exactly 0) is the intended limit when a path
    pair crosses by a large margin, so the exponentials run unchecked.
    """
    n = s1.shape[1]
    with np.errstate(over="ignore"):
        out = -np.exp(s2[:, 0] - s1[:, 1])
        mid = s2[:, 1 : n - 1]
        out -= np.sum(np.exp(mid - s1[:, 2:n]) + np.exp(mid - s1[:, 1 : n - 1]),
                      axis=1)
    return out


def _self_normalized(logw: np.ndarray, phi_vals: np.ndarray, min_ess: float = 50.0):
    logw = np.asarray(logw, dtype=float)
    w = np.exp(logw - logw.max())
    sw = w.sum()
    ess = sw * sw / float(np.sum(w * w))
    if ess < min_ess:
        raise EstimationError(
            f"effective sample size {ess:.1f} < {min_ess}; raise the sample count"
        )
    wn = w / sw
    est = float(np.sum(wn * phi_vals))
    var = float(np.sum(wn * wn * (phi_vals - est) ** 2))
    return est, math.sqrt(var), ess


def wprw_estimate(n: int, x: float, y: float, phi, n_samples: int, zeta: float,
                  theta: float, rng, method: str = "rejection",
                  min_ess: float = 50.0):
    """Self-normalized WPRW expectation of phi(s1, s2) with its ESS.

    ``method='rejection'`` draws PRW samples through the exact entrance
    law and weights by W^sc alone; ``method='reversed'`` draws pinned free
    pairs and weights by g * W^sc (the same estimator with the entrance
    factor moved into the weight), which is the cheap route for campaigns.
    Returns (estimate, standard_error, ess).
    """
    if method == "rejection":
        logw = np.empty(n_samples)
        vals = np.empty(n_samples)
        u, v = prw_entrance_batch(n, x, y, zeta, theta, rng, size=n_samples)
        s1 = bridge_sample_batch(n, u, x, theta, rng, size=n_samples)
        s2 = bridge_sample_batch(n, v, y, theta, rng, size=n_samples)
        logw = wsc_weight_batch(s1, s2)
        vals = np.array([phi(s1[k], s2[k]) for k in range(n_samples)])
    elif method == "reversed":
        s1, s2 = reversed_pair_batch(n, x, y, theta, rng, size=n_samples)
        logw = _g_log(zeta, s2[:, 0] - s1[:, 0]) + wsc_weight_batch(s1, s2)
        vals = np.array([phi(s1[k], s2[k]) for k in range(n_samples)])
    else:
        raise ValueError(f"unknown method {method!r}")
    return _self_normalized(logw, vals, min_ess=min_ess)


# ---------------------------------------------------------------------------
# events


def ni_indicator(s1, s2, p: float = 0.0, lo: int = 2, hi: int | None = None) -> bool:
    """NI_p on the index window [lo, hi] (default [2, n-1])."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    n = s1.size
    hi = n - 1 if hi is None else hi
    if not (1 <= lo <= hi <= n):
        raise ValueError("index window outside the path")
    seg = s1[lo - 1 : hi] - s2[lo - 1 : hi]
    return bool(np.all(seg >= -p))


def gap_indicator(s1, s2, beta: float, p: int | None = None,
                  q: int | None = None):
    """The Gap_beta event and its six sub-events, evaluated exactly.

    Returns (overall, (g1, ..., g6)).  Defaults p = q = floor(n/4).
    """
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    n = s1.size
    p = n // 4 if p is None else p
    q = n // 4 if q is None else q
    if p + q > n - 1:
        raise ValueError("need p + q <= n - 1")
    k = np.arange(1, n + 1)
    gap = s1 - s2
    dec = s1[:-1] - s1[1:]  # S1(k-1) - S1(k) at index k = 2..n

    def _all(mask, cond):
        return bool(np.all(cond[mask])) if mask.any() else True

    m1 = (k >= 2) & (k <= p)
    g1 = _all(m1, gap >= beta * k ** 0.25)
    m2 = (k >= n - q) & (k <= n - 1)
    g2 = _all(m2, gap >= beta * (n - k) ** 0.25)
    m3 = (k >= p + 1) & (k <= n - q)
    g3 = _all(m3, gap >= n ** 0.25)
    kk = np.arange(2, n + 1)
    m4 = kk <= p
    g4 = _all(m4, dec <= (1.0 / beta) * kk ** 0.125)
    m5 = kk >= n - q + 1
    g5 = _all(m5, dec <= (1.0 / beta) * (n - kk + 1) ** 0.125)
    m6 = (kk >= p + 1) & (kk <= n - q)
    g6 = _all(m6, np.abs(dec) <= (1.0 / beta) * math.log(n))
    subs = (g1, g2, g3, g4, g5, g6)
    return all(subs), subs


def gap_lower_bound_constant(n: int, beta: float, p: int | None = None,
                             q: int | None = None) -> float:
    """The deterministic constant a_beta with W^sc >= a_beta on Gap_beta.

    Follows the proof bookkeeping: tau(k) = -min(beta k^{1/4},
    beta (n-k)^{1/4}, n^{1/4}) bounds S2(k)-S1(k);
    adding the allowed S1 decrements bounds S2(k)-S1(k+1); the entrance
    term is at most 3/beta.  a_beta = exp(-e^{3/beta} - C - C~).
    """
    p = n // 4 if p is None else p
    q = n // 4 if q is None else q
    k = np.arange(2, n)
    tau = -np.minimum.reduce([beta * k ** 0.25, beta * (n - k) ** 0.25,
                              np.full(k.shape, n ** 0.25)])
    c_beta = float(np.sum(np.exp(tau)))
    kp1 = k + 1
    inc = np.where(
        kp1 <= p, (1.0 / beta) * kp1 ** 0.125,
        np.where(kp1 >= n - q + 1, (1.0 / beta) * (n - kp1 + 1) ** 0.125,
                 (1.0 / beta) * math.log(n)),
    )
    c_tilde = float(np.sum(np.exp(tau + inc)))
    return math.exp(-math.exp(3.0 / beta) - c_beta - c_tilde)


def modulus_of_continuity(path, window: float) -> float:
    """sup |f(i1) - f(i2)| over indices at distance <= window."""
    path = np.asarray(path, dtype=float)
    w = max(1, int(window))
    out = 0.0
    for d in range(1, w + 1):
        if d >= path.size:
            break
        out = max(out, float(np.max(np.abs(path[d:] - path[:-d]))))
    return out


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class SlopeRecord:
    """Log-log regression summary of a decay campaign."""

    n_values: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    slope: float
    intercept: float
    slope_ci: tuple
    extras: dict = dc_field(default_factory=dict)


def _ols_loglog(ns, vals, ses, rng, n_boot: int = 1000):
    x = np.log(np.asarray(ns, dtype=float))
    yv = np.log(np.asarray(vals, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, yv, rcond=None)
    slopes = np.empty(n_boot)
    rel = np.asarray(ses) / np.asarray(vals)
    for bidx in range(n_boot):
        yb = yv + rng.normal(size=yv.size) * rel
        cb, *_ = np.linalg.lstsq(A, yb, rcond=None)
        slopes[bidx] = cb[0]
    lo, hi = np.quantile(slopes, [0.025, 0.975])
    return float(coef[0]), float(coef[1]), (float(lo), float(hi))


def ni_scaling_campaign(a1: float, a2: float, n_grid, replicas: int,
                        theta: float, rng, p_levels=(0, 1, 2, 3, 4),
                        chunk: int = 20_000) -> SlopeRecord:
    """P(NI) for independent walk pairs started at (a1, a2) across n.

    Per n: binomial estimate with its standard error, plus the table of
    P(NI_p)/P(NI) over ``p_levels``; then the OLS slope of log P(NI) vs
    log n with a bootstrap confidence interval.
    """
    ft = f_theta(FTheta(theta))
    ns = np.asarray(sorted(n_grid), dtype=int)
    if ns.min() < 32:
        raise ValueError("grid entries must be >= 32")
    phat = np.empty(ns.size)
    se = np.empty(ns.size)
    ratios = np.zeros((ns.size, len(p_levels)))
    for i, n in enumerate(ns):
        counts = np.zeros(len(p_levels))
        done = 0
        while done < replicas:
            b = min(chunk, replicas - done)
            d1 = ft.sample(rng, size=(b, n - 1))
            d2 = ft.sample(rng, size=(b, n - 1))
            gap = (a1 - a2) + np.cumsum(d1 - d2, axis=1)
            m = gap[:, : n - 2].min(axis=1)  # indices k = 2..n-1
            for ip, p in enumerate(p_levels):
                counts[ip] += int(np.sum(m >= -p))
            done += b
        p0 = counts[0] / replicas
        phat[i] = p0
        se[i] = math.sqrt(max(p0 * (1 - p0), 1.0 / replicas) / replicas)
        if counts[0] == 0:
            raise EstimationError(f"zero NI successes at n={n}; widen replicas")
        ratios[i] = counts / counts[0]
    slope, intercept, ci = _ols_loglog(ns, phat, se, rng)
    return SlopeRecord(n_values=ns, estimates=phat, std_errors=se, slope=slope,
                       intercept=intercept, slope_ci=ci,
                       extras={"p_levels": tuple(p_levels), "ni_ratio": ratios})


def ni_bridge_frequency(n: int, a_pair, b_pair, replicas: int, theta: float,
                        rng, margin: float = 0.0) -> float:
    """Frequency of inf_k (S1(k) - S2(k)) >= margin for independent bridges."""
    s1 = bridge_sample_batch(n, a_pair[0], b_pair[0], theta, rng, size=replicas)
    s2 = bridge_sample_batch(n, a_pair[1], b_pair[1], theta, rng, size=replicas)
    return float(np.mean((s1 - s2).min(axis=1) >= margin))


def conditioned_diagnostics(n: int, a1: float, a2: float, replicas: int,
                            theta: float, rng,
                            beta_grid=(0.5, 0.25, 0.1),
                            delta_grid=(0.2, 0.1, 0.05),
                            max_batches: int = 2000) -> dict:
    """Statistics of walk pairs conditioned on NI (by rejection).

    Reports endpoint separation quantiles, the sup gap, Gap_beta frequencies
    over ``beta_grid``, and the modulus of continuity over ``delta_grid``
    (windows delta * n).
    """
    ft = f_theta(FTheta(theta))
    got = 0
    acc_s1 = np.empty((replicas, n))
    acc_s2 = np.empty((replicas, n))
    tried = 0
    while got < replicas:
        b = max(2048, replicas - got)
        d1 = ft.sample(rng, size=(b, n - 1))
        d2 = ft.sample(rng, size=(b, n - 1))
        s1 = a1 + np.concatenate([np.zeros((b, 1)), np.cumsum(d1, axis=1)], axis=1)
        s2 = a2 + np.concatenate([np.zeros((b, 1)), np.cumsum(d2, axis=1)], axis=1)
        ok = (s1[:, 1 : n - 1] - s2[:, 1 : n - 1]).min(axis=1) >= 0
        k = int(ok.sum())
        take = min(k, replicas - got)
        acc_s1[got : got + take] = s1[ok][:take]
        acc_s2[got : got + take] = s2[ok][:take]
        got += take
        tried += b
        if tried > max_batches * 2048 and got == 0:
            raise EstimationError("NI rejection acceptance too low")
    sep = acc_s1[:, -1] - acc_s2[:, -1]
    gaps = acc_s1 - acc_s2
    out = {
        "acceptance": got / tried,
        "endpoint_sep_quantiles": {
            qq: float(np.quantile(sep, qq)) for qq in (0.05, 0.25, 0.5, 0.75, 0.95)
        },
        "endpoint_sep_over_sqrt_n": float(np.mean(sep / math.sqrt(n))),
        "sup_gap_mean": float(np.mean(gaps.max(axis=1))),
        "gap_freq": {},
        "modulus": {},
    }
    for beta in beta_grid:
        hits = sum(
            gap_indicator(acc_s1[i], acc_s2[i], beta)[0] for i in range(replicas)
        )
        out["gap_freq"][beta] = hits / replicas
    for delta in delta_grid:
        w = delta * n
        vals = [modulus_of_continuity(acc_s1[i], w) for i in range(replicas)]
        out["modulus"][delta] = float(np.mean(vals)) / math.sqrt(n)
    return out


def wsc_denominator_campaign(n_grid, replicas: int, zeta: float, theta: float,
                             rng, min_ess: float = 50.0) -> SlopeRecord:
    """E_PRW[W^sc] at endpoints (0, -sqrt(n)) across n, with the slope.

    Uses the reversed-walk representation E_PRW[W^sc] = E[g W^sc] / E[g]
    over pinned free pairs; standard errors by the delta method and the
    numerator ESS reported per n.  ``replicas`` is the count at the largest
    n; smaller n use proportionally fewer (ESS per sample scales like 1/n).
    """
    ns = np.asarray(sorted(n_grid), dtype=int)
    est = np.empty(ns.size)
    se = np.empty(ns.size)
    esses = np.empty(ns.size)
    for i, n in enumerate(ns):
        reps = max(10_000, int(replicas * n / ns.max()))
        chunk = max(1000, int(2e7 / n))
        wmax = -np.inf
        # first pass for a stable shift: small pilot
        s1, s2 = reversed_pair_batch(n, 0.0, -math.sqrt(n), theta, rng, 2048)
        lg = _g_log(zeta, s2[:, 0] - s1[:, 0])
        wmax = float(lg.max())
        done = 0
        sw = sww = sw2 = sww2 = swsww = 0.0
        while done < reps:
            b = min(chunk, reps - done)
            s1, s2 = reversed_pair_batch(n, 0.0, -math.sqrt(n), theta, rng, b)
            lg = _g_log(zeta, s2[:, 0] - s1[:, 0])
            lw = wsc_weight_batch(s1, s2)
            g = np.exp(lg - wmax)
            gw = np.exp(lg + lw - wmax)
            sw += float(g.sum())
            sww += float(gw.sum())
            sw2 += float((g * g).sum())
            sww2 += float((gw * gw).sum())
            swsww += float((g * gw).sum())
            done += b
        if sww <= 0 or sw <= 0:
            raise EstimationError(f"degenerate weights at n={n}")
        r = sww / sw
        ess_num = sww * sww / sww2
        if ess_num < min_ess:
            raise EstimationError(
                f"ESS {ess_num:.1f} < {min_ess} at n={n}; raise the sample count"
            )
        # delta method for the ratio of means
        m = reps
        vg = sw2 / m - (sw / m) ** 2
        vgw = sww2 / m - (sww / m) ** 2
        cgw = swsww / m - (sw / m) * (sww / m)
        var_r = (vgw - 2 * r * cgw + r * r * vg) / m / (sw / m) ** 2
        est[i] = r
        se[i] = math.sqrt(max(var_r, 0.0))
        esses[i] = ess_num
    slope, intercept, ci = _ols_loglog(ns, est, se, rng)
    return SlopeRecord(n_values=ns, estimates=est, std_errors=se, slope=slope,
                       intercept=intercept, slope_ci=ci,
                       extras={"ess": esses})
