"""Pure-Python implementations of the hot kernels.

Same contracts as the compiled module ``hslg._kernels._core``; used when the
extension is unavailable and as the reference in the backend-parity tests.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaincinv as _gammaincinv

NAME = "fallback"

_NEG_INF = -math.inf

_GL4_X = np.array(
    [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526]
)
_GL4_W = np.array(
    [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538]
)


def scan_row(prev, w, cur, source_at_0):
    """One row of the up-right log-space DP.

    cur[j] = w[j] + logaddexp(prev[j], cur[j-1]) with out-of-range neighbors
    at -inf; when ``source_at_0`` the first cell is the path source and gets
    weight w[0] alone.
    """
    n = len(cur)
    np_prev = len(prev)
    left = _NEG_INF
    for j in range(n):
        up = prev[j] if j < np_prev else _NEG_INF
        if j == 0 and source_at_0:
            cur[0] = w[0]
        else:
            m = up if up > left else left
            if m == _NEG_INF:
                cur[j] = _NEG_INF
            else:
                cur[j] = w[j] + m + math.log1p(math.exp(-abs(up - left)))
        left = cur[j]
    return cur


def _logf_site(v, c, a_coef, b_coef):
    return c * v - a_coef * math.exp(v) - b_coef * math.exp(-v)


def gig_quantile(c, a_coef, b_coef, u, tol=1e-13):
    """Quantile of the density propto exp(c*v - A e^v - B e^{-v}), A,B > 0.

    Piecewise Gauss-Legendre CDF on a window around the mode, then Newton
    refinement to ``tol`` in v.
    """
    # mode: A e^v - B e^{-v} = c  =>  t = e^v solves A t^2 - c t - B = 0
    t_star = (c + math.sqrt(c * c + 4.0 * a_coef * b_coef)) / (2.0 * a_coef)
    v_star = math.log(t_star)
    kappa = a_coef * t_star + b_coef / t_star
    sd = 1.0 / math.sqrt(kappa)
    peak = _logf_site(v_star, c, a_coef, b_coef)

    lo = v_star - 8.0 * sd
    while _logf_site(lo, c, a_coef, b_coef) > peak - 46.0:
        lo -= 4.0 * sd
    hi = v_star + 8.0 * sd
    while _logf_site(hi, c, a_coef, b_coef) > peak - 46.0:
        hi += 4.0 * sd

    n_cells = 256
    x = np.linspace(lo, hi, n_cells + 1)
    h = (hi - lo) / n_cells
    # 4-point Gauss-Legendre per cell: integration error ~1e-15 relative
    mids = 0.5 * (x[:-1] + x[1:])
    pts = mids[:, None] + 0.5 * h * _GL4_X[None, :]
    fp = np.exp(c * pts - a_coef * np.exp(pts) - b_coef * np.exp(-pts) - peak)
    masses = 0.5 * h * (fp @ _GL4_W)
    cdf = np.concatenate([[0.0], np.cumsum(masses)])
    total = cdf[-1]

    target = u * total
    k = int(np.clip(np.searchsorted(cdf, target) - 1, 0, n_cells - 1))
    x0 = x[k]
    rem = target - cdf[k]
    # initial guess by linear interpolation in the cell mass
    frac = rem / masses[k] if masses[k] > 0 else 0.5
    v = x0 + min(max(frac, 0.0), 1.0) * h

    def cell_int(b):
        # 4-point GL of exp(logf - peak) over [x0, b]
        half = 0.5 * (b - x0)
        m = 0.5 * (b + x0)
        p = m + half * _GL4_X
        return half * float(
            np.exp(c * p - a_coef * np.exp(p) - b_coef * np.exp(-p) - peak)
            @ _GL4_W
        )

    for _ in range(60):
        g = cell_int(v) - rem
        d = math.exp(_logf_site(v, c, a_coef, b_coef) - peak)
        if d <= 0:
            break
        step = g / d
        v -= step
        if v < x0 - h:
            v = x0 - h
        elif v > x0 + 2.0 * h:
            v = x0 + 2.0 * h
        if abs(step) < tol * max(1.0, abs(v)):
            break
    return v


def site_quantile(c, a_coef, b_coef, u):
    """Quantile of exp(c*v - A e^v - B e^{-v}) covering the gamma edge cases."""
    if a_coef < 0 or b_coef < 0 or math.isnan(a_coef) or math.isnan(b_coef):
        raise ValueError("negative or NaN edge coefficient")
    if a_coef == 0.0 and b_coef == 0.0:
        raise ValueError("site conditional is non-integrable (no edge mass)")
    if math.isinf(a_coef) or math.isinf(b_coef):
        raise ValueError("site conditional degenerate (+inf edge coefficient)")
    if b_coef == 0.0:
        if c <= 0:
            raise ValueError("non-integrable site conditional (A>0 needs c>0)")
        return math.log(_gammaincinv(c, u)) - math.log(a_coef)
    if a_coef == 0.0:
        if c >= 0:
            raise ValueError("non-integrable site conditional (B>0 needs c<0)")
        return math.log(b_coef) - math.log(_gammaincinv(-c, 1.0 - u))
    return gig_quantile(c, a_coef, b_coef, u)


def pair_dp_collect(wflat, off, twoN, s_low, m_cap, n_cap, diag_base, out):
    """Vertex-disjoint pair partition functions; see the compiled twin.

    out[d, m-1] <- log Z2(m, n) with sink pair {(m,n),(m,n-1)} on the
    anti-diagonals m + n = diag_base + d, d in {0,1,2}, for reachable m <= m_cap,
    3 <= n <= n_cap.  Inner loops vectorize over the a1 coordinate; dtype of
    ``out`` (float64 or longdouble) selects the working precision.
    """
    dt = out.dtype
    s2 = s_low + 1
    A2 = min(twoN + 1 - s2, m_cap)
    stride = A2 + 1
    NEG = -np.inf
    D = np.full((stride, stride), NEG, dtype=dt)
    w_low = np.asarray(wflat[off[s_low - 1]:off[s_low]], dtype=dt)
    w_up = np.asarray(wflat[off[s2 - 1]:off[s2]], dtype=dt)
    zlow = np.concatenate([[NEG], np.cumsum(w_low[:A2])])
    cum_up = np.concatenate([[NEG], np.cumsum(w_up[:A2])])
    for a1 in range(1, A2 + 1):
        acc = np.asarray(NEG, dtype=dt)
        for a2 in range(a1 + 1, A2 + 1):
            acc = w_up[a2 - 1] + np.logaddexp(acc, zlow[a2])
            D[a2, a1] = cum_up[a1] + acc

    A = A2
    b = s2
    H = np.full((stride, stride), NEG, dtype=dt)
    while True:
        n = b + 1
        if n <= n_cap and n <= twoN:
            wn = np.asarray(wflat[off[n - 1]:off[n]], dtype=dt)
            for d in range(3):
                m = (diag_base + d) - n
                if m < 2 or m > A or m > twoN + 1 - n:
                    continue
                suff = np.cumsum(wn[:m][::-1])[::-1]  # suff[a1-1] = sum w(a1..m)
                terms = D[m, 1:m] + suff[:-1]
                mx = terms.max()
                if mx == NEG:
                    out[d, m - 1] = NEG
                else:
                    out[d, m - 1] = mx + np.log(np.exp(terms - mx).sum())
        b += 1
        if b > twoN or b >= n_cap:
            break
        Ap = A
        A = min(twoN + 1 - b, m_cap)
        if A < 2:
            break
        wb = np.asarray(wflat[off[b - 1]:off[b]], dtype=dt)
        # pass 1: H(a2', .) prefix over a1, vectorized over a2'
        amax2 = min(Ap, A)
        H[: amax2 + 1, : A + 1] = NEG
        acc = np.full(amax2 + 1, NEG, dtype=dt)
        for a1 in range(1, A + 1):
            lo = a1 + 1  # only a2' > a1 are valid
            np.logaddexp(acc[lo:], D[lo : amax2 + 1, a1], out=acc[lo:])
            acc[lo:] += wb[a1 - 1]
            H[lo : amax2 + 1, a1] = acc[lo:]
        # pass 2 in place: D(a2, .) = w[a2] * (D(a2-1, .) + H(a2, .))
        for a2 in range(2, A + 1):
            # D[a2-1, a2-1] (the invalid diagonal state) is never written and
            # stays at -inf, so the slice is safe to use directly
            prev = D[a2 - 1, 1:a2]
            h = H[a2, 1:a2] if a2 <= amax2 else np.full(a2 - 1, NEG, dtype=dt)
            D[a2, 1:a2] = wb[a2 - 1] + np.logaddexp(prev, h)
        if Ap > A:
            D[A + 1 : Ap + 1, :] = NEG
    return out


def heat_bath_sweep(values, order, c_lin, a_indptr, a_idx, b_indptr, b_idx,
                    uniforms):
    """Systematic-scan heat-bath passes; updates ``values`` in place.

    ``values`` holds interior and boundary coordinates in one array; only the
    sites listed in ``order`` are resampled.  A-neighbors enter as
    sum(exp(-x)), B-neighbors as sum(exp(x)); +/-inf boundary data drop out
    through the exponentials.  len(uniforms) = k * len(order) runs k
    consecutive sweeps.
    """
    n = len(order)
    if len(uniforms) % n != 0:
        raise ValueError("uniforms length must be a multiple of the site count")
    for base in range(0, len(uniforms), n):
        for pos, s in enumerate(order):
            a_coef = 0.0
            for kk in range(a_indptr[s], a_indptr[s + 1]):
                a_coef += math.exp(-values[a_idx[kk]])
            b_coef = 0.0
            for kk in range(b_indptr[s], b_indptr[s + 1]):
                b_coef += math.exp(values[b_idx[kk]])
            values[s] = site_quantile(c_lin[s], a_coef, b_coef,
                                      uniforms[base + pos])
    return values
