# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: log-space DP row scan and heat-bath site updates.

Contracts match hslg._kernels.fallback; see there for documentation.
"""

from libc.math cimport exp, log, log1p, sqrt, fabs, isnan, isinf, INFINITY

import numpy as np
cimport numpy as cnp
from scipy.special.cython_special cimport gammaincinv as _c_gammaincinv

cdef extern from "<math.h>" nogil:
    long double expl(long double)
    long double log1pl(long double)

NAME = "core"

cnp.import_array()

ctypedef fused real_t:
    double
    long double


cdef inline real_t _lse(real_t a, real_t b) nogil:
    cdef real_t m, d
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    m = a if a > b else b
    d = a - b
    if d < 0:
        d = -d
    if d > 45.0:  # exp(-d) below resolution of both precisions in use
        return m
    if real_t is double:
        return m + log1p(exp(-d))
    else:
        return m + log1pl(expl(-d))


def pair_dp_collect(real_t[::1] wflat, long[::1] off, long twoN, long s_low,
                    long m_cap, long n_cap, long diag_base,
                    real_t[:, ::1] out):
    """Vertex-disjoint pair partition functions by a cancellation-free DP.

    Sources (1, s_low) and (1, s_low+1); ``out[d, m-1]`` receives
    log Z2(m, n) with sink pair {(m, n), (m, n-1)} on the anti-diagonals
    m + n = diag_base + d for d in {0, 1, 2}, for every reachable m <= m_cap
    with 3 <= n <= n_cap.  Entries not computed stay untouched.

    The recursion is the wedge (2-path) analogue of the single-path row DP:
    all coefficients are positive, so no cancellation occurs regardless of
    how small the pair function is relative to products of single-path
    values.
    """
    cdef long s2 = s_low + 1
    cdef long amax0 = twoN + 1 - s2
    if m_cap < amax0:
        amax0 = m_cap
    cdef long stride = amax0 + 1
    if real_t is double:
        dt = np.float64
    else:
        dt = np.longdouble
    D_buf = np.full(stride * stride, -np.inf, dtype=dt)
    H_buf = np.full(stride * stride, -np.inf, dtype=dt)
    cdef real_t[::1] D = D_buf
    cdef real_t[::1] H = H_buf
    cdef long b, A, Ap, a1, a2, m, n, d, s
    cdef real_t acc, c, term, v
    cdef const real_t* wb
    cdef const real_t* wn

    # init at row b = s2: zlow = cumsum of row s_low, upper prefix = cumsum of
    # row s2; D(a2, a1) over a1 < a2
    cdef long A2 = twoN + 1 - s2
    if m_cap < A2:
        A2 = m_cap
    cdef real_t[::1] cum_up = np.empty(A2 + 1, dtype=dt)
    cdef real_t[::1] zlow = np.empty(A2 + 1, dtype=dt)
    with nogil:
        wb = &wflat[off[s_low - 1]]
        acc = 0.0
        for a1 in range(1, A2 + 1):
            acc += wb[a1 - 1]
            zlow[a1] = acc
        wb = &wflat[off[s2 - 1]]
        acc = 0.0
        for a1 in range(1, A2 + 1):
            acc += wb[a1 - 1]
            cum_up[a1] = acc
        for a1 in range(1, A2 + 1):
            acc = -INFINITY
            for a2 in range(a1 + 1, A2 + 1):
                acc = wb[a2 - 1] + _lse(acc, zlow[a2])
                D[a2 * stride + a1] = cum_up[a1] + acc

    A = A2
    b = s2
    while True:
        # extraction at n = b + 1 from D_b
        n = b + 1
        if n <= n_cap and n <= twoN:
            with nogil:
                wn = &wflat[off[n - 1]]
                for d in range(3):
                    s = diag_base + d
                    m = s - n
                    if m < 2 or m > A or m > twoN + 1 - n:
                        continue
                    c = 0.0
                    v = -INFINITY
                    for a1 in range(m, 0, -1):
                        c += wn[a1 - 1]
                        if a1 < m:
                            v = _lse(v, D[m * stride + a1] + c)
                    out[d, m - 1] = v
        b += 1
        if b > twoN or b >= n_cap:
            break
        Ap = A
        A = twoN + 1 - b
        if m_cap < A:
            A = m_cap
        if A < 2:
            break
        with nogil:
            wb = &wflat[off[b - 1]]
            # pass 1: H(a2', a1) = w[a1] * (H(a2', a1-1) + D(a2', a1))
            for a2 in range(2, (Ap if Ap < A else A) + 1):
                acc = -INFINITY
                for a1 in range(1, (a2 - 1 if a2 - 1 < A else A) + 1):
                    acc = wb[a1 - 1] + _lse(acc, D[a2 * stride + a1])
                    H[a2 * stride + a1] = acc
            # pass 2 (in place into D): Dn(a2, a1) = w[a2]*(Dn(a2-1, a1) + H(a2, a1))
            # process a2 ascending; Dn(a2-1, .) already holds the new row values
            for a2 in range(2, A + 1):
                for a1 in range(1, a2):
                    term = D[(a2 - 1) * stride + a1] if a1 < a2 - 1 else <real_t>(-INFINITY)
                    v = H[a2 * stride + a1] if a2 <= Ap else <real_t>(-INFINITY)
                    D[a2 * stride + a1] = wb[a2 - 1] + _lse(term, v)
            # invalidate stale rows beyond A
            for a2 in range(A + 1, Ap + 1):
                for a1 in range(1, a2):
                    D[a2 * stride + a1] = -INFINITY
    return np.asarray(out.base) if out.base is not None else np.asarray(out)


cpdef scan_row(double[::1] prev, double[::1] w, double[::1] cur, bint source_at_0):
    cdef Py_ssize_t n = cur.shape[0]
    cdef Py_ssize_t np_ = prev.shape[0]
    cdef Py_ssize_t j
    cdef double left = -INFINITY
    cdef double up, m, d
    with nogil:
        for j in range(n):
            up = prev[j] if j < np_ else -INFINITY
            if j == 0 and source_at_0:
                cur[0] = w[0]
            else:
                m = up if up > left else left
                if m == -INFINITY:
                    cur[j] = -INFINITY
                else:
                    d = up - left
                    if d < 0.0:
                        d = -d
                    cur[j] = w[j] + m + log1p(exp(-d))
            left = cur[j]
    return np.asarray(cur.base) if cur.base is not None else np.asarray(cur)


cdef inline double _logf_site(double v, double c, double a_coef, double b_coef) nogil:
    return c * v - a_coef * exp(v) - b_coef * exp(-v)


cdef double[4] _GL4_X
cdef double[4] _GL4_W
_GL4_X[0] = -0.8611363115940526; _GL4_X[1] = -0.3399810435848563
_GL4_X[2] = 0.3399810435848563;  _GL4_X[3] = 0.8611363115940526
_GL4_W[0] = 0.3478548451374538;  _GL4_W[1] = 0.6521451548625461
_GL4_W[2] = 0.6521451548625461;  _GL4_W[3] = 0.3478548451374538


cdef double _gig_quantile(double c, double a_coef, double b_coef, double u,
                          double tol) nogil:
    cdef double t_star = (c + sqrt(c * c + 4.0 * a_coef * b_coef)) / (2.0 * a_coef)
    cdef double v_star = log(t_star)
    cdef double kappa = a_coef * t_star + b_coef / t_star
    cdef double sd = 1.0 / sqrt(kappa)
    cdef double peak = _logf_site(v_star, c, a_coef, b_coef)

    cdef double lo = v_star - 8.0 * sd
    while _logf_site(lo, c, a_coef, b_coef) > peak - 46.0:
        lo -= 4.0 * sd
    cdef double hi = v_star + 8.0 * sd
    while _logf_site(hi, c, a_coef, b_coef) > peak - 46.0:
        hi += 4.0 * sd

    cdef int n_cells = 256
    cdef double h = (hi - lo) / n_cells
    cdef double cdf[257]
    cdef double mass[256]
    cdef int k, q
    cdef double mid, acc
    cdf[0] = 0.0
    for k in range(n_cells):
        mid = lo + (k + 0.5) * h
        acc = 0.0
        for q in range(4):
            acc += _GL4_W[q] * exp(
                _logf_site(mid + 0.5 * h * _GL4_X[q], c, a_coef, b_coef) - peak
            )
        mass[k] = 0.5 * h * acc
        cdf[k + 1] = cdf[k] + mass[k]
    cdef double total = cdf[n_cells]
    cdef double target = u * total

    # locate the cell by binary search
    cdef int klo = 0, khi = n_cells, km
    while khi - klo > 1:
        km = (klo + khi) >> 1
        if cdf[km] <= target:
            klo = km
        else:
            khi = km
    cdef double x0 = lo + klo * h
    cdef double rem = target - cdf[klo]
    cdef double frac = rem / mass[klo] if mass[klo] > 0.0 else 0.5
    if frac < 0.0:
        frac = 0.0
    elif frac > 1.0:
        frac = 1.0
    cdef double v = x0 + frac * h

    cdef int it
    cdef double half, m2, g, d, step
    for it in range(60):
        # 4-point Gauss-Legendre of exp(logf - peak) over [x0, v]
        half = 0.5 * (v - x0)
        m2 = 0.5 * (v + x0)
        acc = 0.0
        for q in range(4):
            acc += _GL4_W[q] * exp(
                _logf_site(m2 + half * _GL4_X[q], c, a_coef, b_coef) - peak
            )
        g = half * acc - rem
        d = exp(_logf_site(v, c, a_coef, b_coef) - peak)
        if d <= 0.0:
            break
        step = g / d
        v -= step
        if v < x0 - h:
            v = x0 - h
        elif v > x0 + 2.0 * h:
            v = x0 + 2.0 * h
        if fabs(step) < tol * (1.0 if fabs(v) < 1.0 else fabs(v)):
            break
    return v


def gig_quantile(double c, double a_coef, double b_coef, double u,
                 double tol=1e-13):
    with nogil:
        c = _gig_quantile(c, a_coef, b_coef, u, tol)
    return c


cdef int _site_quantile(double c, double a_coef, double b_coef, double u,
                        double* out) nogil:
    # returns 0 on success, nonzero error code otherwise
    if a_coef < 0.0 or b_coef < 0.0 or isnan(a_coef) or isnan(b_coef):
        return 1
    if a_coef == 0.0 and b_coef == 0.0:
        return 2
    if isinf(a_coef) or isinf(b_coef):
        return 3
    if b_coef == 0.0:
        if c <= 0.0:
            return 4
        out[0] = log(_c_gammaincinv(c, u)) - log(a_coef)
        return 0
    if a_coef == 0.0:
        if c >= 0.0:
            return 4
        out[0] = log(b_coef) - log(_c_gammaincinv(-c, 1.0 - u))
        return 0
    out[0] = _gig_quantile(c, a_coef, b_coef, u, 1e-13)
    return 0


_SITE_ERRORS = {
    1: "negative or NaN edge coefficient",
    2: "site conditional is non-integrable (no edge mass)",
    3: "site conditional degenerate (+inf edge coefficient)",
    4: "non-integrable site conditional",
}


def site_quantile(double c, double a_coef, double b_coef, double u):
    cdef double out = 0.0
    cdef int err
    with nogil:
        err = _site_quantile(c, a_coef, b_coef, u, &out)
    if err:
        raise ValueError(_SITE_ERRORS[err])
    return out


def heat_bath_sweep(double[::1] values, long[::1] order, double[::1] c_lin,
                    long[::1] a_indptr, long[::1] a_idx,
                    long[::1] b_indptr, long[::1] b_idx,
                    double[::1] uniforms):
    """Systematic-scan passes; len(uniforms) = k * len(order) runs k sweeps."""
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t total = uniforms.shape[0]
    cdef Py_ssize_t pos, s, kk, base
    cdef double a_coef, b_coef, out
    cdef int err = 0
    if total % n != 0:
        raise ValueError("uniforms length must be a multiple of the site count")
    with nogil:
        base = 0
        while base < total:
            for pos in range(n):
                s = order[pos]
                a_coef = 0.0
                for kk in range(a_indptr[s], a_indptr[s + 1]):
                    a_coef += exp(-values[a_idx[kk]])
                b_coef = 0.0
                for kk in range(b_indptr[s], b_indptr[s + 1]):
                    b_coef += exp(values[b_idx[kk]])
                err = _site_quantile(c_lin[s], a_coef, b_coef,
                                     uniforms[base + pos], &out)
                if err:
                    break
                values[s] = out
            if err:
                break
            base += n
    if err:
        raise ValueError(_SITE_ERRORS[err] + f" at site index {s}")
    return np.asarray(values.base) if values.base is not None else np.asarray(values)
