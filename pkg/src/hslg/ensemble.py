"""Symmetrized multipath partition functions and the line ensemble.

The r-path partition function is, in principle, the Lindstrom-Gessel-
Viennot determinant of single-path partition functions.  That route is kept
(:func:`logZ_sym_lgv`) because it is exact on tiny lattices, but as a
numerical scheme it collapses quickly: already by N around 50 the single-
path entries agree to the last bit while the determinant lives tens of
e-folds below them.  Production evaluation therefore uses recursions with
non-negative coefficients only: a direct pair DP in the exterior-power
space for r = 2, and the Desnanot-Jacobi identity for r = 3, which rewrites
the 3x3 determinant as a ratio involving pair quantities and a single
subtraction whose cancellation is monitored and, if needed, rerun in
extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import permutations

import numpy as np

from . import _kernels
from .polymer import LogWeightField
from .specfun import digamma

__all__ = [
    "LgvCancellationError",
    "SymWeightField",
    "LineEnsemble",
    "symmetrize",
    "logZ_sym",
    "logZ_sym_lgv",
    "logZ_sym_enum",
    "pair_logZ_antidiags",
    "build_line_ensemble",
    "OrderingReport",
    "ordering_report",
]

_LOG2 = math.log(2.0)
_NEG = -math.inf

# remainder below this after factoring the leading product means ~10 decimal
# digits of cancellation: rerun in extended precision
_CANCEL_THRESHOLD = 1e-10
# extended precision (80-bit) resolves log-scale differences down to about
# 1e-19 * |log Z|; below this remainder the value is unresolved
_LONGDOUBLE_FLOOR = 1e-15


class LgvCancellationError(ArithmeticError):
    """A determinant evaluation lost all significant digits."""


@dataclass
class SymWeightField:
    """Symmetric extension of a half-quadrant field onto {a+b <= 2N+1}.

    Stored flat, row-per-b: ``row(b)[a-1]`` is log W-tilde(a, b), row length
    2N+1-b.  Diagonal entries carry the extra -log 2.
    """

    N: int
    wflat: np.ndarray = dc_field(repr=False, default=None)
    offsets: np.ndarray = dc_field(repr=False, default=None)

    def row(self, b: int) -> np.ndarray:
        return self.wflat[self.offsets[b - 1] : self.offsets[b]]

    def logw(self, a: int, b: int) -> float:
        if not (a >= 1 and b >= 1 and a + b <= 2 * self.N + 1):
            raise IndexError(f"({a},{b}) outside the symmetrized staircase")
        return float(self.wflat[self.offsets[b - 1] + a - 1])


def symmetrize(field: LogWeightField) -> SymWeightField:
    """W-tilde(a,b) = W(max(a,b), min(a,b)), halved on the diagonal."""
    N = field.N
    size = 2 * N
    dense = np.full((size + 1, size + 1), np.nan)  # 1-based indexing
    for i in range(1, size + 1):
        r = field.rows[i - 1]
        if r.size:
            dense[i, 1 : r.size + 1] = r
    lens = [2 * N + 1 - b for b in range(1, size + 1)]
    offsets = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    wflat = np.empty(offsets[-1])
    for b in range(1, size + 1):
        amax = lens[b - 1]
        out = wflat[offsets[b - 1] : offsets[b]]
        upper = min(b, amax)
        out[:upper] = dense[b, 1 : upper + 1]  # a <= b: W(b, a)
        if amax > b:
            out[b:amax] = dense[b + 1 : amax + 1, b]  # a > b: W(a, b)
        if b <= amax:
            out[b - 1] -= _LOG2
    return SymWeightField(N=N, wflat=wflat, offsets=offsets)


def _single_logZ_table(sym: SymWeightField, source_col: int) -> list:
    """Full-quadrant DP from (1, source_col): tables[b-1][a-1] = log Z."""
    N = sym.N
    tables = [None] * (2 * N)
    prev = np.empty(0)
    for b in range(source_col, 2 * N + 1):
        amax = 2 * N + 1 - b
        if amax < 1:
            break
        cur = np.empty(amax)
        _kernels.scan_row(prev, sym.row(b)[:amax], cur, b == source_col)
        tables[b - 1] = cur
        prev = cur
    return tables


def _single_logZ(sym: SymWeightField, source_col: int, m: int, n: int) -> float:
    if n < source_col:
        return _NEG
    prev = np.empty(0)
    for b in range(source_col, n + 1):
        amax = min(m, 2 * sym.N + 1 - b)
        cur = np.empty(amax)
        _kernels.scan_row(prev, sym.row(b)[:amax], cur, b == source_col)
        prev = cur
    return float(prev[m - 1])


# ---------------------------------------------------------------------------
# pair quantities


def pair_logZ_antidiags(sym: SymWeightField, s_low: int, m_cap=None, n_cap=None,
                        longdouble: bool = False,
                        diag_base: int | None = None) -> np.ndarray:
    """log Z2(m, n) on the anti-diagonals m+n = diag_base + {0, 1, 2}.

    Z2(m, n) is the partition function of vertex-disjoint path pairs
    (1, s_low+1) -> (m, n) and (1, s_low) -> (m, n-1).  Returned as an array
    ``out[d, m-1]`` for m+n = diag_base+d (default base 2N-1, the top of the
    staircase); unreachable entries are NaN.  The n = s_low+1 boundary value
    (both paths forced straight) is filled here rather than in the sweep
    kernel.
    """
    N = sym.N
    twoN = 2 * N
    m_cap = twoN - 1 if m_cap is None else int(m_cap)
    n_cap = twoN if n_cap is None else int(n_cap)
    diag_base = twoN - 1 if diag_base is None else int(diag_base)
    dt = np.longdouble if longdouble else np.float64
    out = np.full((3, twoN), np.nan, dtype=dt)
    wflat = sym.wflat.astype(dt) if longdouble else sym.wflat
    _kernels.pair_dp_collect(wflat, sym.offsets, twoN, s_low, m_cap, n_cap,
                             diag_base, out)
    # boundary case n = s_low + 1: lower path pinned onto row s_low, upper
    # onto row s_low+1, both straight segments
    n = s_low + 1
    for d in range(3):
        m = (diag_base + d) - n
        if 2 <= m <= min(m_cap, twoN + 1 - n):
            low = float(np.sum(sym.row(s_low)[:m]))
            up = float(np.sum(sym.row(s_low + 1)[:m]))
            out[d, m - 1] = low + up
    # remaining in-range NaNs are geometrically impossible pairs (sink row
    # below the lower source, or both sinks in one column): true Z2 = 0
    for d in range(3):
        s = diag_base + d
        for m in range(1, min(m_cap, twoN) + 1):
            n = s - m
            if 2 <= n <= min(n_cap, twoN) and m + n <= twoN + 1 and np.isnan(out[d, m - 1]):
                out[d, m - 1] = -np.inf
    return out


def _pair_logZ(sym: SymWeightField, s_low: int, m: int, n: int,
               longdouble: bool = False) -> float:
    """Single-endpoint pair partition function via a capped sweep."""
    out = pair_logZ_antidiags(sym, s_low, m_cap=m, n_cap=max(n, s_low + 1),
                              longdouble=longdouble, diag_base=m + n)
    return float(out[0, m - 1])


# ---------------------------------------------------------------------------
# determinant routes


def _signed_logdet(logm: np.ndarray) -> float:
    """log det of exp(logm) by signed permutation expansion (small r only)."""
    r = logm.shape[0]
    terms = []
    signs = []
    for perm in permutations(range(r)):
        t = sum(logm[i, perm[i]] for i in range(r))
        sgn = 1.0
        seen = [False] * r
        for i in range(r):
            if seen[i]:
                continue
            ln, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                sgn = -sgn
        terms.append(t)
        signs.append(sgn)
    terms = np.array(terms)
    signs = np.array(signs)
    mx = terms.max()
    if mx == _NEG:
        raise LgvCancellationError("all determinant terms vanish")
    s = float(np.sum(signs * np.exp(terms - mx)))
    if not (s > _CANCEL_THRESHOLD):
        sl = np.sum(
            signs.astype(np.longdouble) * np.exp(terms.astype(np.longdouble) - mx)
        )
        if not (sl > 0):
            raise LgvCancellationError(
                "LGV determinant non-positive after extended precision"
            )
        return float(mx + np.log(sl).astype(float))
    return mx + math.log(s)


def logZ_sym_lgv(sym: SymWeightField, r: int, m: int, n: int) -> float:
    """LGV determinant route det[Z((1, r+1-i) -> (m, n-j+1))].

    Exact on tiny lattices; suffers catastrophic cancellation in the bulk
    at moderate N (use :func:`logZ_sym` there).
    """
    if r == 0:
        return 0.0
    logm = np.empty((r, r))
    for i in range(r):
        for j in range(r):
            logm[i, j] = _single_logZ(sym, r - i, m, n - j)
    return _signed_logdet(logm)


def _dj_logdet3(a1, b1, c1, d1, e1) -> float:
    """Desnanot-Jacobi: log det3 = log(AB - CD) - log E, inputs in log form.

    A = Z2_low(p, q-1), B = Z2_high(p, q), C = Z2_low(p, q), D = Z2_high(p,
    q-1), E = Z((1,2) -> (p, q-1)); AB >= CD strictly for a positive
    determinant.
    """
    ab = a1 + b1
    cd = c1 + d1
    if ab == _NEG:
        raise LgvCancellationError("leading pair product vanishes")
    if cd == _NEG:
        return float(ab - e1)
    ratio = cd - ab
    if ratio >= 0:
        raise LgvCancellationError("non-positive r=3 determinant")
    s = -math.expm1(float(ratio))  # 1 - e^{ratio}
    if s < _LONGDOUBLE_FLOOR:
        raise LgvCancellationError(
            f"r=3 cancellation beyond working precision (remainder {s:g})"
        )
    return float(ab + math.log(s) - e1)


def logZ_sym(sym: SymWeightField, r: int, m: int, n: int) -> float:
    """Multipath point-to-point symmetrized log partition function.

    r = 0 is 0 by convention; r = 1 a direct DP; r = 2 the cancellation-
    free pair DP; r = 3 the Desnanot-Jacobi combination of pair quantities
    (retried in extended precision when the subtraction cancels); r >= 4
    falls back to the signed LGV expansion and is only trustworthy on tiny
    lattices.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return 0.0
    if not (n >= r and m >= 1 and m + n <= 2 * sym.N + 1):
        raise ValueError(f"endpoint ({m},{n}) with r={r} outside the staircase")
    if r == 1:
        return _single_logZ(sym, 1, m, n)
    if r == 2:
        return _pair_logZ(sym, 1, m, n)
    if r == 3:
        for ld in (False, True):
            a1 = _pair_logZ(sym, 1, m, n - 1, longdouble=ld)
            b1 = _pair_logZ(sym, 2, m, n, longdouble=ld)
            c1 = _pair_logZ(sym, 1, m, n, longdouble=ld)
            d1 = _pair_logZ(sym, 2, m, n - 1, longdouble=ld)
            e1 = _single_logZ(sym, 2, m, n - 1)
            try:
                return _dj_logdet3(a1, b1, c1, d1, e1)
            except LgvCancellationError:
                if ld:
                    raise
        raise AssertionError("unreachable")
    return logZ_sym_lgv(sym, r, m, n)


def logZ_sym_enum(sym: SymWeightField, r: int, m: int, n: int) -> float:
    """Vertex-disjoint r-tuple enumeration oracle (tiny instances only)."""
    if m + n + 2 * r > 24:
        raise ValueError("enumeration budget is m + n + 2r <= 24")
    if r == 0:
        return 0.0
    sources = [(1, r - i) for i in range(r)]
    sinks = [(m, n - i) for i in range(r)]
    totals = []

    def paths_from(a, b, tb, used, acc, out):
        acc = acc + sym.logw(a, b)
        key = (a, b)
        if key in used:
            return
        if (a, b) == tb:
            out.append((acc, used | {key}))
            return
        if a + 1 <= tb[0]:
            paths_from(a + 1, b, tb, used | {key}, acc, out)
        if b + 1 <= tb[1]:
            paths_from(a, b + 1, tb, used | {key}, acc, out)

    def rec(k, used, acc):
        if k == r:
            totals.append(acc)
            return
        out = []
        sa, sb = sources[k]
        paths_from(sa, sb, sinks[k], used, 0.0, out)
        for w, u in out:
            rec(k + 1, u, acc + w)

    rec(0, frozenset(), 0.0)
    if not totals:
        return _NEG
    arr = np.array(totals)
    mx = arr.max()
    return float(mx + math.log(np.exp(arr - mx).sum()))


# ---------------------------------------------------------------------------
# line ensemble


@dataclass
class LineEnsemble:
    """Curves L_i(j), i = 1..depth, j = 1..2N-2i+2, centering included.

    Curve-3 entries where even extended precision could not resolve the
    Desnanot-Jacobi remainder are NaN; ``discarded`` counts them.
    """

    N: int
    theta: float
    curves: list
    centering: float
    discarded: int = 0

    def value(self, i: int, j: int) -> float:
        return float(self.curves[i - 1][j - 1])

    @property
    def depth(self) -> int:
        return len(self.curves)


def _positions(N, i):
    """(p, q) endpoint pairs for curve i, j = 1..2N-2i+2."""
    js = np.arange(1, 2 * N - 2 * i + 3)
    return js, N + js // 2, N - (js + 1) // 2 + 1


def build_line_ensemble(sym: SymWeightField, N: int, theta: float,
                        depth: int | None = None,
                        nan_on_cancel: bool = False) -> LineEnsemble:
    """L_i(j) = log(2 Z^{(i)}(p,q) / Z^{(i-1)}(p,q)) + 2 N psi(theta).

    with p = N + floor(j/2), q = N - ceil(j/2) + 1.  Depth defaults to
    min(N, 3).  Depths up to 3 use the stable pair-DP pipeline at any N;
    deeper curves go through the signed LGV expansion, which is reliable
    only on tiny lattices (N <= 6).  ``nan_on_cancel`` turns unresolvable
    curve-3 positions into NaN (with accounting) instead of raising.
    """
    if depth is None:
        depth = min(N, 3)
    if not 1 <= depth <= N:
        raise ValueError(f"depth must be in [1, N], got {depth}")
    if depth > 3 and N > 6:
        raise ValueError("depth > 3 is supported only for N <= 6 (LGV route)")
    centering = 2.0 * N * digamma(theta)
    discarded = 0

    t1 = _single_logZ_table(sym, 1)

    def z1(p, q):
        return float(t1[q - 1][p - 1]) if t1[q - 1] is not None else _NEG

    curves = []
    # curve 1 from the single-path table
    js, ps, qs = _positions(N, 1)
    curves.append(np.array([_LOG2 + z1(p, q) + centering
                            for p, q in zip(ps, qs)]))
    z2_low = z2_low_ld = None
    if depth >= 2:
        z2_low = pair_logZ_antidiags(sym, 1)

        def pair_low(p, q, ld=False):
            tab = z2_low_ld if ld else z2_low
            return float(tab[p + q - (2 * N - 1), p - 1])

        js, ps, qs = _positions(N, 2)
        vals = np.empty(js.size)
        prev_z = np.empty(js.size)
        for k, (p, q) in enumerate(zip(ps, qs)):
            prev_z[k] = z1(p, q)
            vals[k] = _LOG2 + pair_low(p, q) - prev_z[k] + centering
        curves.append(vals)
    if depth >= 3:
        t2 = _single_logZ_table(sym, 2)
        z2_high = pair_logZ_antidiags(sym, 2)
        z2_high_ld = None

        def pair_high(p, q, ld=False):
            tab = z2_high_ld if ld else z2_high
            return float(tab[p + q - (2 * N - 1), p - 1])

        js, ps, qs = _positions(N, 3)
        vals = np.empty(js.size)
        for k, (p, q) in enumerate(zip(ps, qs)):
            logz2 = float(z2_low[p + q - (2 * N - 1), p - 1])
            e1 = float(t2[q - 2][p - 1]) if t2[q - 2] is not None else _NEG
            try:
                logz3 = _dj_logdet3(
                    pair_low(p, q - 1), pair_high(p, q),
                    pair_low(p, q), pair_high(p, q - 1), e1,
                )
            except LgvCancellationError:
                if z2_low_ld is None:
                    z2_low_ld = pair_logZ_antidiags(sym, 1, longdouble=True)
                    z2_high_ld = pair_logZ_antidiags(sym, 2, longdouble=True)
                try:
                    logz3 = _dj_logdet3(
                        pair_low(p, q - 1, True), pair_high(p, q, True),
                        pair_low(p, q, True), pair_high(p, q - 1, True), e1,
                    )
                except LgvCancellationError:
                    if not nan_on_cancel:
                        raise
                    vals[k] = np.nan
                    discarded += 1
                    continue
            vals[k] = _LOG2 + logz3 - logz2 + centering
        curves.append(vals)
    for i in range(4, depth + 1):
        js, ps, qs = _positions(N, i)
        vals = np.array([
            _LOG2 + logZ_sym_lgv(sym, i, p, q) - logZ_sym_lgv(sym, i - 1, p, q)
            + centering
            for p, q in zip(ps, qs)
        ])
        curves.append(vals)
    return LineEnsemble(N=N, theta=theta, curves=curves, centering=centering,
                        discarded=discarded)


@dataclass
class OrderingReport:
    """Violation counts of the four staggered-ordering inequalities.

    NaN curve entries (unresolved determinants) are excluded from both
    counts and totals; ``skipped`` reports how many comparisons they cost.
    """

    slack: float
    counts: tuple
    totals: tuple
    skipped: int = 0

    @property
    def frequencies(self):
        return tuple(c / t if t else 0.0 for c, t in zip(self.counts, self.totals))


def _count_family(x, y, slack):
    """Count x > y + slack pairwise, ignoring NaNs; returns (bad, total, skipped)."""
    ok = ~(np.isnan(x) | np.isnan(y))
    return int(np.sum(x[ok] > y[ok] + slack)), int(ok.sum()), int((~ok).sum())


def ordering_report(ens: LineEnsemble, K: int, exponent: float) -> OrderingReport:
    """Count index pairs violating the (log N)^exponent ordering slack.

    Families: (1) L_i(2p+1) <= L_i(2p) + slack, (2) L_i(2p-1) <= L_i(2p) +
    slack, (3) L_{i+1}(2p) <= L_i(2p+1) + slack, (4) L_{i+1}(2p) <=
    L_i(2p-1) + slack.
    """
    if K > ens.depth:
        raise ValueError(f"requested depth {K} exceeds ensemble depth {ens.depth}")
    slack = math.log(ens.N) ** exponent
    counts = [0, 0, 0, 0]
    totals = [0, 0, 0, 0]
    skipped = 0
    for i in range(1, K + 1):
        li = ens.curves[i - 1]
        even = li[1::2]
        odd = li[0::2]
        npair = min(odd.size - 1, even.size)
        c, t, s = _count_family(odd[1 : npair + 1], even[:npair], slack)
        counts[0] += c; totals[0] += t; skipped += s
        npair = min(odd.size, even.size)
        c, t, s = _count_family(odd[:npair], even[:npair], slack)
        counts[1] += c; totals[1] += t; skipped += s
        if i + 1 <= ens.depth:
            lnext = ens.curves[i][1::2]
            npair = min(lnext.size, odd.size - 1)
            c, t, s = _count_family(lnext[:npair], odd[1 : npair + 1], slack)
            counts[2] += c; totals[2] += t; skipped += s
            npair = min(lnext.size, odd.size)
            c, t, s = _count_family(lnext[:npair], odd[:npair], slack)
            counts[3] += c; totals[3] += t; skipped += s
    return OrderingReport(slack=slack, counts=tuple(counts),
                          totals=tuple(totals), skipped=skipped)
