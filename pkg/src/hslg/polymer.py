"""Disorder generation and exact log-space partition functions.

The half-quadrant index set is I = {(i,j) : 1 <= j <= i}.  A materialized
:class:`LogWeightField` covers the staircase {j <= i, i+j <= 2N+1}, which is
everything any in-scope partition function can touch; the Monte Carlo
campaigns never materialize fields and instead stream rows through the
rolling DP in :func:`rolling_antidiag_logZ`.

All partition functions live permanently in log-space: Z grows like
e^{-2N psi(theta)} and leaves the double range at N in the tens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels
from .specfun import digamma

__all__ = [
    "PolymerParams",
    "LogWeightField",
    "FreeEnergyProcess",
    "gen_weights",
    "logZ_point",
    "brute_force_logZ",
    "count_paths_unit",
    "logZ_line",
    "antidiag_logZ_field",
    "rolling_antidiag_logZ",
    "free_energy_process",
]

_NEG_INF = -math.inf


@dataclass(frozen=True)
class PolymerParams:
    """Model parameters: bulk theta (scalar or sequence) and boundary alpha.

    ``mode`` chooses how alpha scales with N: "fixed" keeps it constant
    (supercritical zeta when positive), "critical" reads ``alpha`` as mu and
    uses mu * N^{-1/3}.
    """

    theta: float | tuple
    alpha: float
    mode: str = "fixed"

    def __post_init__(self):
        if self.mode not in ("fixed", "critical"):
            raise ValueError(f"unknown scaling mode {self.mode!r}")
        thetas = self.theta if isinstance(self.theta, tuple) else (self.theta,)
        if not all(t > 0 for t in thetas):
            raise ValueError("all theta values must be positive")

    @property
    def homogeneous(self) -> bool:
        return not isinstance(self.theta, tuple)

    def theta_at(self, i: int) -> float:
        if self.homogeneous:
            return float(self.theta)
        return float(self.theta[(i - 1) % len(self.theta)])

    def alpha_at(self, N: int) -> float:
        a = self.alpha if self.mode == "fixed" else self.alpha * N ** (-1.0 / 3.0)
        tmin = min(self.theta) if not self.homogeneous else self.theta
        if not a + tmin > 0:
            raise ValueError(f"alpha + min(theta) must be positive, got {a + tmin}")
        return float(a)


def _row_len(i: int, N: int) -> int:
    # coverage of the materialized field: j <= i and i + j <= 2N+1
    return min(i, 2 * N + 1 - i)


@dataclass
class LogWeightField:
    """Seeded lattice of log-weights on the half-quadrant staircase."""

    N: int
    seed: int
    params: PolymerParams
    rows: list = dc_field(repr=False, default_factory=list)

    def logw(self, i: int, j: int) -> float:
        if not (1 <= j <= i and i + j <= 2 * self.N + 1):
            raise IndexError(f"({i},{j}) outside the stored staircase")
        return float(self.rows[i - 1][j - 1])


def gen_weights(N: int, params: PolymerParams, seed: int) -> LogWeightField:
    """Draw the disorder; deterministic in (seed, N, params).

    Off-diagonal sites carry -log Gamma(theta_i + theta_j) and diagonal
    sites -log Gamma(alpha + theta_j); weights are stored in log form and
    never exponentiated.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    alpha = params.alpha_at(N)
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), int(N))))
    rows = []
    for i in range(1, 2 * N + 1):
        L = _row_len(i, N)
        if L <= 0:
            rows.append(np.empty(0))
            continue
        if params.homogeneous:
            shape = np.full(L, 2.0 * params.theta)
        else:
            shape = np.array(
                [params.theta_at(i) + params.theta_at(j) for j in range(1, L + 1)]
            )
        if L >= i:  # diagonal site (i,i) is inside this row
            shape[i - 1] = alpha + params.theta_at(i)
        rows.append(-np.log(rng.gamma(shape)))
    return LogWeightField(N=N, seed=int(seed), params=params, rows=rows)


def logZ_point(field: LogWeightField, m: int, n: int) -> float:
    """Point-to-point log partition function by the row DP.

    log Z(i,j) = log W_{i,j} + logaddexp(log Z(i-1,j), log Z(i,j-1)) with
    log Z = -inf outside the half-quadrant and log Z(1,1) = log W_{1,1}.
    """
    if not (1 <= n <= m):
        raise ValueError(f"target ({m},{n}) outside the half-quadrant")
    if m + n > 2 * field.N + 1:
        raise ValueError(
            f"target ({m},{n}) beyond the stored staircase (i+j <= {2*field.N+1})"
        )
    prev = np.empty(0)
    for i in range(1, m + 1):
        L = min(_row_len(i, field.N), i, n)
        cur = np.empty(L)
        _kernels.scan_row(prev, field.rows[i - 1][:L], cur, i == 1)
        prev = cur
    return float(prev[n - 1])


def count_paths_unit(m: int, n: int):
    """Exact integer count of half-quadrant up-right paths (1,1)->(m,n)."""
    if not (1 <= n <= m):
        raise ValueError("target outside the half-quadrant")
    prev = []
    for i in range(1, m + 1):
        cur = []
        for j in range(1, min(i, n) + 1):
            if i == 1 and j == 1:
                cur.append(1)
                continue
            up = prev[j - 1] if j <= len(prev) else 0
            left = cur[j - 2] if j >= 2 else 0
            cur.append(up + left)
        prev = cur
    return prev[n - 1]


def brute_force_logZ(field: LogWeightField, m: int, n: int) -> float:
    """Exhaustive directed-path enumeration; oracle for the DP.

    Refuses targets with m + n > 22 (enumeration budget).
    """
    if m + n > 22:
        raise ValueError("enumeration budget is m + n <= 22")
    if not (1 <= n <= m):
        raise ValueError("target outside the half-quadrant")
    logs = []

    def walk(i, j, acc):
        acc = acc + field.logw(i, j)
        if (i, j) == (m, n):
            logs.append(acc)
            return
        if i + 1 <= m:
            walk(i + 1, j, acc)
        if j + 1 <= min(i, n):
            walk(i, j + 1, acc)

    walk(1, 1, 0.0)
    if not logs:
        raise ValueError(f"no admissible path to ({m},{n})")
    arr = np.array(logs)
    mx = arr.max()
    return float(mx + math.log(np.exp(arr - mx).sum()))


def antidiag_logZ_field(field: LogWeightField, jmax: int | None = None) -> np.ndarray:
    """log Z(N+j, N-j) for j = 0..jmax from a materialized field, one DP pass."""
    N = field.N
    if jmax is None:
        jmax = N - 1
    if not 0 <= jmax <= N - 1:
        raise ValueError("jmax must lie in [0, N-1]")
    out = np.empty(jmax + 1)
    prev = np.empty(0)
    for i in range(1, N + jmax + 1):
        L = min(i, 2 * N - i)
        cur = np.empty(L)
        _kernels.scan_row(prev, field.rows[i - 1][:L], cur, i == 1)
        if i >= N:
            out[i - N] = cur[2 * N - i - 1]
        prev = cur
    return out


def logZ_line(field: LogWeightField, k: float, N: int | None = None) -> float:
    """Point-to-(partial)line log partition function.

    logsumexp over the endpoint family (N+j, N-j) for j >= ceil(k); the
    formal j = N term has no lattice endpoint and contributes nothing, so
    ceil(k) must be at most N-1 for the sum to be non-empty.
    """
    N = field.N if N is None else N
    j0 = math.ceil(k)
    if k > N:
        raise ValueError(f"k={k} exceeds N={N}")
    if j0 < 0:
        j0 = 0
    if j0 > N - 1:
        raise ValueError("empty endpoint family: ceil(k) must be <= N-1")
    vals = antidiag_logZ_field(field)[j0:]
    mx = vals.max()
    return float(mx + math.log(np.exp(vals - mx).sum()))


def rolling_antidiag_logZ(
    N: int,
    params: PolymerParams,
    rng: np.random.Generator,
    full_line: bool = True,
) -> np.ndarray:
    """One disorder sample of (log Z(N+j, N-j))_{j=0..N-1}, O(N) memory.

    Weight rows are drawn from ``rng`` and consumed immediately by the row
    scan; with ``full_line=False`` only log Z(N,N) is computed (half the
    lattice) and a length-1 array is returned.  Only the homogeneous model
    is supported here; campaigns are homogeneous by construction.
    """
    if not params.homogeneous:
        raise ValueError("rolling campaigns support the homogeneous model only")
    theta = float(params.theta)
    alpha = params.alpha_at(N)
    rows_end = 2 * N - 1 if full_line else N
    lens = [min(i, 2 * N - i) if full_line else min(i, N) for i in range(1, rows_end + 1)]
    offs = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    total = int(offs[-1])
    w = -np.log(rng.gamma(2.0 * theta, size=total))
    # diagonal sites (i,i), present while i <= N
    diag_rows = [i for i in range(1, rows_end + 1) if lens[i - 1] >= i]
    diag_pos = np.array([offs[i - 1] + i - 1 for i in diag_rows], dtype=np.int64)
    w[diag_pos] = -np.log(rng.gamma(alpha + theta, size=diag_pos.size))

    out = np.empty(N if full_line else 1)
    prev = np.empty(0)
    for i in range(1, rows_end + 1):
        L = lens[i - 1]
        cur = np.empty(L)
        _kernels.scan_row(prev, w[offs[i - 1]:offs[i]], cur, i == 1)
        if full_line and i >= N:
            out[i - N] = cur[2 * N - i - 1]
        prev = cur
    if not full_line:
        out[0] = prev[N - 1]
    return out


@dataclass
class FreeEnergyProcess:
    """Centered, scaled free energy F(s) on [0, r], linearly interpolated."""

    N: int
    alpha: float
    grid: np.ndarray
    values: np.ndarray
    lattice_s: np.ndarray = dc_field(repr=False, default=None)
    lattice_values: np.ndarray = dc_field(repr=False, default=None)

    def __call__(self, s):
        return np.interp(s, self.lattice_s, self.lattice_values)


def free_energy_process(
    field: LogWeightField, N: int, alpha: float, r: float, grid
) -> FreeEnergyProcess:
    """F(s) = (log Z(N+sN^{2/3}, N-sN^{2/3}) + 2N psi(theta)) / N^{1/3}.

    Evaluated at lattice-admissible s = j / N^{2/3} and linearly
    interpolated on ``grid``, which must lie inside [0, r].
    """
    if N < max(3, r ** 3):
        raise ValueError(f"need N >= max(3, r^3), got N={N}, r={r}")
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < 0 or grid.max() > r):
        raise ValueError("grid must lie inside [0, r]")
    if not field.params.homogeneous:
        raise ValueError("free energy centering requires the homogeneous model")
    theta = float(field.params.theta)
    scale = N ** (2.0 / 3.0)
    jmax = min(int(math.floor(r * scale)), N - 1)
    lat = antidiag_logZ_field(field, jmax)
    center = 2.0 * N * digamma(theta)
    lat_f = (lat + center) / N ** (1.0 / 3.0)
    lat_s = np.arange(jmax + 1) / scale
    vals = np.interp(grid, lat_s, lat_f)
    return FreeEnergyProcess(
        N=N, alpha=alpha, grid=grid, values=vals,
        lattice_s=lat_s, lattice_values=lat_f,
    )
