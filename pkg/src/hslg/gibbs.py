"""HSLG Gibbs measures on bounded domains of the colored graph.

The graph on Z^2_{>=1} carries three kinds of directed edges:

* blue, within a curve: (i, 2m-1) -> (i, 2m) and (i, 2m+1) -> (i, 2m),
  weight exp(theta x - e^x) in the head-minus-tail difference x;
* black, between curves: (i+1, 2m) -> (i, 2m-1) and (i+1, 2m) -> (i, 2m+1),
  weight exp(-e^x) (the soft non-intersection);
* red, at the wall: (2i-1, 1) -> (2i, 1), weight exp(-alpha x).

Every single-site conditional is then proportional to
exp(c*u - A*e^u - B*e^{-u}) where A collects exp(-x) over blue/black edge
heads and B collects exp(x) over tails; +inf and -inf boundary data drop
the corresponding terms through the exponentials.  Red factors are kept in
their per-vertex form exp((-1)^i alpha u_{i,1}), which equals the edge form
up to boundary constants and stays finite for bottom-free data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.special import kve as _kve

from . import _kernels
from .dist import GridSampler, QDistSpec, q_dist

__all__ = [
    "ColoredDomain",
    "GibbsSpec",
    "GibbsState",
    "CouplingOrderError",
    "domain_kkt",
    "domain_kkt_prime",
    "domain_lambda_star",
    "log_density",
    "site_conditional",
    "SiteConditional",
    "heat_bath_sweep",
    "MonotoneCoupledChains",
    "BottomFreeSample",
    "bottom_free_sample",
    "v_normalizer_estimate",
    "two_sided_conditional_sample",
]

_NEG = -math.inf
_POS = math.inf


class CouplingOrderError(AssertionError):
    """The monotone coupling produced an order violation beyond tolerance."""


def _blue_neighbors(v):
    """(source, target) blue edges incident to v, as (other, is_outgoing)."""
    i, j = v
    out = []
    if j % 2 == 1:  # odd: outgoing to the even neighbors
        if j - 1 >= 1:
            out.append(((i, j - 1), True))
        out.append(((i, j + 1), True))
    else:  # even: incoming from the odd neighbors
        out.append(((i, j - 1), False))
        out.append(((i, j + 1), False))
    return out


def _black_neighbors(v):
    i, j = v
    out = []
    if j % 2 == 0:  # even: outgoing to curve i-1
        if i >= 2:
            if j - 1 >= 1:
                out.append(((i - 1, j - 1), True))
            out.append(((i - 1, j + 1), True))
    else:  # odd: incoming from curve i+1
        if j - 1 >= 1:
            out.append(((i + 1, j - 1), False))
        out.append(((i + 1, j + 1), False))
    return out


def _red_partner(v):
    i, j = v
    if j != 1:
        return None
    return (i + 1, 1) if i % 2 == 1 else (i - 1, 1)


@dataclass
class ColoredDomain:
    """A bounded vertex set with its induced colored edges and boundary.

    ``boundary`` maps every vertex of the graph-theoretic boundary (vertices
    outside the domain touching it by an edge) to its pinned value; +/-inf
    are admitted and implement the one-sided conventions.
    """

    vertices: list
    boundary: dict
    theta: float
    alpha: float

    def __post_init__(self):
        self.vset = set(self.vertices)
        missing = self._boundary_vertices() - set(self.boundary)
        if missing:
            raise ValueError(f"boundary values missing for {sorted(missing)}")
        self._compiled = None

    def _boundary_vertices(self):
        out = set()
        for v in self.vertices:
            for w, _ in _blue_neighbors(v) + _black_neighbors(v):
                if w not in self.vset and w[0] >= 1 and w[1] >= 1:
                    out.add(w)
            # red partners are handled as vertex weights and need no value
        return out

    def theta_of(self, v, w) -> float:
        """Blue-edge parameter; homogeneous unless overridden."""
        return self.theta

    # -- compiled arrays for the sweep kernels ------------------------------

    def compiled(self):
        if self._compiled is None:
            self._compiled = _compile(self)
        return self._compiled


@dataclass
class _Compiled:
    order: np.ndarray          # interior site indices in lexicographic scan order
    index: dict                # vertex -> slot
    n_slots: int
    c_lin: np.ndarray
    a_indptr: np.ndarray
    a_idx: np.ndarray
    b_indptr: np.ndarray
    b_idx: np.ndarray
    boundary_slots: dict       # vertex -> slot for boundary vertices
    template: np.ndarray       # values array with boundary entries filled


def _compile(dom: ColoredDomain) -> _Compiled:
    interior = sorted(dom.vertices)
    bverts = sorted(dom._boundary_vertices())
    index = {v: k for k, v in enumerate(interior)}
    nb_off = len(interior)
    for k, v in enumerate(bverts):
        index[v] = nb_off + k
    n = len(interior) + len(bverts)
    template = np.zeros(n)
    for v in bverts:
        template[index[v]] = dom.boundary[v]
    c_lin = np.zeros(len(interior))
    a_lists, b_lists = [], []
    for v in interior:
        i, j = v
        a_l, b_l = [], []
        for w, outgoing in _blue_neighbors(v):
            if w in index:
                th = dom.theta_of(v, w)
                if outgoing:
                    c_lin[index[v]] += th
                    a_l.append(index[w])
                else:
                    c_lin[index[v]] -= th
                    b_l.append(index[w])
        for w, outgoing in _black_neighbors(v):
            if w in index:
                if outgoing:
                    a_l.append(index[w])
                else:
                    b_l.append(index[w])
        if j == 1:
            c_lin[index[v]] += dom.alpha if i % 2 == 0 else -dom.alpha
        a_lists.append(a_l)
        b_lists.append(b_l)
    a_indptr = np.zeros(len(interior) + 1, dtype=np.int64)
    b_indptr = np.zeros(len(interior) + 1, dtype=np.int64)
    for k in range(len(interior)):
        a_indptr[k + 1] = a_indptr[k] + len(a_lists[k])
        b_indptr[k + 1] = b_indptr[k] + len(b_lists[k])
    a_idx = np.array([x for l in a_lists for x in l], dtype=np.int64)
    b_idx = np.array([x for l in b_lists for x in l], dtype=np.int64)
    return _Compiled(
        order=np.arange(len(interior), dtype=np.int64),
        index=index,
        n_slots=n,
        c_lin=c_lin,
        a_indptr=a_indptr,
        a_idx=a_idx,
        b_indptr=b_indptr,
        b_idx=b_idx,
        boundary_slots={v: index[v] for v in bverts},
        template=template,
    )


# ---------------------------------------------------------------------------
# domain presets


def domain_kkt(k: int, T: int, y, z, alpha: float, theta: float) -> ColoredDomain:
    """K_{k,T} = {(i,j): i in [1,k], j in [1, 2T-1-(i==1)]} with boundary (y, z).

    z_j pins (k+1, 2j) for j in [1,T]; y_1 pins (1, 2T-1) and y_i pins
    (i, 2T) for i in [2,k].  Entries of z may be -inf (bottom-free).
    """
    y = list(np.atleast_1d(np.asarray(y, dtype=float)))
    z = list(np.atleast_1d(np.asarray(z, dtype=float)))
    if len(y) != k or len(z) != T:
        raise ValueError(f"need len(y)=k={k} and len(z)=T={T}")
    verts = [
        (i, j)
        for i in range(1, k + 1)
        for j in range(1, 2 * T - 1 - (1 if i == 1 else 0) + 1)
    ]
    boundary = {(k + 1, 2 * j): z[j - 1] for j in range(1, T + 1)}
    boundary[(1, 2 * T - 1)] = y[0]
    for i in range(2, k + 1):
        boundary[(i, 2 * T)] = y[i - 1]
    return ColoredDomain(vertices=verts, boundary=boundary, theta=theta,
                         alpha=alpha)


def domain_kkt_prime(k: int, T: int, y, w, alpha: float, theta: float) -> ColoredDomain:
    """K'_{k,T} = [1,k] x [1, 2T-2] with boundary (y, w).

    w_j pins (k+1, 2j) for j in [1, T-1]; y_i pins (i, 2T-1) for all i.
    """
    y = list(np.atleast_1d(np.asarray(y, dtype=float)))
    w = list(np.atleast_1d(np.asarray(w, dtype=float)))
    if len(y) != k or len(w) != T - 1:
        raise ValueError(f"need len(y)=k={k} and len(w)=T-1={T-1}")
    verts = [(i, j) for i in range(1, k + 1) for j in range(1, 2 * T - 2 + 1)]
    boundary = {(k + 1, 2 * j): w[j - 1] for j in range(1, T)}
    for i in range(1, k + 1):
        boundary[(i, 2 * T - 1)] = y[i - 1]
    return ColoredDomain(vertices=verts, boundary=boundary, theta=theta,
                         alpha=alpha)


def domain_lambda_star(N: int, values, alpha: float, theta: float) -> ColoredDomain:
    """Lambda_N^* = {(i,j): i in [1,N-1], j in [1, 2N-2i+1]}.

    ``values`` maps line-ensemble coordinates (i,j) in K_N to numbers; the
    boundary takes the last entry of each curve, (N,2), and (N,1) when N is
    even, from it.  Boundary vertices outside K_N get -inf (their black
    factors are absent from the conditional law).
    """
    verts = [
        (i, j) for i in range(1, N) for j in range(1, 2 * N - 2 * i + 1 + 1)
    ]
    dom = ColoredDomain.__new__(ColoredDomain)
    dom.vertices = verts
    dom.theta = theta
    dom.alpha = alpha
    dom.vset = set(verts)
    boundary = {}
    for v in sorted(dom._boundary_vertices()):
        i, j = v
        if j <= 2 * N - 2 * i + 2:  # inside K_N
            boundary[v] = float(values[(i, j)])
        else:
            boundary[v] = _NEG
    dom.boundary = boundary
    dom._compiled = None
    missing = dom._boundary_vertices() - set(boundary)
    if missing:
        raise ValueError(f"boundary values missing for {sorted(missing)}")
    return dom


# ---------------------------------------------------------------------------
# density and conditionals


@dataclass
class GibbsState:
    """Interior values, stored on the compiled slot layout."""

    domain: ColoredDomain
    values: np.ndarray  # full slot array (interior + boundary)

    def value(self, v) -> float:
        return float(self.values[self.domain.compiled().index[v]])

    def interior_vector(self) -> np.ndarray:
        comp = self.domain.compiled()
        return self.values[: len(comp.order)].copy()


@dataclass
class GibbsSpec:
    """A colored domain together with its (theta, alpha) parameters."""

    domain: ColoredDomain

    @property
    def theta(self):
        return self.domain.theta

    @property
    def alpha(self):
        return self.domain.alpha

    def new_state(self, interior=None) -> GibbsState:
        comp = self.domain.compiled()
        vals = comp.template.copy()
        if interior is not None:
            interior = np.asarray(interior, dtype=float)
            if interior.size != len(comp.order):
                raise ValueError(
                    f"state has {interior.size} entries, domain needs "
                    f"{len(comp.order)}"
                )
            vals[: len(comp.order)] = interior
        return GibbsState(domain=self.domain, values=vals)


def log_density(spec: GibbsSpec, state: GibbsState) -> float:
    """Unnormalized log-density: sum of edge log-weights plus red vertex terms.

    Boundary +/-inf entries make their black factors 1/0 through the
    exponentials; a -inf black tail contributes 0 (the factor is 1) and a
    +inf black head likewise.
    """
    dom = spec.domain
    comp = dom.compiled()
    vals = state.values
    if vals.shape != comp.template.shape:
        raise ValueError("state does not match the domain layout")
    total = 0.0
    for v in dom.vertices:
        i, j = v
        uv = vals[comp.index[v]]
        for w, outgoing in _blue_neighbors(v):
            if outgoing and w in comp.index:
                x = uv - vals[comp.index[w]]
                total += dom.theta_of(v, w) * x - math.exp(x)
        for w, outgoing in _black_neighbors(v):
            if outgoing and w in comp.index:
                x = uv - vals[comp.index[w]]
                total += -math.exp(x)
            elif not outgoing and w in comp.index and w not in dom.vset:
                # incoming black from a boundary vertex
                x = vals[comp.index[w]] - uv
                total += -math.exp(x)
        if j == 1:
            total += (dom.alpha if i % 2 == 0 else -dom.alpha) * uv
    # blue edges from boundary odd vertices into interior even vertices
    for w in comp.boundary_slots:
        i, j = w
        if j % 2 == 1:
            for t, outgoing in _blue_neighbors(w):
                if outgoing and t in dom.vset:
                    x = vals[comp.index[w]] - vals[comp.index[t]]
                    total += dom.theta_of(w, t) * x - math.exp(x)
    return float(total)


@dataclass
class SiteConditional:
    """The 1D conditional exp(c*u - A e^u - B e^{-u}), normalized.

    Log-concave by inspection (its second log-derivative is -A e^u -
    B e^{-u}).  ``sample``/``quantile`` default to the adaptive grid
    machinery from :mod:`hslg.dist`; ``quantile_exact`` is the compiled
    gamma/Bessel path used by the sweep kernels.
    """

    c: float
    a_coef: float
    b_coef: float

    def __post_init__(self):
        if self.a_coef < 0 or self.b_coef < 0:
            raise ValueError("negative edge coefficient")
        if not np.isfinite(self.a_coef) or not np.isfinite(self.b_coef):
            raise ValueError("site conditional degenerate (infinite coefficient)")
        if self.a_coef == 0 and self.b_coef == 0:
            raise ValueError("site conditional non-integrable (no edge mass)")
        if self.a_coef == 0 and self.c >= 0:
            raise ValueError("non-integrable site conditional (B>0 needs c<0)")
        if self.b_coef == 0 and self.c <= 0:
            raise ValueError("non-integrable site conditional (A>0 needs c>0)")
        self._log_norm = self._compute_log_norm()
        self._grid = None

    def _compute_log_norm(self) -> float:
        c, A, B = self.c, self.a_coef, self.b_coef
        if B == 0.0:
            return math.lgamma(c) - c * math.log(A)
        if A == 0.0:
            return math.lgamma(-c) + c * math.log(B)
        x = 2.0 * math.sqrt(A * B)
        # int t^{c-1} e^{-At-B/t} dt = 2 (B/A)^{c/2} K_c(2 sqrt(AB))
        return (
            math.log(2.0)
            + 0.5 * c * (math.log(B) - math.log(A))
            + math.log(float(_kve(c, x)))
            - x
        )

    def logpdf(self, u):
        u = np.asarray(u, dtype=float)
        out = (
            self.c * u
            - self.a_coef * np.exp(u)
            - self.b_coef * np.exp(-u)
            - self._log_norm
        )
        return out if out.ndim else float(out)

    def _ensure_grid(self):
        if self._grid is None:
            # locate the mode and a generous support window
            if self.a_coef > 0 and self.b_coef > 0:
                t = (self.c + math.sqrt(self.c**2 + 4 * self.a_coef * self.b_coef)) / (
                    2 * self.a_coef
                )
                mode = math.log(t)
                sd = 1.0 / math.sqrt(self.a_coef * t + self.b_coef / t)
            elif self.b_coef == 0.0:
                mode = math.log(self.c / self.a_coef)
                sd = 1.0 / math.sqrt(self.c)
            else:
                mode = -math.log(-self.c / self.b_coef)
                sd = 1.0 / math.sqrt(-self.c)
            half = 50.0 * max(sd, 1.0 / max(abs(self.c), 0.5))
            self._grid = GridSampler(self.logpdf, mode - half, mode + half)
        return self._grid

    def cdf(self, u):
        return self._ensure_grid().cdf(u)

    def quantile(self, p):
        return self._ensure_grid().quantile(p)

    def quantile_exact(self, p) -> float:
        return _kernels.site_quantile(self.c, self.a_coef, self.b_coef, float(p))

    def sample(self, rng, size=None):
        return self._ensure_grid().sample(rng, size=size)

    def as_qdist_spec(self):
        """When the site has exactly two blue edges of one orientation, the
        conditional is a q-distribution; returns the matching spec or None."""
        return None  # resolved by the caller, which knows the neighbors


def site_conditional(spec: GibbsSpec, state: GibbsState, v) -> SiteConditional:
    """Conditional law at v given every neighbor, from the compiled arrays."""
    comp = spec.domain.compiled()
    if v not in spec.domain.vset:
        raise ValueError(f"{v} is not an interior vertex")
    s = comp.index[v]
    a_coef = float(np.sum(np.exp(-state.values[comp.a_idx[comp.a_indptr[s]:comp.a_indptr[s + 1]]])))
    b_coef = float(np.sum(np.exp(state.values[comp.b_idx[comp.b_indptr[s]:comp.b_indptr[s + 1]]])))
    return SiteConditional(c=float(comp.c_lin[s]), a_coef=a_coef, b_coef=b_coef)


def heat_bath_sweep(spec: GibbsSpec, state: GibbsState, rng,
                    uniforms=None, n_sweeps: int = 1) -> GibbsState:
    """Systematic-scan heat-bath passes; the target density is stationary.

    Sites are visited in lexicographic order; each is redrawn from its full
    conditional by inverse transform.  Passing ``uniforms`` (``n_sweeps``
    per interior site) instead of ``rng`` reuses an external stream, which
    is how the monotone coupling shares randomness.
    """
    comp = spec.domain.compiled()
    if uniforms is None:
        uniforms = rng.uniform(size=n_sweeps * len(comp.order))
    _kernels.heat_bath_sweep(
        state.values, comp.order, comp.c_lin,
        comp.a_indptr, comp.a_idx, comp.b_indptr, comp.b_idx,
        np.asarray(uniforms, dtype=float).ravel(),
    )
    return state


class MonotoneCoupledChains:
    """Heat-bath chains driven by common uniforms, one per boundary datum.

    Boundary data must be totally ordered pairwise; every sweep then
    preserves the pointwise order of the chains (each site conditional's
    quantile is non-decreasing in the neighbors), which is asserted after
    every sweep up to ``tol``.
    """

    def __init__(self, specs, init_states=None, tol: float = 1e-12):
        self.specs = list(specs)
        comps = [s.domain.compiled() for s in self.specs]
        n = len(comps[0].order)
        for c in comps[1:]:
            if len(c.order) != n:
                raise ValueError("coupled chains need identical domains")
        # check boundary ordering
        for lo, hi in zip(self.specs, self.specs[1:]):
            for v, slot in lo.domain.compiled().boundary_slots.items():
                a = lo.domain.compiled().template[slot]
                b = hi.domain.compiled().template[
                    hi.domain.compiled().boundary_slots[v]
                ]
                if a > b:
                    raise ValueError(
                        f"boundary data not ordered at {v}: {a} > {b}"
                    )
        if init_states is None:
            init_states = [s.new_state() for s in self.specs]
            # start from the boundary-consistent template with interiors at
            # increasing constants so the initial order holds
            for k, st in enumerate(init_states):
                st.values[:n] = k * 1.0
        self.states = init_states
        self.tol = tol
        self.sweeps = 0
        self.max_violation = 0.0

    def sweep(self, rng):
        n = len(self.specs[0].domain.compiled().order)
        uniforms = rng.uniform(size=n)
        for spec, st in zip(self.specs, self.states):
            heat_bath_sweep(spec, st, None, uniforms=uniforms)
        self.sweeps += 1
        for lo, hi in zip(self.states, self.states[1:]):
            gap = float(np.max(lo.values[:n] - hi.values[:n]))
            if gap > self.max_violation:
                self.max_violation = gap
            if gap > self.tol:
                raise CouplingOrderError(
                    f"order violated by {gap:g} at sweep {self.sweeps}"
                )
        return self.states


# ---------------------------------------------------------------------------
# bottom-free measures


@dataclass
class BottomFreeSample:
    """Curves from a bottom-free draw plus its importance log-weight.

    ``log_weight`` is 0 for the exact k=1 route; for k=2 it carries log W^cr
    (critical) or log W^sc (supercritical), to be used self-normalized.
    """

    k: int
    T: int
    curves: dict  # (i, j) -> value
    log_weight: float
    method: str

    def curve(self, i: int) -> np.ndarray:
        js = sorted(j for (ci, j) in self.curves if ci == i)
        return np.array([self.curves[(i, j)] for j in js])


def bottom_free_sample(k: int, T: int, y, alpha: float, theta: float, rng,
                       method: str = "auto") -> BottomFreeSample:
    """One draw from the bottom-free measure on K_{k,T} with top data y.

    k=1 is exact: the odd points are a random walk with increment law
    G_{theta+alpha,1} * G_{theta-alpha,-1} pinned at y_1, and the even
    points are conditionally q-distributed.  k=2 returns a weighted draw:
    ``method='critical'`` samples the independent-curve reference law and
    reports log W^cr; ``method='supercritical'`` samples the paired-random-
    walk base law with the entrance factor and reports log W^sc (the
    deferred soft non-intersection weight).  Expectations under the true
    measure are self-normalized averages over many such draws.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if k == 1:
        if not (-theta < alpha < theta):
            raise ValueError("k=1 bottom-free needs alpha in (-theta, theta)")
        if y.size != 1:
            raise ValueError("k=1 needs a single y value")
        # odd points leftward from the pin: increments G_{t-a,1}*G_{t+a,-1}
        n_odd = T - 1
        incs = np.log(rng.gamma(theta - alpha, size=n_odd)) - np.log(
            rng.gamma(theta + alpha, size=n_odd)
        )
        odd = np.empty(T)
        odd[-1] = y[0]  # position 2T-1 (boundary pin)
        for m in range(T - 2, -1, -1):
            odd[m] = odd[m + 1] + incs[T - 2 - m]
        curves = {}
        for m in range(T - 1):  # interior odd points 1, 3, ..., 2T-3
            curves[(1, 2 * m + 1)] = float(odd[m])
        for m in range(1, T):  # even points 2, ..., 2T-2
            qd = q_dist(QDistSpec(theta - alpha, theta + alpha, +1,
                                  odd[m - 1], odd[m]))
            curves[(1, 2 * m)] = float(qd.sample_exact(rng))
        return BottomFreeSample(k=1, T=T, curves=curves, log_weight=0.0,
                                method="exact")

    if k != 2:
        raise ValueError("only k in {1, 2} is supported")
    if y.size != 2:
        raise ValueError("k=2 needs two y values")
    if method == "auto":
        method = "supercritical" if alpha > 0 else "critical"

    curves = {}
    if method == "critical":
        if not (0 < alpha < theta):
            raise ValueError("critical route needs alpha in (0, theta)")
        # curve 1: as in k=1 (odd walk + q fills), pinned at y_1 = L_1(2T-1)
        n_odd = T - 1
        incs = np.log(rng.gamma(theta - alpha, size=n_odd)) - np.log(
            rng.gamma(theta + alpha, size=n_odd)
        )
        odd = np.empty(T)
        odd[-1] = y[0]
        for m in range(T - 2, -1, -1):
            odd[m] = odd[m + 1] + incs[T - 2 - m]
        for m in range(T - 1):
            curves[(1, 2 * m + 1)] = float(odd[m])
        for m in range(1, T):
            qd = q_dist(QDistSpec(theta - alpha, theta + alpha, +1,
                                  odd[m - 1], odd[m]))
            curves[(1, 2 * m)] = float(qd.sample_exact(rng))
        # curve 2: even points walk pinned at y_2 = L_2(2T); its leftward
        # increments have the opposite drift of curve 1 (the curves close up
        # toward the wall): law log Gamma(theta+alpha) - log Gamma(theta-alpha)
        incs2 = np.log(rng.gamma(theta + alpha, size=n_odd)) - np.log(
            rng.gamma(theta - alpha, size=n_odd)
        )
        even = np.empty(T)
        even[-1] = y[1]
        for m in range(T - 2, -1, -1):
            even[m] = even[m + 1] + incs2[T - 2 - m]
        for m in range(T - 1):  # interior evens 2, 4, ..., 2T-2
            curves[(2, 2 * (m + 1))] = float(even[m])
        # odd fills: L_2(2k+1) ~ q_{t-a,t+a;-1}(L_2(2k), L_2(2k+2))
        for m in range(1, T - 1):
            qd = q_dist(QDistSpec(theta - alpha, theta + alpha, -1,
                                  even[m - 1], even[m]))
            curves[(2, 2 * m + 1)] = float(qd.sample_exact(rng))
        # L_2(2T-1) between even[T-2] (= L_2(2T-2)) and the boundary y_2
        qd = q_dist(QDistSpec(theta - alpha, theta + alpha, -1,
                              even[T - 2], y[1]))
        curves[(2, 2 * T - 1)] = float(qd.sample_exact(rng))
        curves[(2, 1)] = float(
            even[0] + np.log(rng.gamma(theta + alpha))
        )
        lw = 0.0
        for kk in range(1, T):
            l2 = curves[(2, 2 * kk)]
            l1a = curves[(1, 2 * kk - 1)]
            l1b = y[0] if 2 * kk + 1 == 2 * T - 1 else curves[(1, 2 * kk + 1)]
            lw -= math.exp(l2 - l1a) + math.exp(l2 - l1b)
        return BottomFreeSample(k=2, T=T, curves=curves, log_weight=lw,
                                method="critical")

    if method == "supercritical":
        # deferred import: walks depends on dist only, no cycle at runtime
        from .walks import prw_sample, wsc_weight

        if not alpha > 0:
            raise ValueError("supercritical route needs alpha > 0")
        sample = prw_sample(T, float(y[0]), float(y[1]), alpha, theta, rng)
        s1, s2 = sample.s1, sample.s2
        for jdx in range(1, T):  # interior skeleton points
            curves[(1, 2 * jdx - 1)] = float(s1[jdx - 1])
            curves[(2, 2 * jdx)] = float(s2[jdx - 1])
        # fills: L_1(2k) ~ q_{t,t;+1}, L_2(2k+1) ~ q_{t,t;-1}
        for kk in range(1, T):
            qd = q_dist(QDistSpec(theta, theta, +1, float(s1[kk - 1]),
                                  float(s1[kk])))
            curves[(1, 2 * kk)] = float(qd.sample_exact(rng))
        for kk in range(1, T):
            qd = q_dist(QDistSpec(theta, theta, -1, float(s2[kk - 1]),
                                  float(s2[kk])))
            curves[(2, 2 * kk + 1)] = float(qd.sample_exact(rng))
        curves[(2, 1)] = float(s2[0] + np.log(rng.gamma(alpha + theta)))
        lw = wsc_weight(s1, s2)
        return BottomFreeSample(k=2, T=T, curves=curves, log_weight=lw,
                                method="supercritical")

    raise ValueError(f"unknown method {method!r}")


def _triple_w(a, b, c) -> float:
    """log W(a; b, c) = -e^{a-b} - e^{a-c} with +/-inf conventions."""
    out = 0.0
    for t in (b, c):
        if a == _NEG or t == _POS:
            continue
        out -= math.exp(a - t)
    return out


def v_normalizer_estimate(y, z, k: int, T: int, n_samples: int, alpha: float,
                          theta: float, rng, method: str = "auto"):
    """Monte Carlo estimate of the bottom-to-full reweighting normalizer.

    Mean over bottom-free samples of prod_j W(z_j; L_k(2j+1), L_k(2j-1))
    with the L_k(2T+1) = +inf convention (z_j sits at position (k+1, 2j)).
    Weighted samples (k=2 routes) enter self-normalized.  Returns
    (estimate, standard_error).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.size != T:
        raise ValueError("need len(z) = T")
    vals = np.empty(n_samples)
    logw = np.empty(n_samples)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    for s in range(n_samples):
        smp = bottom_free_sample(k, T, y, alpha, theta, rng, method=method)
        acc = 0.0
        for j in range(1, T + 1):
            lo = smp.curves.get((k, 2 * j - 1))
            if lo is None:  # boundary pin y_1 at (1, 2T-1) for k=1
                lo = y[0] if (k == 1 and 2 * j - 1 == 2 * T - 1) else None
            hi = smp.curves.get((k, 2 * j + 1), _POS)
            if k == 2 and 2 * j + 1 == 2 * T + 1:
                hi = _POS
            if k == 1 and 2 * j - 1 == 2 * T - 1:
                lo = y[0]
            acc += _triple_w(z[j - 1], hi, lo)
        vals[s] = math.exp(acc)
        logw[s] = smp.log_weight
    w = np.exp(logw - logw.max())
    w /= w.sum()
    est = float(np.sum(w * vals))
    ess = 1.0 / float(np.sum(w * w))
    if ess < 2:
        raise ArithmeticError("zero effective samples in normalizer estimate")
    var = float(np.sum(w * (vals - est) ** 2))
    return est, math.sqrt(var / ess)


def two_sided_conditional_sample(z_row, a: float, b: float, T1: int, T2: int,
                                 theta: float, rng, n_samples: int = 1):
    """Weighted draws of the odd points between two pins on the top curve.

    Proposes a random bridge X(T1-1)=a to X(T2-1)=b with symmetric
    log-gamma-difference increments and weights it by W-tilde =
    exp(-sum_{j=T1}^{T2-1} (e^{z_j - X(j)} + e^{z_j - X(j-1)})), the
    Radon-Nikodym factor of the two-sided Gibbs conditioning.  Returns
    (paths, log_weights) with paths of shape (n_samples, T2-T1+1) holding
    X(T1-1..T2-1).
    """
    from .walks import BridgeSpec, bridge_sample

    if not T1 < T2 - 1:
        raise ValueError("need T1 < T2 - 1")
    z_row = np.asarray(z_row, dtype=float)
    if z_row.size != T2 - T1:
        raise ValueError("need len(z_row) = T2 - T1 (one z per j in [T1, T2-1])")
    n = T2 - T1 + 1
    spec = BridgeSpec(n=n, start=a, end=b, theta=theta)
    paths = np.empty((n_samples, n))
    logw = np.empty(n_samples)
    for s in range(n_samples):
        x = bridge_sample(spec, rng)
        paths[s] = x
        acc = 0.0
        for j in range(T1, T2):
            zj = z_row[j - T1]
            if zj != _NEG:
                acc -= math.exp(zj - x[j - (T1 - 1)])
                acc -= math.exp(zj - x[j - 1 - (T1 - 1)])
        logw[s] = acc
    return paths, logw
