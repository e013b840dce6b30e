"""Digamma-family special functions and the model constants built from them.

Everything here is a pure function of its arguments.  The polygamma values
are computed by shifting the argument above 10 with the recurrence and then
applying the asymptotic (Bernoulli) expansion, which keeps the absolute
error comfortably below 1e-12 on the whole positive axis without lookup
tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ThetaP",
    "digamma",
    "trigamma",
    "tetragamma",
    "nu_constant",
    "theta_c_solve",
    "point2line_constants",
]

# Bernoulli numbers B_2, B_4, ..., B_16 used by the asymptotic expansions.
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

_SHIFT = 10.0


@dataclass(frozen=True)
class ThetaP:
    """Bulk parameter and slope parameter of the point-to-line statistic.

    ``p`` is the aspect ratio (N+k)/(N-k) of the endpoint anti-diagonal, so
    it is 1 on the main diagonal and grows as the endpoint window moves away
    from it.
    """

    theta: float
    p: float

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")


def _check_positive(z: float) -> float:
    z = float(z)
    if not z > 0:
        raise ValueError(f"argument must be positive, got {z}")
    return z


def digamma(z: float) -> float:
    """Digamma function on the positive half-line, |error| <= 1e-12."""
    z = _check_positive(z)
    acc = 0.0
    while z < _SHIFT:
        acc -= 1.0 / z
        z += 1.0
    # asymptotic: log z - 1/(2z) - sum B_2k / (2k z^{2k})
    inv2 = 1.0 / (z * z)
    s = 0.0
    w = inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        s += b / (2 * k) * w
        w *= inv2
    return acc + math.log(z) - 0.5 / z - s


def trigamma(z: float) -> float:
    """First derivative of digamma; strictly decreasing and positive."""
    z = _check_positive(z)
    acc = 0.0
    while z < _SHIFT:
        acc += 1.0 / (z * z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    # 1/z + 1/(2 z^2) + sum B_2k z^{-2k-1}
    s = 0.0
    w = inv * inv2
    for b in _BERNOULLI:
        s += b * w
        w *= inv2
    return acc + inv + 0.5 * inv2 + s


def tetragamma(z: float) -> float:
    """Second derivative of digamma; negative on the positive half-line."""
    z = _check_positive(z)
    acc = 0.0
    while z < _SHIFT:
        acc -= 2.0 / (z * z * z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    # -1/z^2 - 1/z^3 - sum B_2k (2k+1) z^{-2k-2}
    s = 0.0
    w = inv2 * inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        s += b * (2 * k + 1) * w
        w *= inv2
    return acc - inv2 - inv * inv2 - s


def nu_constant(theta: float) -> float:
    """Parabola normalisation (trigamma(theta))^2 / (-tetragamma(theta))^{4/3}."""
    theta = _check_positive(theta)
    t1 = trigamma(theta)
    t2 = tetragamma(theta)
    return t1 * t1 * (-t2) ** (-4.0 / 3.0)


def theta_c_solve(tp: ThetaP, tol: float = 1e-11) -> float:
    """Solve trigamma(x) = p * trigamma(2*theta - x) for x in (0, 2*theta).

    The left side is strictly decreasing in x and the right side strictly
    increasing, so the root is unique and bisection is safe.  Returns the
    root with residual |trigamma(x) - p*trigamma(2t - x)| <= ``tol``.
    """
    theta, p = tp.theta, tp.p
    if p == 1.0:
        return theta

    def h(x: float) -> float:
        return trigamma(x) - p * trigamma(2.0 * theta - x)

    lo, hi = 1e-12 * theta, 2.0 * theta - 1e-12 * theta
    flo, fhi = h(lo), h(hi)
    shrink = 0
    while not (flo > 0 > fhi):
        # h(0+) = +inf and h(2theta-) = -inf, so failure to bracket can only
        # be floating-point saturation at the interval ends; tighten inward.
        lo *= 0.5
        hi = 2.0 * theta - (2.0 * theta - hi) * 0.5
        flo, fhi = h(lo), h(hi)
        shrink += 1
        if shrink > 60:
            raise ArithmeticError(
                f"failed to bracket theta_c for theta={theta}, p={p}"
            )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = h(mid)
        if fm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * theta:
            break
    root = 0.5 * (lo + hi)
    resid = abs(trigamma(root) - p * trigamma(2.0 * theta - root))
    # residual scale: |h'| ~ |tetragamma|, so x-tol 1e-15*theta is ample
    if resid > max(tol, 1e-9 * abs(trigamma(root))):
        raise ArithmeticError(
            f"theta_c bisection residual {resid:g} above tolerance for "
            f"theta={theta}, p={p}"
        )
    return root


def point2line_constants(tp: ThetaP) -> tuple[float, float]:
    """Centering f and scale sigma of the point-to-line free energy.

    f = -digamma(tc) - p*digamma(2*theta - tc) and
    sigma = (0.5*(-tetragamma(tc) - p*tetragamma(2*theta - tc)))^(1/3)
    with tc the solution from :func:`theta_c_solve`.
    """
    tc = theta_c_solve(tp)
    theta, p = tp.theta, tp.p
    f = -digamma(tc) - p * digamma(2.0 * theta - tc)
    sigma_cubed = 0.5 * (-tetragamma(tc) - p * tetragamma(2.0 * theta - tc))
    if not sigma_cubed > 0:
        raise ArithmeticError(f"non-positive sigma^3 = {sigma_cubed}")
    return f, sigma_cubed ** (1.0 / 3.0)
