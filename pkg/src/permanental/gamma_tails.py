"""Gamma tail probabilities, two-sided tail bounds, and max-of-iid bounds.

``gamma_tail_exact`` implements the regularized upper incomplete gamma with
the standard split: ascending series below x = u + 1, Lentz continued
fraction above it.  Everything here is a pure function.
"""

from __future__ import annotations

import math

from .errors import PreconditionViolated

_TOL = 1e-15
_TINY = 1e-300


def _lower_series(u: float, x: float, max_iter: int = 1_000) -> float:
    """Regularized lower incomplete gamma P(u, x) for x < u + 1."""
    ap = u
    delt = 1.0 / u
    total = delt
    for _ in range(max_iter):
        ap += 1.0
        delt *= x / ap
        total += delt
        if abs(delt) < abs(total) * _TOL:
            return total * math.exp(-x + u * math.log(x) - math.lgamma(u))
    raise RuntimeError(f"incomplete gamma series stalled at u={u}, x={x}")


def _upper_cf(u: float, x: float, max_iter: int = 10_000) -> float:
    """Regularized upper incomplete gamma Q(u, x) by modified Lentz."""
    b = x + 1.0 - u
    c = 1.0 / _TINY
    d = 1.0 / b if abs(b) > _TINY else 1.0 / _TINY
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - u)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delt = d * c
        h *= delt
        if abs(delt - 1.0) < _TOL:
            return h * math.exp(-x + u * math.log(x) - math.lgamma(u))
    raise RuntimeError(f"incomplete gamma continued fraction stalled at u={u}, x={x}")


def gamma_tail_exact(u: float, v: float, t: float) -> float:
    """P(xi_{u,v} >= t) for the gamma law with shape u and scale parameter v."""
    if u <= 0 or v <= 0:
        raise ValueError("shape and scale must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 1.0
    x = v * t
    if x < u + 1.0:
        return 1.0 - _lower_series(u, x)
    return _upper_cf(u, x)


def tail_bounds(u: float, lam: float) -> tuple[float, float]:
    """Two-sided bounds on P(xi_{u,1} >= lam).

    Returns ((2/3) lam^{u-1} e^{-lam} / Gamma(u), 2 lam^{u-1} e^{-lam} / Gamma(u)).
    The upper bound needs lam > 2(u-1) v 0; the lower bound needs lam >= 2
    and additionally lam > 2(1-u) when u < 1.  Scale invariance
    P(xi_{u,v} >= lam/v) = P(xi_{u,1} >= lam) is the caller's business.
    """
    if u <= 0:
        raise ValueError("shape must be positive")
    upper_floor = max(2.0 * (u - 1.0), 0.0)
    if not lam > upper_floor:
        raise PreconditionViolated(
            "upper", f"upper bound needs lam > 2(u-1) v 0 = {upper_floor:g}; got {lam:g}"
        )
    if lam < 2.0:
        raise PreconditionViolated("lower", f"lower bound needs lam >= 2; got {lam:g}")
    if u < 1.0 and not lam > 2.0 * (1.0 - u):
        raise PreconditionViolated(
            "lower", f"lower bound with u < 1 needs lam > 2(1-u) = {2 * (1 - u):g}"
        )
    core = math.exp((u - 1.0) * math.log(lam) - lam - math.lgamma(u))
    return (2.0 / 3.0) * core, 2.0 * core


def max_iid_lower(n: int, u: float, eps: float, q: float) -> float:
    """Certified lower bound for P(max of n iid xi_{u,v} >= (1-eps) log n / v).

    Returns 1 - e^{-q}; valid when n >= 10 and n^eps/(q Gamma(u) log n) >= 3/2.
    """
    if n < 10:
        raise PreconditionViolated("n", f"needs n >= 10; got {n}")
    if eps <= 0 or q <= 0 or u <= 0:
        raise ValueError("eps, q and u must be positive")
    side = n**eps / (q * math.gamma(u) * math.log(n))
    if side < 1.5:
        raise PreconditionViolated(
            "side", f"n^eps/(q Gamma(u) log n) = {side:.4g} is below 3/2"
        )
    return 1.0 - math.exp(-q)


def unbounded_lambda_check(n: int, p: int, alpha: float) -> float:
    """P(max over [n/p] iid xi_{alpha,1} >= log n), computed exactly."""
    if n < 10:
        raise ValueError("needs n >= 10")
    if p < 1 or int(p) != p:
        raise ValueError("p must be an integer >= 1")
    m = n // p
    tail = gamma_tail_exact(alpha, 1.0, math.log(n))
    return -math.expm1(m * math.log1p(-tail))
