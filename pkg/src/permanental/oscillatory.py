"""Half-period lobe summation with Euler-type acceleration.

The Fourier-type integrals handled here have integrands decaying as slowly
as 1/(lam log^c lam), so naive truncation at any affordable cutoff is the
dominant error source.  Instead the axis is partitioned at the trig zeros,
each lobe is integrated adaptively, and the alternating lobe sums are
accelerated by repeated averaging; the acceleration error is estimated
from the last two averaging depths.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.integrate

from .errors import QuadratureFailure

# 16-point Gauss-Legendre nodes/weights on [-1, 1] for cheap far lobes
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def euler_accelerate(terms) -> tuple[float, float]:
    """Sum an (eventually) alternating series by repeated averaging.

    Returns (estimate, error_estimate); the estimate is the averaging depth
    whose final entry moved least relative to the previous depth.
    """
    t = np.asarray(terms, dtype=float)
    if t.size == 0:
        return 0.0, 0.0
    row = np.cumsum(t)
    best = float(row[-1])
    best_err = abs(float(t[-1]))
    prev_last = float(row[-1])
    for _ in range(min(t.size - 1, 80)):
        row = 0.5 * (row[:-1] + row[1:])
        last = float(row[-1])
        diff = abs(last - prev_last)
        if diff <= best_err:
            best_err = diff
            best = last
        prev_last = last
    return best, best_err


def quad_careful(f, a, b, epsabs=1e-12, epsrel=1e-9, limit=400, raise_bad=True):
    """scipy.integrate.quad with failure surfaced as QuadratureFailure."""
    val, err, info, *extra = scipy.integrate.quad(
        f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=True
    )
    if extra and raise_bad:
        message = extra[0]
        if err > max(epsabs, epsrel * abs(val)) * 100:
            raise QuadratureFailure(f"quad on [{a:g}, {b:g}]: {message}", residual=err)
    return val, err


def lobe_boundaries(z: float, kind: str, count: int, start_index: int = 0) -> np.ndarray:
    """Boundaries of sign-constant half-period lobes of trig(lam*z).

    cos lobes run between odd multiples of pi/(2z); sin lobes between
    multiples of pi/z.  The first boundary is the head/lobe split.
    """
    if kind == "cos":
        return (2 * np.arange(start_index, start_index + count + 1) + 1) * math.pi / (2 * z)
    if kind == "sin":
        return (np.arange(start_index, start_index + count + 1) + 1) * math.pi / z
    raise ValueError(f"kind must be cos or sin, got {kind!r}")


def head_boundary(z: float, kind: str) -> float:
    return math.pi / (2 * z) if kind == "cos" else math.pi / z


def gl16(f, a: float, b: float) -> float:
    """Fixed 16-point Gauss-Legendre rule; for cheap smooth far lobes."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _GL_X
    return half * float(np.sum(_GL_W * np.array([f(v) for v in x])))


def trig_tail(
    f_exact,
    f_far,
    z: float,
    kind: str,
    n_exact: int,
    n_far: int = 512,
    lobe_epsabs: float = 1e-13,
) -> tuple[float, float]:
    """Integral over [head_boundary, infinity) of trig(lam z) * f(lam).

    The first ``n_exact`` lobes use ``f_exact`` with adaptive quadrature;
    the remaining ``n_far`` use ``f_far`` (a cheap asymptotic surrogate)
    scaled to match ``f_exact`` at the splice.  The mismatch at the splice
    contributes to the reported error.
    """
    trig = math.cos if kind == "cos" else math.sin
    bounds = lobe_boundaries(z, kind, n_exact)
    terms = []
    quad_err = 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        val, err = quad_careful(
            lambda lam: trig(lam * z) * f_exact(lam),
            a,
            b,
            epsabs=lobe_epsabs,
            epsrel=1e-9,
            limit=60,
        )
        terms.append(val)
        quad_err += err
    splice = float(bounds[-1])
    fe = f_exact(splice)
    fa = f_far(splice)
    mismatch_err = 0.0
    if fa != 0.0 and fe != 0.0 and math.copysign(1, fa) == math.copysign(1, fe):
        scale = fe / fa
        far_bounds = lobe_boundaries(z, kind, n_far, start_index=n_exact)
        far_terms = [
            scale * gl16(lambda lam: trig(lam * z) * f_far(lam), a, b)
            for a, b in zip(far_bounds[:-1], far_bounds[1:])
        ]
        far_sum_est, _ = euler_accelerate(far_terms)
        mismatch_err = abs(scale - 1.0) * abs(far_sum_est)
        terms.extend(far_terms)
    else:
        # no usable surrogate: the omitted tail is bounded by the last lobe
        mismatch_err = abs(terms[-1]) if terms else 0.0
    total, accel_err = euler_accelerate(terms)
    return total, quad_err + accel_err + mismatch_err
