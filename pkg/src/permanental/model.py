"""Laplace transforms of alpha-permanental vectors and the mixing law of Z.

Two equivalent evaluations are provided: the determinant form
``|A|^alpha / |A+S|^alpha`` and the alpha-permanent series obtained from
the D - B splitting of A.  The series is summed order by order with a
certified geometric tail bound, which also normalizes the mixing
distribution of the latent index vector Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionTooLarge, TruncationInfeasible
from .linalg import (
    MMatrixPair,
    as_square_matrix,
    invert,
    spectral_radius_nonneg,
    validate_m_matrix,
)

# Roots-of-unity grids beyond this many points are refused outright.
GRID_CAP = 40_000_000
# Above this Perron root no truncation order can be certified at double precision.
RHO_CEILING = 1.0 - 1e-6
_MAX_ORDER = 400


@dataclass(frozen=True)
class PermanentalSpec:
    """A validated M-matrix pair together with the index alpha > 0."""

    pair: MMatrixPair
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def n(self) -> int:
        return self.pair.n

    @classmethod
    def from_m_matrix(cls, a, alpha: float, **tol) -> "PermanentalSpec":
        return cls(validate_m_matrix(a, **tol), float(alpha))

    @classmethod
    def from_kernel(cls, k, alpha: float, **tol) -> "PermanentalSpec":
        return cls(validate_m_matrix(invert(as_square_matrix(k)), **tol), float(alpha))


def _as_s_vector(s, n: int) -> np.ndarray:
    v = np.asarray(s, dtype=float).reshape(-1)
    if v.shape != (n,):
        raise ValueError(f"s must have length {n}, got {v.shape}")
    if not np.isfinite(v).all() or (v < 0).any():
        raise ValueError("s must be finite and nonnegative")
    return v


def direct_laplace(spec: PermanentalSpec, s) -> float:
    """E exp(-<s, X>) = |A|^alpha / |A+S|^alpha, evaluated via slogdet."""
    sv = _as_s_vector(s, spec.n)
    sign_a, logdet_a = np.linalg.slogdet(spec.pair.A)
    sign_s, logdet_s = np.linalg.slogdet(spec.pair.A + np.diag(sv))
    if sign_a <= 0 or sign_s <= 0:
        raise ValueError("nonpositive determinant; pair is not a valid M-matrix")
    return math.exp(spec.alpha * (logdet_a - logdet_s))


def compositions(total: int, n: int):
    """Multi-indices k in N^n with |k| = total, in lexicographic order."""
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, n - 1):
            yield (first,) + rest


def _log_chernoff_tail(b_tilde: np.ndarray, alpha: float, order: int) -> float:
    """log of an upper bound on sum_{|k| > order} |B~(k)|_alpha / k!.

    All series coefficients are nonnegative, so for any 1 < t < 1/rho the
    tail is at most t^{-(order+1)} det(I - t B~)^{-alpha}; minimized on a
    log-spaced t grid.
    """
    n = b_tilde.shape[0]
    rho = spectral_radius_nonneg(b_tilde)
    if rho <= 0.0:
        return -math.inf
    if rho >= 1.0:
        return math.inf
    eye = np.eye(n)
    best = math.inf
    for t in np.geomspace(1.0 + 1e-9, (1.0 / rho) * (1.0 - 1e-9), 64):
        sign, logdet = np.linalg.slogdet(eye - t * b_tilde)
        if sign <= 0:
            continue
        best = min(best, -alpha * logdet - (order + 1) * math.log(t))
    return best


def _series_coefficients_box(b_tilde: np.ndarray, alpha: float, order: int) -> np.ndarray:
    """Coefficients F_k = |B~(k)|_alpha / k! for all k in {0..order}^n.

    Extracts Taylor coefficients of det(I - Z B~)^{-alpha} by evaluating it
    on the (order+1)-st roots-of-unity grid and applying an n-dimensional
    FFT.  At radius 1 the aliased mass is exactly the out-of-box mass,
    which the caller's tail certificate already covers.
    """
    n = b_tilde.shape[0]
    N = order + 1
    total = N**n
    if total > GRID_CAP:
        raise DimensionTooLarge(
            f"coefficient grid {N}^{n} = {total} exceeds cap {GRID_CAP}"
        )
    rho = spectral_radius_nonneg(b_tilde)
    # principal branch of det^? is the analytic continuation only while the
    # accumulated argument cannot wrap; otherwise fall back to eigenvalues
    principal_ok = n * math.asin(min(rho, 1.0)) < 0.999 * math.pi
    omega = np.exp(2j * np.pi * np.arange(N) / N)
    eye = np.eye(n, dtype=complex)
    flat = np.empty(total, dtype=complex)
    chunk = max(1, min(200_000, total))
    shape = (N,) * n
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        digits = np.unravel_index(np.arange(start, stop), shape)
        z = omega[np.stack(digits, axis=1)]
        mats = eye[None, :, :] - z[:, :, None] * b_tilde[None, :, :]
        if principal_ok:
            flat[start:stop] = np.linalg.det(mats) ** (-alpha)
        else:
            mu = np.linalg.eigvals(mats - eye[None, :, :]) + 1.0
            flat[start:stop] = np.exp(-alpha * np.log(mu).sum(axis=-1))
    coeffs = np.fft.fftn(flat.reshape(shape)) / total
    return np.ascontiguousarray(coeffs.real)


def _b_tilde(pair: MMatrixPair, s: np.ndarray | None = None) -> np.ndarray:
    scale = pair.diag_a if s is None else pair.diag_a + s
    return pair.B / scale[:, None]


@dataclass
class ZDistribution:
    """Masses of the latent index vector Z, enumerated in graded order.

    ``index`` lists multi-indices by increasing order (lexicographic within
    an order); ``cum`` is the matching cumulative mass array used for
    inverse-CDF sampling.  ``covered_mass + tail_bound`` certifies the
    normalization.  Each mass carries a nonnegative alias bias bounded by
    ``tail_bound``, so tight targets give tight per-mass accuracy.
    """

    spec: PermanentalSpec
    masses: dict[tuple[int, ...], float]
    covered_mass: float
    tail_bound: float
    max_order: int
    index: list[tuple[int, ...]] = field(repr=False)
    cum: np.ndarray = field(repr=False)

    def extended(self, extra_orders: int = 1) -> "ZDistribution":
        """Re-enumerate with a deeper truncation order."""
        return _z_masses_to_order(self.spec, self.max_order + extra_orders)


def _z_prefactor(spec: PermanentalSpec) -> float:
    sign, logdet_a = np.linalg.slogdet(spec.pair.A)
    if sign <= 0:
        raise ValueError("nonpositive determinant")
    return math.exp(spec.alpha * (logdet_a - np.log(spec.pair.diag_a).sum()))


def _z_masses_to_order(spec: PermanentalSpec, order: int) -> ZDistribution:
    bt = _b_tilde(spec.pair)
    pref = _z_prefactor(spec)
    coeffs = _series_coefficients_box(bt, spec.alpha, order)
    masses: dict[tuple[int, ...], float] = {}
    index: list[tuple[int, ...]] = []
    vals: list[float] = []
    for j in range(order + 1):
        for k in compositions(j, spec.n):
            m = pref * max(float(coeffs[k]), 0.0)
            masses[k] = m
            index.append(k)
            vals.append(m)
    covered = float(np.sum(vals))
    log_tail = _log_chernoff_tail(bt, spec.alpha, order)
    tail = pref * (0.0 if log_tail == -math.inf else math.exp(log_tail))
    return ZDistribution(
        spec=spec,
        masses=masses,
        covered_mass=covered,
        tail_bound=tail,
        max_order=order,
        index=index,
        cum=np.cumsum(vals),
    )


def z_masses(spec: PermanentalSpec, target_mass: float) -> ZDistribution:
    """Enumerate Z masses by increasing order until the certified tail
    bound drops to 1 - target_mass (hence covered mass >= target_mass)."""
    if not 0.0 < target_mass < 1.0 - 1e-12:
        raise ValueError("target_mass must lie in (0, 1 - 1e-12)")
    bt = _b_tilde(spec.pair)
    rho = spectral_radius_nonneg(bt)
    if rho >= RHO_CEILING:
        raise TruncationInfeasible(
            f"Perron root {rho:.8f} too close to 1; no order can be certified"
        )
    pref = _z_prefactor(spec)
    budget = math.log(1.0 - target_mass) - math.log(pref)
    order = 0
    while _log_chernoff_tail(bt, spec.alpha, order) > budget:
        order += 1
        if order > _MAX_ORDER:
            raise TruncationInfeasible(
                f"no certified order below {_MAX_ORDER} for target {target_mass}"
            )
    return _z_masses_to_order(spec, order)


@dataclass(frozen=True)
class SeriesValue:
    """Series evaluation with its certified relative tail and order used."""

    value: float
    rel_err: float
    orders_used: int


def series_laplace_report(spec: PermanentalSpec, s, rel_tol: float = 1e-8) -> SeriesValue:
    """Sum the alpha-permanent series for E exp(-<s, X>) order by order.

    Per-order sums c_j = sum_{|k|=j} |B~(k)|_alpha / k! satisfy the
    log-derivative recursion j c_j = alpha sum_{r<=j} tr(B~^r) c_{j-r};
    summation stops once the certified tail is below rel_tol times the
    partial sum.
    """
    if not 1e-14 < rel_tol < 1e-2:
        raise ValueError("rel_tol must lie in (1e-14, 1e-2)")
    sv = _as_s_vector(s, spec.n)
    bt = _b_tilde(spec.pair, sv)
    rho = spectral_radius_nonneg(bt)
    if rho >= RHO_CEILING:
        raise TruncationInfeasible(
            f"Perron root {rho:.8f} of the shifted series matrix too close to 1"
        )
    sign, logdet_a = np.linalg.slogdet(spec.pair.A)
    if sign <= 0:
        raise ValueError("nonpositive determinant")
    pref = math.exp(
        spec.alpha * (logdet_a - np.log(spec.pair.diag_a + sv).sum())
    )
    c = [1.0]
    partial = 1.0
    traces: list[float] = []
    power = np.eye(spec.n)
    order = 0
    while True:
        log_tail = _log_chernoff_tail(bt, spec.alpha, order)
        tail = 0.0 if log_tail == -math.inf else math.exp(log_tail)
        if tail <= rel_tol * partial:
            return SeriesValue(value=pref * partial, rel_err=tail / partial, orders_used=order)
        order += 1
        if order > _MAX_ORDER:
            raise TruncationInfeasible(f"series did not certify within {_MAX_ORDER} orders")
        power = power @ bt
        traces.append(float(np.trace(power)))
        cj = spec.alpha / order * sum(
            traces[r - 1] * c[order - r] for r in range(1, order + 1)
        )
        c.append(cj)
        partial += cj


def series_laplace(spec: PermanentalSpec, s, rel_tol: float = 1e-8) -> float:
    return series_laplace_report(spec, s, rel_tol).value


def coordinate_sum(x: np.ndarray) -> np.ndarray:
    return x.sum(axis=-1)


def coordinate_max(x: np.ndarray) -> np.ndarray:
    return x.max(axis=-1)


def max_indicator(lam: float) -> Callable[[np.ndarray], np.ndarray]:
    def f(x: np.ndarray) -> np.ndarray:
        return (x.max(axis=-1) >= lam).astype(float)

    return f


_FUNCTIONALS = {"sum": coordinate_sum, "max": coordinate_max}


def _resolve_functional(f, lam):
    if callable(f):
        return f
    if f in _FUNCTIONALS:
        return _FUNCTIONALS[f]
    if f == "max-indicator":
        if lam is None:
            raise ValueError("max-indicator needs lam")
        return max_indicator(lam)
    raise ValueError(f"unknown functional {f!r}; use sum, max, max-indicator or a callable")


@dataclass(frozen=True)
class MixtureEstimate:
    value: float
    se: float
    mass_deficiency: float


def mixture_expectation(
    spec: PermanentalSpec,
    f,
    mc_per_term: int,
    seed: int,
    lam: float | None = None,
    target_mass: float = 1.0 - 1e-6,
) -> MixtureEstimate:
    """E f(X) as a Z-mixture of per-term Monte Carlo gamma expectations.

    The uncovered mixture mass is reported as ``mass_deficiency`` alongside
    the Monte Carlo standard error.
    """
    if mc_per_term < 1_000:
        raise ValueError("mc_per_term must be at least 1000")
    func = _resolve_functional(f, lam)
    zdist = z_masses(spec, target_mass)
    a = spec.pair.diag_a
    total = 0.0
    var = 0.0
    for term, k in enumerate(zdist.index):
        mass = zdist.masses[k]
        if mass == 0.0:
            continue
        g = np.random.default_rng([seed, 211, term])
        draws = g.standard_gamma(
            spec.alpha + np.asarray(k, dtype=float), size=(mc_per_term, spec.n)
        ) / a
        vals = np.asarray(func(draws), dtype=float)
        total += mass * float(vals.mean())
        var += (mass * float(vals.std(ddof=1)) / math.sqrt(mc_per_term)) ** 2
    return MixtureEstimate(
        value=total,
        se=math.sqrt(var),
        mass_deficiency=max(0.0, 1.0 - zdist.covered_mass),
    )
