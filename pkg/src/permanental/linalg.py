"""Dense real matrix algebra: alpha-permanents, M-matrix validation, Perron roots.

All operations are pure functions of their inputs and safe to call
concurrently.  Matrices are plain ``numpy`` arrays; ``as_square_matrix``
is the single entry point that enforces squareness and finiteness.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionTooLarge, NoConvergence, NotMMatrix, SingularMatrix

# Exact permutation enumeration beyond n = 12 (~4.8e8 permutations) is refused.
PERMANENT_CAP = 12

# Default tolerances for M-matrix membership of empirically computed inverses.
OFF_DIAG_TOL = 1e-12
INVERSE_TOL = 1e-10

_PERM_CHUNK = 250_000
_PERM_CACHE_MAX_N = 9
_perm_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def as_square_matrix(m) -> np.ndarray:
    """Coerce to a float64 square matrix with finite entries."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def _inf_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=1).max())


def _lu_factor_quiet(a: np.ndarray):
    # zero pivots are handled by the callers; scipy's warning is noise here
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(a, check_finite=False)


def det_lu(m) -> float:
    """Determinant via pivoted LU factorization.

    The empty 0x0 determinant is 1.  A matrix that is singular to machine
    precision returns 0.0 rather than raising.
    """
    a = as_square_matrix(m)
    if a.shape[0] == 0:
        return 1.0
    lu, piv = _lu_factor_quiet(a)
    sign = 1.0
    for i, p in enumerate(piv):
        if p != i:
            sign = -sign
    return sign * float(np.prod(np.diag(lu)))


def invert(m) -> np.ndarray:
    """Inverse via pivoted LU; raises SingularMatrix on a pivot below threshold."""
    a = as_square_matrix(m)
    n = a.shape[0]
    if n == 0:
        return a.copy()
    norm = _inf_norm(a)
    if norm == 0.0:
        raise SingularMatrix("zero matrix")
    lu, piv = _lu_factor_quiet(a)
    smallest = float(np.abs(np.diag(lu)).min())
    if smallest < 1e-13 * norm:
        raise SingularMatrix(
            f"pivot {smallest:.3e} below threshold {1e-13 * norm:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)


@dataclass(frozen=True)
class MMatrixPair:
    """Validated pair (A, K = A^-1) together with the D - B splitting of A.

    ``diag_a`` is the diagonal of A, ``D`` its diagonal part, ``B = D - A``
    the entrywise nonnegative off-diagonal part, and ``row_sums`` the row
    sums of A.
    """

    A: np.ndarray
    K: np.ndarray
    diag_a: np.ndarray
    D: np.ndarray
    B: np.ndarray
    row_sums: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]


def validate_m_matrix(
    a, off_diag_tol: float = OFF_DIAG_TOL, inverse_tol: float = INVERSE_TOL
) -> MMatrixPair:
    """Validate that ``a`` is a nonsingular M-matrix and return the split pair.

    Off-diagonal entries in (0, off_diag_tol] are treated as rounding noise
    and clamped to zero; inverse entries in [-inverse_tol, 0) likewise.
    """
    A = as_square_matrix(a).copy()
    n = A.shape[0]
    if n == 0:
        raise NotMMatrix("empty matrix")
    off_mask = ~np.eye(n, dtype=bool)
    if n > 1:
        worst = float(A[off_mask].max())
        if worst > off_diag_tol:
            i, j = np.unravel_index(np.argmax(np.where(off_mask, A, -np.inf)), A.shape)
            raise NotMMatrix(
                f"positive off-diagonal entry A[{i},{j}] = {A[i, j]:.6g}"
            )
        A[off_mask & (A > 0.0)] = 0.0
    diag_a = np.diag(A).copy()
    if (diag_a <= 0).any():
        i = int(np.argmin(diag_a))
        raise NotMMatrix(f"nonpositive diagonal entry A[{i},{i}] = {diag_a[i]:.6g}")
    try:
        K = invert(A)
    except SingularMatrix as exc:
        raise NotMMatrix(f"singular: {exc}") from exc
    if K.min() < -inverse_tol:
        i, j = np.unravel_index(np.argmin(K), K.shape)
        raise NotMMatrix(
            f"inverse entry K[{i},{j}] = {K[i, j]:.6g} below -{inverse_tol:g}"
        )
    K = np.maximum(K, 0.0)
    D = np.diag(diag_a)
    B = D - A
    np.fill_diagonal(B, 0.0)
    return MMatrixPair(
        A=A, K=K, diag_a=diag_a, D=D, B=B, row_sums=A.sum(axis=1)
    )


def _cycle_counts(perms: np.ndarray) -> np.ndarray:
    """Cycle count per permutation row.

    Counts indices that are the minimum of their own cycle; walking the
    orbit past its closing point only revisits cycle elements, so a fixed
    n-step walk is safe.
    """
    m, n = perms.shape
    counts = np.zeros(m, dtype=np.int64)
    rows = np.arange(m)
    for i in range(n):
        cur = perms[:, i]
        is_min = cur >= i
        for _ in range(n - 1):
            cur = perms[rows, cur]
            is_min &= cur >= i
        counts += is_min
    return counts


def _perm_blocks(n: int):
    if n <= _PERM_CACHE_MAX_N:
        if n not in _perm_cache:
            perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
            _perm_cache[n] = (perms, _cycle_counts(perms))
        yield _perm_cache[n]
        return
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, _PERM_CHUNK))
        if not block:
            return
        perms = np.array(block, dtype=np.int64)
        yield perms, _cycle_counts(perms)


def alpha_permanent(m, alpha: float) -> float:
    """Exact alpha-permanent: sum over permutations of alpha^cycles * prod M[i, pi(i)].

    Enumerates all n! permutations; n is capped at PERMANENT_CAP.
    """
    M = as_square_matrix(m)
    n = M.shape[0]
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n > PERMANENT_CAP:
        raise DimensionTooLarge(
            f"alpha_permanent enumerates n! permutations; n = {n} exceeds cap {PERMANENT_CAP}"
        )
    if n == 0:
        return 1.0
    cols = np.arange(n)
    total = 0.0
    for perms, cycles in _perm_blocks(n):
        prods = M[cols, perms].prod(axis=1)
        total += float(prods @ np.power(alpha, cycles.astype(float)))
    return total


def block_expand(c, k) -> np.ndarray:
    """Expand C to the |k| x |k| matrix C(k), replicating index i k_i times.

    |k| = 0 is the caller's scalar-1 case and is rejected here.
    """
    C = as_square_matrix(c)
    kv = np.asarray(k, dtype=int)
    if kv.shape != (C.shape[0],):
        raise ValueError(f"multi-index length {kv.shape} does not match n = {C.shape[0]}")
    if (kv < 0).any():
        raise ValueError("multi-index components must be nonnegative")
    if kv.sum() < 1:
        raise ValueError("block_expand requires |k| >= 1")
    idx = np.repeat(np.arange(C.shape[0]), kv)
    return C[np.ix_(idx, idx)]


def spectral_radius_nonneg(m, tol: float = 1e-12, max_iter: int = 50_000) -> float:
    """Perron root of an entrywise nonnegative matrix by shifted power iteration.

    A positive diagonal shift makes the iteration aperiodic; Collatz-
    Wielandt ratios give two-sided bounds and the convergence certificate.
    """
    M = as_square_matrix(m)
    if M.size == 0:
        return 0.0
    if M.min() < -0.0 and M.min() < 0:
        raise ValueError("entrywise nonnegative matrix required")
    if not M.any():
        return 0.0
    n = M.shape[0]
    shift = max(float(M.max()), 1.0) * 0.01
    A = M + shift * np.eye(n)
    x = np.ones(n)
    last_hi = np.inf
    stable = 0
    for _ in range(max_iter):
        y = A @ x
        hi = float((y / x).max())
        lo = float((y / x).min())
        if hi - lo <= tol * hi:
            return 0.5 * (hi + lo) - shift
        # reducible matrices: the lower bound can stall strictly below the
        # Perron root while the upper bound has already converged
        if abs(hi - last_hi) <= 1e-15 * hi:
            stable += 1
            if stable >= 64:
                return hi - shift
        else:
            stable = 0
        last_hi = hi
        x = y / y.max()
    raise NoConvergence("power iteration did not converge", last_hi - shift)
