"""Dense nonnegative-matrix algebra.

Validation helpers, Laplacians, Perron quantities, the matrix exponential and
M-matrix solves.  Matrices are plain ``numpy.ndarray`` objects; the
``as_*`` helpers validate an input once and hand back a read-only float copy.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    AmbiguityError,
    ConvergenceError,
    DimensionError,
    DomainError,
    ExpmOverflowError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

#: Row-sum tolerance used for every stochasticity test.
TOL_ROW = 1e-9

__all__ = [
    "TOL_ROW",
    "SpectralEstimate",
    "as_square",
    "as_nonnegative",
    "as_stochastic",
    "renormalize_rows",
    "is_stochastic",
    "is_substochastic",
    "laplacian_of",
    "spectral_radius",
    "left_fixed_vector",
    "laplacian_left_null",
    "matrix_exponential",
    "m_matrix_solve",
    "nullity",
]


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    residual: float
    iterations: int
    vector: np.ndarray


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_square(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        i, j = np.argwhere(~np.isfinite(M))[0]
        raise DomainError(f"{name} entry ({i + 1}, {j + 1}) is not finite")
    return M


def as_nonnegative(A, name="matrix") -> np.ndarray:
    """Validate a square matrix with entries >= 0 (exact comparison)."""
    A = as_square(A, name)
    bad = np.argwhere(A < 0)
    if bad.size:
        i, j = bad[0]
        raise DomainError(f"{name} entry ({i + 1}, {j + 1}) = {A[i, j]!r} is negative")
    return _frozen(A)


def renormalize_rows(W: np.ndarray) -> np.ndarray:
    """Rescale rows so each sums to exactly 1 under ``math.fsum``.

    Rows that already sum to 1 are left bit-for-bit unchanged, which makes the
    operation idempotent.
    """
    W = np.array(W, dtype=float)
    for i, row in enumerate(W):
        s = math.fsum(row)
        if s == 1.0 or s == 0.0:
            continue
        row = row / s
        for _ in range(4):
            s = math.fsum(row)
            if s == 1.0:
                break
            k = int(np.argmax(row))
            row[k] += 1.0 - s
        W[i] = row
    return W


def as_stochastic(W, tol=TOL_ROW, name="W") -> np.ndarray:
    """Validate a row-stochastic matrix and renormalize its rows exactly.

    Raises
    ------
    DomainError
        If an entry is negative or a row sum is farther than ``tol`` from 1.
    """
    W = as_nonnegative(W, name)
    sums = W.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        i = bad[0]
        raise DomainError(f"{name} row {i + 1} sums to {sums[i]!r}, not 1 (tol {tol:g})")
    return _frozen(renormalize_rows(W))


def is_stochastic(A, tol=TOL_ROW) -> bool:
    A = np.asarray(A, dtype=float)
    return bool(A.ndim == 2 and np.all(np.isfinite(A)) and np.all(A >= 0)
                and np.all(np.abs(A.sum(axis=1) - 1.0) <= tol))


def is_substochastic(A, tol=TOL_ROW) -> bool:
    A = np.asarray(A, dtype=float)
    return bool(A.ndim == 2 and np.all(np.isfinite(A)) and np.all(A >= 0)
                and np.all(A.sum(axis=1) <= 1.0 + tol))


def laplacian_of(A) -> np.ndarray:
    """Laplacian ``L = diag(off-diagonal row sums) - A`` with the diagonal of ``A`` ignored."""
    A = np.array(as_nonnegative(A, "A"))
    np.fill_diagonal(A, 0.0)
    L = -A
    np.fill_diagonal(L, A.sum(axis=1))
    return L


def nullity(M, rtol=None) -> int:
    """Numerical null-space dimension with threshold ``n * eps * sigma_max``."""
    M = np.asarray(M, dtype=float)
    s = np.linalg.svd(M, compute_uv=False)
    if rtol is None:
        rtol = M.shape[0] * np.finfo(float).eps
    thresh = rtol * (s[0] if s.size else 0.0)
    return int(np.sum(s <= thresh))


def _power_iterate(A, v, tol, budget, shift):
    B = A + shift * np.eye(A.shape[0]) if shift else A
    best = (np.inf, 0.0, v)
    for k in range(1, budget + 1):
        w = B @ v
        top = np.max(w)
        if top == 0.0:
            # nilpotent direction: A v = 0 with v > 0 forces rho(A) = 0
            return 0.0, 0.0, k, v
        rho = top - shift
        v = w / top
        res = float(np.max(np.abs(A @ v - rho * v)))
        if res < best[0]:
            best = (res, rho, v)
        if res < tol:
            return rho, res, k, v
    return best[1], best[0], budget, best[2]


def spectral_radius(A, tol=1e-12, max_iter=100_000) -> SpectralEstimate:
    """Perron root of a nonnegative matrix by power iteration.

    Starts from the all-ones vector.  If plain iteration stalls (typically an
    imprimitive matrix whose peripheral eigenvalues make the iterates cycle),
    the iteration is restarted on ``A + 0.5 I``, which has Perron root
    ``rho(A) + 0.5`` and no other eigenvalue of that modulus when ``A`` is
    irreducible.

    Raises
    ------
    ConvergenceError
        Carrying the best estimate and residual when neither phase reaches ``tol``.
    """
    A = as_nonnegative(A, "A")
    if tol <= 0:
        raise DomainError("tol must be positive")
    n = A.shape[0]
    v = np.ones(n)
    first = max(1, min(max_iter // 4, 2000))
    rho, res, used, vec = _power_iterate(A, v, tol, first, 0.0)
    if res < tol:
        return SpectralEstimate(float(rho), float(res), used, vec)
    rho2, res2, used2, vec2 = _power_iterate(A, (vec + 1.0) / 2.0, tol, max(1, max_iter - first), 0.5)
    if res2 < tol:
        return SpectralEstimate(float(rho2), float(res2), used + used2, vec2)
    if res < res2:
        rho2, res2 = rho, res
    raise ConvergenceError(
        f"power iteration stalled at residual {res2:.3e} after {used + used2} iterations",
        estimate=float(rho2), residual=float(res2), iterations=used + used2,
    )


def _bordered_solve(M):
    # Solve {rows 1..n-1 of M} p = 0, 1^T p = 1.  Rows of M sum to zero, so dropping one loses nothing.
    n = M.shape[0]
    K = M.copy()
    K[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    return np.linalg.solve(K, rhs)


def _probability(p, residual_of, label):
    if np.min(p) < -1e-9:
        raise AmbiguityError(f"{label}: solution has a negative entry {np.min(p):.3e}", nullity=1)
    p = np.where(p < 0, 0.0, p)
    p = p / p.sum()
    res = residual_of(p)
    if res > 1e-12:
        logger.warning("%s residual %.3e exceeds 1e-12", label, res)
    else:
        logger.debug("%s residual %.3e", label, res)
    return p


def left_fixed_vector(W) -> np.ndarray:
    """Probability vector ``p`` with ``p^T W = p^T``.

    Solved directly from the bordered system ``(W^T - I)`` with its last row
    replaced by ``1^T``.

    Raises
    ------
    AmbiguityError
        If the eigenvalue 1 of ``W`` is not geometrically simple.
    """
    W = as_stochastic(W)
    M = W.T - np.eye(W.shape[0])
    k = nullity(M)
    if k != 1:
        raise AmbiguityError(f"eigenvalue 1 of W has a {k}-dimensional eigenspace", nullity=k)
    p = _bordered_solve(M)
    return _probability(p, lambda q: float(np.max(np.abs(q @ W - q))), "left_fixed_vector")


def laplacian_left_null(L) -> np.ndarray:
    """Probability vector ``p`` with ``p^T L = 0`` for a Laplacian ``L``.

    Raises
    ------
    AmbiguityError
        If the left null space of ``L`` has dimension other than 1.
    """
    L = as_square(L, "L")
    k = nullity(L.T) if np.any(L) else L.shape[0]
    if k != 1:
        raise AmbiguityError(f"Laplacian has a {k}-dimensional null space", nullity=k)
    p = _bordered_solve(L.T)
    return _probability(p, lambda q: float(np.max(np.abs(q @ L))), "laplacian_left_null")


# Pade [13/13] coefficients for exp
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)


def matrix_exponential(M, t=1.0) -> np.ndarray:
    """``exp(M t)`` by scaling and squaring with a degree-13 Pade approximant.

    The scaling exponent ``s`` is the smallest integer with
    ``||M t||_1 / 2**s <= 0.5``.

    Raises
    ------
    ExpmOverflowError
        If the result is not finite.
    """
    M = as_square(M, "M")
    if t < 0 or not math.isfinite(t):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")
    n = M.shape[0]
    I = np.eye(n)
    X = M * t
    norm = np.linalg.norm(X, 1)
    if norm == 0.0:
        return I
    s = max(0, math.ceil(math.log2(norm / 0.5)))
    if s > 1000:
        raise ExpmOverflowError(f"||M t||_1 = {norm:.3e} is too large; subdivide the time interval")
    X = X / 2.0 ** s
    b = _PADE13
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = X @ (X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2) + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * I)
    V = X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2) + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * I
    with np.errstate(over="ignore", invalid="ignore"):
        E = np.linalg.solve(V - U, V + U)
        for _ in range(s):
            E = E @ E
    if not np.all(np.isfinite(E)):
        raise ExpmOverflowError(f"exp(M t) overflowed (||M t||_1 = {norm:.3e}); subdivide the time interval")
    return E


def m_matrix_solve(Z, B) -> np.ndarray:
    """Solve ``Z X = B`` for a nonsingular M-matrix ``Z`` by LU with partial pivoting.

    When ``B >= 0`` the exact solution is nonnegative; entries in
    ``[-1e-9, 0)`` are rounding noise and are clamped to zero.

    Raises
    ------
    SingularMatrixError
        If a pivot is below ``n * eps * max|Z|``.
    """
    Z = as_square(Z, "Z")
    B = np.asarray(B, dtype=float)
    if B.shape[0] != Z.shape[0]:
        raise DimensionError(f"Z is {Z.shape} but B has {B.shape[0]} rows")
    n = Z.shape[0]
    with warnings.catch_warnings():
        # exact singularity is reported below with the pivot attached
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(Z, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = np.max(np.abs(Z))
    if scale == 0.0 or pivots.min() <= n * np.finfo(float).eps * scale:
        raise SingularMatrixError(
            f"matrix is singular to working precision (smallest pivot {pivots.min():.3e})",
            pivot=float(pivots.min()),
        )
    X = scipy.linalg.lu_solve((lu, piv), B, check_finite=False)
    if np.all(B >= 0):
        noise = (X < 0) & (X >= -1e-9)
        if noise.any():
            logger.debug("m_matrix_solve clamped %d entries in [-1e-9, 0)", int(noise.sum()))
            X = np.where(noise, 0.0, X)
    return X
