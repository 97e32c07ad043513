"""Dense linear-algebra kernel.

Everything here is SVD based. The rank cutoff is the usual
``max(rows, cols) * eps * sigma_max``; callers may pass an explicit ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInput, NumericalFailure, RankDeficientDesign

EPS = np.finfo(np.float64).eps


def as_matrix(A, name="matrix") -> np.ndarray:
    """Validate and return ``A`` as a 2-D float64 array."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInput(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def as_vector(v, name="vector") -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 2 and 1 in v.shape:
        v = v.reshape(-1)
    if v.ndim != 1 or v.size < 1:
        raise InvalidInput(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInput(f"{name} has non-finite entries")
    return v


def default_rank_tol(shape, sigma_max: float) -> float:
    return max(shape) * EPS * float(sigma_max)


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``A = U diag(s) Vt`` plus the rank cutoff used for ``A``."""

    U: np.ndarray
    s: np.ndarray
    Vt: np.ndarray
    tol: float

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.s > self.tol))

    @property
    def sigma_max(self) -> float:
        return float(self.s[0]) if self.s.size else 0.0


def svd(A, tol: float | None = None) -> SvdFactors:
    A = as_matrix(A)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed on a {A.shape[0]}x{A.shape[1]} matrix: {exc}") from None
    if tol is None:
        tol = default_rank_tol(A.shape, s[0] if s.size else 0.0)
    return SvdFactors(U, s, Vt, float(tol))


def pinv(A, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse; singular values at or below the cutoff are dropped."""
    f = svd(A, tol)
    k = f.rank
    return (f.Vt[:k].T / f.s[:k]) @ f.U[:, :k].T


def numerical_rank(A, tol: float | None = None) -> int:
    return svd(A, tol).rank


def cond2(A, tol: float | None = None) -> float:
    """Two-norm condition number; ``math.inf`` when numerically rank deficient."""
    f = svd(A, tol)
    if f.sigma_max == 0.0:
        raise InvalidInput("condition number of the zero matrix is undefined")
    k = f.rank
    if k < min(as_matrix(A).shape):
        return math.inf
    return float(f.s[0] / f.s[k - 1])


def range_basis(A, tol: float | None = None) -> np.ndarray:
    f = svd(A, tol)
    return f.U[:, : f.rank]


def leverage_scores(X, tol: float | None = None) -> np.ndarray:
    """Squared row norms of an orthonormal basis for ``range(X)``.

    Requires full column rank; raises ``RankDeficientDesign`` otherwise.
    """
    f = svd(X, tol)
    if f.rank < f.Vt.shape[0]:
        raise RankDeficientDesign(
            f"leverage scores need full column rank, got rank {f.rank} < {f.Vt.shape[0]}"
        )
    return np.einsum("ij,ij->i", f.U, f.U)


def spectral_norm(A) -> float:
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class NormEstimate:
    value: float
    iterations: int
    converged: bool
    method: str = "power"


def power_norm(
    matvec: Callable[[np.ndarray], np.ndarray],
    rmatvec: Callable[[np.ndarray], np.ndarray],
    ncols: int,
    tol: float = 1e-6,
    maxiter: int = 500,
    seed: int = 0,
) -> NormEstimate:
    """Largest singular value of an implicit operator by power iteration on A^T A.

    Stops when the relative change of the estimate drops below ``tol``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    v = rng.standard_normal(ncols)
    v /= np.linalg.norm(v)
    est = 0.0
    for it in range(1, maxiter + 1):
        w = rmatvec(matvec(v))
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return NormEstimate(0.0, it, True)
        new = math.sqrt(nw)
        v = w / nw
        if abs(new - est) <= tol * new:
            return NormEstimate(new, it, True)
        est = new
    return NormEstimate(est, maxiter, False)
