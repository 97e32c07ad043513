"""Gaussian linear model and the exact least-squares fit."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidInput, RankDeficientDesign
from .seeding import Seed, make_rng

HAT_CAP = 5000


@dataclass(frozen=True)
class ModelSpec:
    """True coefficients and noise variance of ``y = X beta0 + eps``."""

    beta0: np.ndarray
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "beta0", linalg.as_vector(self.beta0, "beta0"))
        s2 = float(self.sigma2)
        if not np.isfinite(s2) or s2 <= 0:
            raise InvalidInput(f"sigma2 must be positive and finite, got {self.sigma2}")
        object.__setattr__(self, "sigma2", s2)

    @property
    def p(self) -> int:
        return self.beta0.size


@dataclass(frozen=True, eq=False)
class DesignData:
    """An observed pair (X, y) with full column rank X.

    The SVD of X is computed once and cached; the orthonormal basis, the
    pseudoinverse and (X^T X)^{-1} all derive from it.
    """

    X: np.ndarray
    y: np.ndarray
    rank_tol: float | None = field(default=None)

    def __post_init__(self):
        X = linalg.as_matrix(self.X, "X")
        y = linalg.as_vector(self.y, "y")
        if y.size != X.shape[0]:
            raise DimensionMismatch(f"X has {X.shape[0]} rows but y has length {y.size}")
        if X.shape[0] < X.shape[1]:
            raise RankDeficientDesign(f"need n >= p, got n={X.shape[0]}, p={X.shape[1]}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.factors.rank < X.shape[1]:
            raise RankDeficientDesign(
                f"X must have full column rank {X.shape[1]}, numerical rank is {self.factors.rank}"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @cached_property
    def factors(self) -> linalg.SvdFactors:
        return linalg.svd(self.X, self.rank_tol)

    @property
    def basis(self) -> np.ndarray:
        """Orthonormal basis U of range(X), shape (n, p)."""
        return self.factors.U

    @cached_property
    def x_pinv(self) -> np.ndarray:
        f = self.factors
        return (f.Vt.T / f.s) @ f.U.T

    @cached_property
    def gram_inv(self) -> np.ndarray:
        f = self.factors
        return (f.Vt.T / f.s**2) @ f.Vt

    @cached_property
    def leverage(self) -> np.ndarray:
        U = self.basis
        return np.einsum("ij,ij->i", U, U)

    @cached_property
    def gram(self) -> np.ndarray:
        return self.X.T @ self.X

    @property
    def x_norm(self) -> float:
        return float(self.factors.s[0])

    @property
    def kappa(self) -> float:
        s = self.factors.s
        return float(s[0] / s[-1])

    def hat_apply(self, v: np.ndarray) -> np.ndarray:
        """P_x v without forming the n x n hat matrix."""
        U = self.basis
        return U @ (U.T @ v)

    def hat_matrix(self) -> np.ndarray:
        U = self.basis
        return U @ U.T


@dataclass(frozen=True)
class ExactFit:
    beta_hat: np.ndarray
    y_hat: np.ndarray
    residual: np.ndarray
    cos_theta: float
    kappa_x: float
    x_norm: float
    y: np.ndarray
    hat_matrix: np.ndarray | None = None


def simulate_response(X, spec: ModelSpec, seed: Seed) -> np.ndarray:
    """Draw ``y = X beta0 + eps`` with ``eps ~ N(0, sigma2 I)``."""
    X = linalg.as_matrix(X, "X")
    if X.shape[1] != spec.p:
        raise DimensionMismatch(f"X has {X.shape[1]} columns but beta0 has length {spec.p}")
    eps = make_rng(seed).standard_normal(X.shape[0])
    return X @ spec.beta0 + np.sqrt(spec.sigma2) * eps


def simulate_responses(X, spec: ModelSpec, seed: Seed, count: int) -> np.ndarray:
    """``count`` independent responses as the columns of an (n, count) array."""
    X = linalg.as_matrix(X, "X")
    if X.shape[1] != spec.p:
        raise DimensionMismatch(f"X has {X.shape[1]} columns but beta0 has length {spec.p}")
    eps = make_rng(seed).standard_normal((X.shape[0], count))
    return (X @ spec.beta0)[:, None] + np.sqrt(spec.sigma2) * eps


def exact_solve(data: DesignData, hat_cap: int = HAT_CAP) -> ExactFit:
    beta_hat = data.x_pinv @ data.y
    y_hat = data.hat_apply(data.y)
    residual = data.y - y_hat
    ny = float(np.linalg.norm(data.y))
    cos_theta = float(np.linalg.norm(y_hat)) / ny if ny > 0 else float("nan")
    return ExactFit(
        beta_hat=beta_hat,
        y_hat=y_hat,
        residual=residual,
        cos_theta=min(cos_theta, 1.0),
        kappa_x=data.kappa,
        x_norm=data.x_norm,
        y=data.y,
        hat_matrix=data.hat_matrix() if data.n <= hat_cap else None,
    )


def model_variance(data: DesignData, spec: ModelSpec) -> np.ndarray:
    """sigma^2 (X^T X)^{-1}, the covariance of the exact estimator."""
    if spec.p != data.p:
        raise DimensionMismatch(f"beta0 has length {spec.p} but X has {data.p} columns")
    return spec.sigma2 * data.gram_inv
