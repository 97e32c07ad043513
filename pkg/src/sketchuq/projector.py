"""Oblique projector P = X (SX)^+ S, bias projector P0 = (SX)^+ SX, and the
minimum-norm sketched solution expressed through them.

P is only formed as an n x n array when n <= ``cap``. Beyond that it is kept
as the factor pair (X, B) with B = (SX)^+ S, and the spectral norms of
P - P_x and P P^T - P_x are estimated by power iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NumericalFailure
from .model import HAT_CAP, DesignData
from .sketch import SketchDraw

POWER_TOL = 1e-6
POWER_MAXITER = 500
IDENTITY_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SketchedSystem:
    """SX, its pseudoinverse and rank for one draw; shared by the solvers."""

    draw: SketchDraw
    SX: np.ndarray
    SX_pinv: np.ndarray
    rank: int
    tol: float

    @property
    def B(self) -> np.ndarray:
        """(SX)^+ S, shape (p, n). Equal to X^+ P."""
        return self.draw.scatter(self.SX_pinv)


def sketch_system(data: DesignData, draw: SketchDraw, tol: float | None = None) -> SketchedSystem:
    if draw.n != data.n:
        raise DimensionMismatch(f"sketch acts on {draw.n} rows but X has {data.n}")
    SX = draw.apply(data.X)
    f = linalg.svd(SX, tol)
    k = f.rank
    SX_pinv = (f.Vt[:k].T / f.s[:k]) @ f.U[:, :k].T
    return SketchedSystem(draw, SX, SX_pinv, k, f.tol)


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    P0: np.ndarray
    B: np.ndarray
    rank_sx: int
    dev_ppx: float
    dev_ppt: float
    dev_p0: float
    X: np.ndarray = field(repr=False)
    P: np.ndarray | None = field(default=None, repr=False)
    norm_method: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.P0.shape[0]

    @property
    def rank_preserved(self) -> bool:
        return self.rank_sx == self.p

    def apply(self, v: np.ndarray) -> np.ndarray:
        """P v."""
        return self.X @ (self.B @ v)

    def apply_t(self, v: np.ndarray) -> np.ndarray:
        """P^T v."""
        return self.B.T @ (self.X.T @ v)

    def matrix(self) -> np.ndarray:
        return self.P if self.P is not None else self.X @ self.B


def build_projectors(
    data: DesignData,
    draw: SketchDraw,
    cap: int = HAT_CAP,
    tol: float | None = None,
) -> ProjectorSet:
    sys = sketch_system(data, draw, tol)
    B = sys.B
    P0 = sys.SX_pinv @ sys.SX
    dev_p0 = linalg.spectral_norm(np.eye(data.p) - P0)
    U = data.basis
    if data.n <= cap:
        P = data.X @ B
        Px = U @ U.T
        dev_ppx = linalg.spectral_norm(P - Px)
        dev_ppt = linalg.spectral_norm(P @ P.T - Px)
        method = {"dev_ppx": "svd", "dev_ppt": "svd", "dev_p0": "svd"}
    else:
        P = None
        X = data.X

        def d1(v):
            return X @ (B @ v) - U @ (U.T @ v)

        def d1t(v):
            return B.T @ (X.T @ v) - U @ (U.T @ v)

        def d2(v):
            return X @ (B @ (B.T @ (X.T @ v))) - U @ (U.T @ v)

        e1 = linalg.power_norm(d1, d1t, data.n, POWER_TOL, POWER_MAXITER)
        e2 = linalg.power_norm(d2, d2, data.n, POWER_TOL, POWER_MAXITER)
        dev_ppx, dev_ppt = e1.value, e2.value
        method = {
            "dev_ppx": f"power(tol={POWER_TOL:g}, iters={e1.iterations}, converged={e1.converged})",
            "dev_ppt": f"power(tol={POWER_TOL:g}, iters={e2.iterations}, converged={e2.converged})",
            "dev_p0": "svd",
        }
    return ProjectorSet(
        P0=P0,
        B=B,
        rank_sx=sys.rank,
        dev_ppx=dev_ppx,
        dev_ppt=dev_ppt,
        dev_p0=dev_p0,
        X=data.X,
        P=P,
        norm_method=method,
    )


@dataclass(frozen=True)
class SketchedFit:
    beta_tilde: np.ndarray
    y_tilde: np.ndarray
    residual_tilde: np.ndarray
    y: np.ndarray
    rank_sx: int
    identity_error: float


def sketched_solve(
    data: DesignData,
    draw: SketchDraw,
    tol: float | None = None,
    check: bool = True,
) -> SketchedFit:
    """Minimum-norm solution (SX)^+ S y.

    With ``check`` the result is compared against X^+ P y and against
    beta_hat + X^+ (P - P_x) y; a relative discrepancy above 1e-8 raises
    ``NumericalFailure``.
    """
    sys = sketch_system(data, draw, tol)
    y = data.y
    beta = sys.SX_pinv @ draw.apply(y)
    y_tilde = data.X @ beta
    err = 0.0
    if check:
        err = projector_identity_error(data, beta, y_tilde)
        if err > IDENTITY_RTOL:
            raise NumericalFailure(f"projector identity violated: relative error {err:.3e}")
    return SketchedFit(beta, y_tilde, y - y_tilde, y, sys.rank, err)


def projector_identity_error(data: DesignData, beta_tilde, Py) -> float:
    """max relative gap between (SX)^+ S y, X^+ P y and beta_hat + X^+ (P - P_x) y."""
    Xp = data.x_pinv
    via_p = Xp @ Py
    via_dev = Xp @ data.y + Xp @ (Py - data.hat_apply(data.y))
    scale = max(np.linalg.norm(beta_tilde), np.linalg.norm(Xp @ data.y), np.finfo(float).tiny)
    return float(
        max(np.linalg.norm(beta_tilde - via_p), np.linalg.norm(beta_tilde - via_dev)) / scale
    )


def null_space_check(data: DesignData, draw: SketchDraw, rtol: float = 1e-8) -> bool:
    """True iff null(P) = null(X^T S^T S) numerically.

    Both inclusions are tested: P annihilates a basis of null(X^T S^T S), and
    X^T S^T S annihilates a basis of null(P). The dimensions must also agree.
    """
    sys = sketch_system(data, draw)
    M = draw.scatter(sys.SX.T)  # X^T S^T S, (p, n)
    B = sys.B

    def null_basis(A):
        _, s, Vt = np.linalg.svd(A, full_matrices=True)
        tol = linalg.default_rank_tol(A.shape, s[0] if s.size else 0.0)
        k = int(np.count_nonzero(s > tol))
        return Vt[k:].T

    N_M = null_basis(M)
    # X has full column rank, so null(P) = null(X B) = null(B)
    N_P = null_basis(B)
    if N_M.shape[1] != N_P.shape[1]:
        return False
    if N_M.shape[1] == 0:
        return True
    P_norm = max(data.x_norm * linalg.spectral_norm(B), 1.0)
    M_norm = max(linalg.spectral_norm(M), 1.0)
    ok_p = linalg.spectral_norm(data.X @ (B @ N_M)) <= rtol * P_norm
    ok_m = linalg.spectral_norm(M @ N_P) <= rtol * M_norm
    return bool(ok_p and ok_m)
