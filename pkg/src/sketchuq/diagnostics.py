"""Rank-preservation diagnostic based on the bias projector P0.

P0 is an orthogonal projector, so its nonzero singular values are all one
and kappa_2(P0) is either 1 (rank preserved) or infinite. The categorical
value is derived from rank(SX); the raw smallest singular value of P0 is
kept alongside for inspection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .model import DesignData, ExactFit
from .projector import sketch_system
from .seeding import derive_seed
from .sketch import SketchDraw, SketchScheme, draw_sketch


@dataclass(frozen=True)
class DiagnosticRecord:
    kappa_p0: float
    rank_preserved: bool
    rank_sx: int
    rel_err_beta: float
    rel_err_pred: float
    sigma_min_p0: float
    scheme: str | None = None
    r: int | None = None
    seed: int | None = None
    beta_err_absolute: bool = False


def diagnose(data: DesignData, draw: SketchDraw, fit: ExactFit) -> DiagnosticRecord:
    sys = sketch_system(data, draw)
    P0 = sys.SX_pinv @ sys.SX
    sv = np.linalg.svd(P0, compute_uv=False)
    beta = sys.SX_pinv @ draw.apply(data.y)
    preserved = sys.rank == data.p

    err = float(np.linalg.norm(beta - fit.beta_hat))
    nb = float(np.linalg.norm(fit.beta_hat))
    absolute = nb == 0.0
    rel_beta = err if absolute else err / nb
    ny = float(np.linalg.norm(fit.y_hat))
    pred_err = float(np.linalg.norm(data.X @ beta - fit.y_hat))
    rel_pred = pred_err / ny if ny > 0 else pred_err

    scheme = draw.scheme
    return DiagnosticRecord(
        kappa_p0=1.0 if preserved else math.inf,
        rank_preserved=preserved,
        rank_sx=sys.rank,
        rel_err_beta=rel_beta,
        rel_err_pred=rel_pred,
        sigma_min_p0=float(sv[-1]),
        scheme=scheme.kind.value if scheme else None,
        r=draw.r,
        seed=draw.seed if isinstance(draw.seed, int) else None,
        beta_err_absolute=absolute,
    )


def kappa_from_singular_values(P0: np.ndarray) -> float:
    """kappa_2(P0) from its singular values, treating values below 1/2 as zero."""
    sv = np.linalg.svd(P0, compute_uv=False)
    if sv[-1] < 0.5:
        return math.inf
    return float(sv[0] / sv[-1])


@dataclass(frozen=True)
class RankProbability:
    estimate: float
    stderr: float
    n_replicates: int
    n_preserved: int


def rank_preservation_probability(
    data: DesignData, scheme: SketchScheme, n_replicates: int, seed: int
) -> RankProbability:
    """Fraction of independent draws with rank(SX) = p, with binomial stderr."""
    if n_replicates < 1:
        raise InvalidInput("n_replicates must be >= 1")
    hits = 0
    for i in range(n_replicates):
        draw = draw_sketch(scheme, data, derive_seed(seed, i))
        hits += sketch_system(data, draw).rank == data.p
    est = hits / n_replicates
    return RankProbability(est, math.sqrt(est * (1 - est) / n_replicates), n_replicates, hits)
