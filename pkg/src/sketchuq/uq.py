"""Uncertainty quantification for the sketched estimator.

Closed forms are evaluated from per-draw p x p quantities, never from n x n
expectations:

* ``X^+ P = (SX)^+ S =: B`` so the conditional covariance is ``sigma2 B B^T``;
* ``trace(P P^T) = ||P||_F^2 = trace(B B^T X^T X)``.

Expectations over S are Monte Carlo averages. Standard errors are
delete-one jackknife over draws; for matrix-valued estimates the jackknife
deviations are measured in the spectral norm.

``empirical_oracle`` estimates the same quantities by brute force (draw S,
draw noise, solve) and shares none of the assembly code.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .errors import (
    AllDrawsRankDeficient,
    BoundUndefined,
    DimensionMismatch,
    InsufficientDraws,
)
from .model import HAT_CAP, DesignData, ExactFit, ModelSpec, model_variance, simulate_responses
from .projector import ProjectorSet, SketchedFit, build_projectors, sketch_system
from .seeding import derive_seed
from .sketch import SketchDraw, SketchScheme, draw_sketch

BOUND_RTOL = 1e-9
BOUND_ATOL = 1e-12


def _check_spec(data: DesignData, spec: ModelSpec):
    if spec.p != data.p:
        raise DimensionMismatch(f"beta0 has length {spec.p} but X has {data.p} columns")


# -- conditional moments -------------------------------------------------------


@dataclass(frozen=True)
class ConditionalMoments:
    cond_mean: np.ndarray
    cond_var: np.ndarray
    cond_var_excess: np.ndarray
    model_var: np.ndarray
    P0: np.ndarray
    rank_sx: int


def conditional_moments(
    data: DesignData, spec: ModelSpec, draw: SketchDraw, cap: int = HAT_CAP
) -> ConditionalMoments:
    """Mean and covariance of the sketched solution given S, over the noise."""
    _check_spec(data, spec)
    sys = sketch_system(data, draw)
    B = sys.B
    P0 = sys.SX_pinv @ sys.SX
    cond_var = spec.sigma2 * (B @ B.T)
    Xp = data.x_pinv
    if data.n <= cap:
        P = data.X @ B
        excess = spec.sigma2 * (Xp @ (P @ P.T - data.hat_matrix()) @ Xp.T)
    else:
        excess = cond_var - spec.sigma2 * data.gram_inv
    return ConditionalMoments(
        cond_mean=P0 @ spec.beta0,
        cond_var=cond_var,
        cond_var_excess=excess,
        model_var=model_variance(data, spec),
        P0=P0,
        rank_sx=sys.rank,
    )


# -- Monte Carlo over sketches -------------------------------------------------


@dataclass
class DrawSamples:
    """Per-draw quantities, stacked along axis 0."""

    P0: np.ndarray  # (N, p, p)
    v: np.ndarray  # (N, p)      P0 beta0
    C: np.ndarray  # (N, p, p)   sigma2 B B^T
    fro2: np.ndarray  # (N,)     ||P||_F^2
    pb2: np.ndarray  # (N,)      ||X (I - P0) beta0||^2
    w: np.ndarray  # (N, p)      B B^T X^T X beta0, so that P P^T X beta0 = X w
    rank: np.ndarray  # (N,)
    seeds: np.ndarray  # (N,) uint64

    def subset(self, mask) -> "DrawSamples":
        return DrawSamples(*(getattr(self, f)[mask] for f in self.__dataclass_fields__))

    def __len__(self):
        return self.rank.size


def _draw_terms(data: DesignData, spec: ModelSpec, draw: SketchDraw):
    sys = sketch_system(data, draw)
    B = sys.B
    BBt = B @ B.T
    P0 = sys.SX_pinv @ sys.SX
    b0 = spec.beta0
    G = data.gram
    v = P0 @ b0
    d = data.X @ (b0 - v)
    return (
        P0,
        v,
        spec.sigma2 * BBt,
        float(np.sum(BBt * G)),
        float(d @ d),
        BBt @ (G @ b0),
        sys.rank,
    )


def sample_draws(
    data: DesignData,
    spec: ModelSpec,
    scheme: SketchScheme,
    n_draws: int,
    seed: int,
    threads: int = 1,
) -> DrawSamples:
    """Draw ``n_draws`` sketches with seeds derived from ``(seed, i)``."""
    seeds = [derive_seed(seed, i) for i in range(n_draws)]

    def one(s):
        return _draw_terms(data, spec, draw_sketch(scheme, data, s))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(one, seeds, chunksize=max(1, n_draws // (4 * threads))))
    else:
        rows = [one(s) for s in seeds]
    cols = list(zip(*rows))
    return DrawSamples(
        P0=np.array(cols[0]),
        v=np.array(cols[1]),
        C=np.array(cols[2]),
        fro2=np.array(cols[3]),
        pb2=np.array(cols[4]),
        w=np.array(cols[5]),
        rank=np.array(cols[6], dtype=np.int64),
        seeds=np.array(seeds, dtype=np.uint64),
    )


def _jackknife(samples: dict, stat: Callable, spectral=()):
    """Delete-one jackknife for a dict-valued statistic.

    ``samples`` maps names to arrays with the draw index on axis 0. ``stat``
    receives the corresponding means (with a leading batch axis) and the
    sample count, must broadcast over the batch axis, and returns a dict.
    Returns ``(estimates, stderrs)``. Keys listed in ``spectral`` are
    matrix-valued and get a scalar stderr from spectral norms of the
    leave-one-out deviations; all other keys get elementwise stderrs.
    """
    N = next(iter(samples.values())).shape[0]
    totals = {k: a.sum(axis=0) for k, a in samples.items()}
    full = {k: v[0] for k, v in stat({k: t[None] / N for k, t in totals.items()}, N).items()}
    if N < 3:
        return full, {k: (np.nan if k in spectral else np.full(np.shape(v), np.nan)) for k, v in full.items()}
    loo = stat({k: (totals[k][None] - a) / (N - 1) for k, a in samples.items()}, N - 1)
    se = {}
    for k, vals in loo.items():
        dev = vals - vals.mean(axis=0)
        if k in spectral:
            norms = np.linalg.norm(dev, ord=2, axis=(-2, -1))
            se[k] = float(np.sqrt((N - 1) / N * np.sum(norms**2)))
        else:
            se[k] = np.sqrt((N - 1) / N * np.sum(dev**2, axis=0))
            if se[k].ndim == 0:
                se[k] = float(se[k])
    return full, se


@dataclass(frozen=True)
class TotalMoments:
    mean_p0: np.ndarray
    mean_ppt: np.ndarray | None
    var_p0beta: np.ndarray
    total_mean: np.ndarray
    total_var: np.ndarray
    model_var: np.ndarray
    excess_var_proj: np.ndarray
    n_draws: int
    mc_std_err: float
    stderr: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


def _pieces(m, N, data: DesignData, spec: ModelSpec):
    """Assemble every closed-form quantity from batched draw means."""
    p = data.p
    b0 = spec.beta0
    I = np.eye(p)
    mv = spec.sigma2 * data.gram_inv
    mean_p0 = m["P0"]
    v = m["v"]
    vv = m["vv"]
    var_p0b = (vv - np.einsum("...i,...j->...ij", v, v)) * (N / max(N - 1, 1))
    Vp = m["C"] - mv
    bias = np.einsum("...ij,j->...i", mean_p0 - I, b0)
    total_var = mv + Vp + var_p0b
    Xb = data.X @ b0
    pp_dev = np.einsum("...j,nj->...n", m["w"], data.X) - Xb
    return {
        "mean_p0": mean_p0,
        "var_p0beta": var_p0b,
        "excess_var_proj": Vp,
        "excess_bias": bias,
        "total_mean": b0 + bias,
        "total_var": total_var,
        "tr_vp": np.trace(Vp, axis1=-2, axis2=-1),
        "tr_vr": np.trace(var_p0b, axis1=-2, axis2=-1),
        "bias_sq": np.sum(bias**2, axis=-1),
        "risk_excess_var": spec.sigma2 * (m["fro2"] - p),
        "risk_excess_bias": m["pb2"],
        "risk_bias_sq": np.sum((np.einsum("nj,...j->...n", data.X, bias)) ** 2, axis=-1),
        "risk_bias_pp_form": np.sum(pp_dev**2, axis=-1),
        "min_eig_excess": np.linalg.eigvalsh(Vp + var_p0b)[..., 0],
    }


def _sample_dict(s: DrawSamples) -> dict:
    return {
        "P0": s.P0,
        "v": s.v,
        "vv": np.einsum("ni,nj->nij", s.v, s.v),
        "C": s.C,
        "fro2": s.fro2,
        "pb2": s.pb2,
        "w": s.w,
    }


def _filter(samples: DrawSamples, p: int, rank_conditioned: bool):
    n_total = len(samples)
    if rank_conditioned:
        samples = samples.subset(samples.rank == p)
        if len(samples) == 0:
            raise AllDrawsRankDeficient(f"none of the {n_total} draws preserved rank {p}")
    if len(samples) < 2:
        raise InsufficientDraws(f"need at least 2 usable draws, got {len(samples)}")
    return samples, 1.0 - len(samples) / n_total


_MATRIX_KEYS = ("mean_p0", "var_p0beta", "excess_var_proj", "total_var")


def _estimate(samples: DrawSamples, data: DesignData, spec: ModelSpec):
    def stat(m, N):
        P = _pieces(m, N, data, spec)
        # composite scalars get their own jackknife since the pieces are correlated
        P["mse_excess"] = P["tr_vp"] + P["tr_vr"] + P["bias_sq"]
        P["risk_excess"] = P["risk_excess_var"] + P["risk_excess_bias"]
        return P

    return _jackknife(_sample_dict(samples), stat, spectral=_MATRIX_KEYS)


def _n_draws_check(n_draws: int):
    if n_draws < 2:
        raise InsufficientDraws(f"need at least 2 draws, got {n_draws}")


def total_moments(
    data: DesignData,
    spec: ModelSpec,
    scheme: SketchScheme,
    n_draws: int,
    seed: int,
    rank_conditioned: bool = False,
    threads: int = 1,
    cap: int = HAT_CAP,
) -> TotalMoments:
    """Total mean and covariance of the sketched solution over noise and sketch.

    E_S[P0], E_S[sigma2 X^+ P P^T X^+T] and V_S[P0 beta0] are Monte Carlo
    averages over ``n_draws`` sketches (unbiased covariance for the last).
    """
    _check_spec(data, spec)
    _n_draws_check(n_draws)
    samples = sample_draws(data, spec, scheme, n_draws, seed, threads)
    return _total_from_samples(data, spec, scheme, samples, seed, rank_conditioned, cap)


def _total_from_samples(data, spec, scheme, samples, seed, rank_conditioned, cap):
    kept, rejection = _filter(samples, data.p, rank_conditioned)
    est, se = _estimate(kept, data, spec)
    mean_ppt = None
    if data.n <= cap:
        mean_ppt = _mean_ppt(data, scheme, kept)
    return TotalMoments(
        mean_p0=est["mean_p0"],
        mean_ppt=mean_ppt,
        var_p0beta=est["var_p0beta"],
        total_mean=est["total_mean"],
        total_var=est["total_var"],
        model_var=model_variance(data, spec),
        excess_var_proj=est["excess_var_proj"],
        n_draws=len(kept),
        mc_std_err=float(se["total_var"]),
        stderr=se,
        meta=_meta(scheme, seed, len(samples), len(kept), rejection, rank_conditioned),
    )


def _mean_ppt(data: DesignData, scheme: SketchScheme, kept: DrawSamples) -> np.ndarray:
    acc = np.zeros((data.n, data.n))
    for s in kept.seeds:
        B = sketch_system(data, draw_sketch(scheme, data, int(s))).B
        XB = data.X @ B
        acc += XB @ XB.T
    return acc / len(kept)


def _meta(scheme, seed, n_draws, n_used, rejection, rank_conditioned):
    return {
        "scheme": scheme.kind.value,
        "r": scheme.r,
        "seed": int(seed),
        "n_draws": int(n_draws),
        "n_used": int(n_used),
        "rejection_rate": float(rejection),
        "rank_conditioned": bool(rank_conditioned),
        "stderr_method": "delete-one jackknife over sketch draws",
        "rank_tolerance": "max(r, p) * eps * sigma_max(SX)",
    }


@dataclass(frozen=True)
class DecompositionReport:
    """Bias/variance/MSE/risk split of the sketched estimator.

    ``risk_excess_bias`` is E_S ||X (I - P0) beta0||^2, the exact
    contribution of rank loss to the predictive risk (squared bias plus the
    across-sketch variance of X P0 beta0). ``risk_bias_pp_form`` is the
    alternative expression ||(E_S[P P^T] - P_x) X beta0||^2, reported only
    for comparison; it does not vanish under rank preservation and does not
    match simulation in general.
    """

    excess_bias: np.ndarray
    excess_var_proj: np.ndarray
    excess_var_rank: np.ndarray
    total_mean: np.ndarray
    total_var: np.ndarray
    model_var: np.ndarray
    mse_total: float
    mse_model: float
    mse_excess: float
    risk_total: float
    risk_model: float
    risk_excess_var: float
    risk_excess_bias: float
    risk_bias_sq: float
    risk_bias_pp_form: float
    min_eig_excess: float
    trace_excess_var_proj: float
    rank_conditioned: bool
    mc_std_err: float
    stderr: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def total_bias(self) -> np.ndarray:
        return self.excess_bias


def decompose(
    data: DesignData,
    spec: ModelSpec,
    scheme: SketchScheme,
    n_draws: int,
    seed: int,
    rank_conditioned: bool = False,
    threads: int = 1,
) -> DecompositionReport:
    """Full bias/variance, MSE and predictive-risk decomposition.

    With ``rank_conditioned`` draws with rank(SX) < p are discarded and the
    rejection rate is recorded; the excess MSE is then trace(V_P) and the
    excess risk is the variance term alone.
    """
    _check_spec(data, spec)
    _n_draws_check(n_draws)
    samples = sample_draws(data, spec, scheme, n_draws, seed, threads)
    kept, rejection = _filter(samples, data.p, rank_conditioned)
    est, se = _estimate(kept, data, spec)
    mv = model_variance(data, spec)
    mse_model = float(np.trace(mv))
    risk_model = spec.sigma2 * data.p
    if rank_conditioned:
        mse_excess = float(est["tr_vp"])
        se_mse = se["tr_vp"]
        risk_excess = float(est["risk_excess_var"])
        se_risk = se["risk_excess_var"]
    else:
        mse_excess = float(est["mse_excess"])
        se_mse = se["mse_excess"]
        risk_excess = float(est["risk_excess"])
        se_risk = se["risk_excess"]
    stderr = {
        "excess_bias": se["excess_bias"],
        "excess_var_proj": se["excess_var_proj"],
        "excess_var_rank": se["var_p0beta"],
        "total_var": se["total_var"],
        "total_mean": se["total_mean"],
        "mse_total": se_mse,
        "mse_excess": se_mse,
        "risk_total": se_risk,
        "risk_excess_var": se["risk_excess_var"],
        "risk_excess_bias": se["risk_excess_bias"],
        "risk_bias_sq": se["risk_bias_sq"],
        "risk_bias_pp_form": se["risk_bias_pp_form"],
        "min_eig_excess": se["min_eig_excess"],
        "trace_excess_var_proj": se["tr_vp"],
    }
    return DecompositionReport(
        excess_bias=est["excess_bias"],
        excess_var_proj=est["excess_var_proj"],
        excess_var_rank=est["var_p0beta"],
        total_mean=est["total_mean"],
        total_var=est["total_var"],
        model_var=mv,
        mse_total=mse_model + mse_excess,
        mse_model=mse_model,
        mse_excess=mse_excess,
        risk_total=risk_model + risk_excess,
        risk_model=risk_model,
        risk_excess_var=float(est["risk_excess_var"]),
        risk_excess_bias=0.0 if rank_conditioned else float(est["risk_excess_bias"]),
        risk_bias_sq=float(est["risk_bias_sq"]),
        risk_bias_pp_form=float(est["risk_bias_pp_form"]),
        min_eig_excess=float(est["min_eig_excess"]),
        trace_excess_var_proj=float(est["tr_vp"]),
        rank_conditioned=rank_conditioned,
        mc_std_err=float(se["total_var"]),
        stderr=stderr,
        meta=_meta(scheme, seed, len(samples), len(kept), rejection, rank_conditioned),
    )


# -- brute-force oracle --------------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    """Direct simulation estimates; no closed-form expression is used.

    ``within_var`` estimates E_S[Cov(beta~ | S)], ``between_var`` estimates
    Cov_S(E[beta~ | S]); ``model_var`` is the empirical covariance of the
    exact estimator on the same noise draws.
    """

    total_mean: np.ndarray
    total_var: np.ndarray
    model_var: np.ndarray
    within_var: np.ndarray
    between_var: np.ndarray
    bias: np.ndarray
    mse_total: float
    mse_model: float
    risk_total: float
    risk_model: float
    n_noise: int
    n_draws: int
    stderr: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def excess_var_proj(self) -> np.ndarray:
        return self.within_var - self.model_var

    @property
    def excess_var_rank(self) -> np.ndarray:
        return self.between_var


def empirical_oracle(
    data: DesignData,
    spec: ModelSpec,
    scheme: SketchScheme,
    n_noise: int,
    n_draws: int,
    seed: int,
    rank_conditioned: bool = False,
) -> OracleReport:
    """Estimate the total moments of the sketched solution by simulation.

    For each of ``n_draws`` sketches, ``n_noise`` fresh responses are drawn
    and both the sketched and the exact problem are solved with numpy's
    ``lstsq``. Standard errors are delete-one jackknife over sketch groups.
    """
    _check_spec(data, spec)
    if n_noise < 2 or n_draws < 2:
        raise InsufficientDraws("oracle needs n_noise >= 2 and n_draws >= 2")
    X, b0, K = data.X, spec.beta0, n_noise
    groups = []
    rejected = 0
    for j in range(n_draws):
        draw = draw_sketch(scheme, data, derive_seed(seed, 0, j))
        SX = draw.apply(X)
        if rank_conditioned and np.linalg.matrix_rank(SX) < data.p:
            rejected += 1
            continue
        Y = simulate_responses(X, spec, derive_seed(seed, 1, j), K)
        bt = np.linalg.lstsq(SX, draw.apply(Y), rcond=None)[0]  # (p, K)
        bh = np.linalg.lstsq(X, Y, rcond=None)[0]
        dt = bt - b0[:, None]
        dh = bh - b0[:, None]
        mt = bt.mean(axis=1)
        groups.append(
            {
                "t": mt,
                "tt": bt @ bt.T / K,
                "h": bh.mean(axis=1),
                "hh": bh @ bh.T / K,
                "within": np.cov(bt, ddof=1),
                "gm": np.outer(mt, mt),
                "mse": np.mean(np.sum(dt**2, axis=0)),
                "mse_h": np.mean(np.sum(dh**2, axis=0)),
                "risk": np.mean(np.sum((X @ dt) ** 2, axis=0)),
                "risk_h": np.mean(np.sum((X @ dh) ** 2, axis=0)),
            }
        )
    if rank_conditioned and not groups:
        raise AllDrawsRankDeficient(f"none of the {n_draws} oracle draws preserved rank")
    if len(groups) < 2:
        raise InsufficientDraws(f"need at least 2 usable oracle draws, got {len(groups)}")
    d = {k: np.array([g[k] for g in groups]) for k in groups[0]}
    d["within"] = d["within"].reshape(len(groups), data.p, data.p)

    def stats(m, J):
        NK = J * K
        c = NK / (NK - 1)
        t, h = m["t"], m["h"]
        total_var = (m["tt"] - np.einsum("...i,...j->...ij", t, t)) * c
        model_var = (m["hh"] - np.einsum("...i,...j->...ij", h, h)) * c
        between = (m["gm"] - np.einsum("...i,...j->...ij", t, t)) * (J / max(J - 1, 1)) - m[
            "within"
        ] / K
        return {
            "total_mean": t,
            "total_var": total_var,
            "model_var": model_var,
            "within_var": m["within"],
            "between_var": between,
            "excess_var_proj": m["within"] - model_var,
            "bias": t - b0,
            "mse_total": m["mse"],
            "mse_model": m["mse_h"],
            "mse_excess": m["mse"] - m["mse_h"],
            "risk_total": m["risk"],
            "risk_model": m["risk_h"],
            "risk_excess": m["risk"] - m["risk_h"],
        }

    matrix_keys = ("total_var", "model_var", "within_var", "between_var", "excess_var_proj")
    out, se = _jackknife(d, stats, spectral=matrix_keys)
    return OracleReport(
        total_mean=out["total_mean"],
        total_var=out["total_var"],
        model_var=out["model_var"],
        within_var=out["within_var"],
        between_var=out["between_var"],
        bias=out["bias"],
        mse_total=float(out["mse_total"]),
        mse_model=float(out["mse_model"]),
        risk_total=float(out["risk_total"]),
        risk_model=float(out["risk_model"]),
        n_noise=n_noise,
        n_draws=len(groups),
        stderr=se,
        meta={
            "scheme": scheme.kind.value,
            "r": scheme.r,
            "seed": int(seed),
            "rejection_rate": rejected / n_draws,
            "rank_conditioned": rank_conditioned,
        },
    )


def _z(diff: float, *ses) -> float:
    se = float(np.sqrt(sum(float(s) ** 2 for s in ses)))
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else float("inf")


def agreement_z(rep: DecompositionReport, orc: OracleReport) -> dict:
    """|closed form - oracle| in units of their combined standard error.

    Vectors use the worst coordinate, matrices the spectral norm of the gap.
    """
    gap = lambda A, B: float(np.linalg.norm(A - B, 2))
    return {
        "total_mean_max_z": max(
            _z(abs(a - b), sa, sb)
            for a, b, sa, sb in zip(
                rep.total_mean, orc.total_mean, rep.stderr["total_mean"], orc.stderr["total_mean"]
            )
        ),
        "total_var": _z(gap(rep.total_var, orc.total_var), rep.stderr["total_var"], orc.stderr["total_var"]),
        "excess_var_proj": _z(
            gap(rep.excess_var_proj, orc.excess_var_proj),
            rep.stderr["excess_var_proj"],
            orc.stderr["excess_var_proj"],
        ),
        "excess_var_rank": _z(
            gap(rep.excess_var_rank, orc.excess_var_rank),
            rep.stderr["excess_var_rank"],
            orc.stderr["between_var"],
        ),
        "mse_total": _z(abs(rep.mse_total - orc.mse_total), rep.stderr["mse_total"], orc.stderr["mse_total"]),
        "risk_total": _z(abs(rep.risk_total - orc.risk_total), rep.stderr["risk_total"], orc.stderr["risk_total"]),
    }


def conditional_oracle(
    data: DesignData, spec: ModelSpec, draw: SketchDraw, n_noise: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical mean and covariance of the sketched solution for a fixed S."""
    _check_spec(data, spec)
    Y = simulate_responses(data.X, spec, seed, n_noise)
    bt = np.linalg.lstsq(draw.apply(data.X), draw.apply(Y), rcond=None)[0]
    return bt.mean(axis=1), np.cov(bt, ddof=1)


# -- structural bounds ---------------------------------------------------------


@dataclass(frozen=True)
class BoundRecord:
    """Left/right-hand sides of the deterministic error bounds for one draw.

    ``solution_rhs`` is kappa(X) ||y|| / (||X|| ||beta_hat||) ||P - P_x||;
    ``solution_rhs_cos`` replaces the middle factor by 1 / cos(theta).
    ``residual_*`` is the residual-ratio bound kappa(X) sqrt(gamma^-2 - 1) sqrt(eta),
    evaluated with gamma = cos(theta) and eta = ||e~|| / ||e^|| - 1.
    """

    solution_lhs: float
    solution_rhs: float
    solution_holds: bool
    solution_rhs_cos: float | None
    solution_cos_holds: bool | None
    prediction_lhs: float | None
    prediction_rhs: float | None
    prediction_holds: bool | None
    cos_theta: float
    dev_ppx: float
    residual_gamma: float | None = None
    residual_eta: float | None = None
    residual_rhs: float | None = None
    residual_holds: bool | None = None
    skipped: tuple = ()


def _le(lhs, rhs):
    return bool(lhs <= rhs * (1 + BOUND_RTOL) + BOUND_ATOL)


def structural_bounds(fit: ExactFit, sfit: SketchedFit, proj: ProjectorSet) -> BoundRecord:
    bh = fit.beta_hat
    nbh = float(np.linalg.norm(bh))
    if nbh == 0.0:
        raise BoundUndefined("beta_hat = 0: the relative solution bound is undefined")
    y = fit.y
    ny = float(np.linalg.norm(y))
    dev = proj.dev_ppx
    kappa = fit.kappa_x
    skipped = []

    sol_lhs = float(np.linalg.norm(sfit.beta_tilde - bh)) / nbh
    sol_rhs = kappa * ny / (fit.x_norm * nbh) * dev

    cos = fit.cos_theta
    sol_rhs_cos = sol_cos_holds = pred_lhs = pred_rhs = pred_holds = None
    if cos > 0 and np.isfinite(cos):
        sol_rhs_cos = kappa * dev / cos
        sol_cos_holds = _le(sol_lhs, sol_rhs_cos)
        pred_lhs = float(np.linalg.norm(sfit.y_tilde - fit.y_hat)) / float(np.linalg.norm(fit.y_hat))
        pred_rhs = dev / cos
        pred_holds = _le(pred_lhs, pred_rhs)
    else:
        skipped.append("cos_theta forms: y is orthogonal to range(X)")

    gamma = eta = d_rhs = d_holds = None
    ne_hat = float(np.linalg.norm(fit.residual))
    if cos > 0 and ne_hat > 0:
        gamma = cos
        eta = float(np.linalg.norm(sfit.residual_tilde)) / ne_hat - 1.0
        if eta >= 0:
            d_rhs = kappa * np.sqrt(max(gamma**-2 - 1.0, 0.0)) * np.sqrt(eta)
            d_holds = _le(sol_lhs, d_rhs)
        else:
            skipped.append("residual bound: eta < 0")
    else:
        skipped.append("residual bound: y in range(X) or orthogonal to it")

    return BoundRecord(
        solution_lhs=sol_lhs,
        solution_rhs=float(sol_rhs),
        solution_holds=_le(sol_lhs, sol_rhs),
        solution_rhs_cos=sol_rhs_cos,
        solution_cos_holds=sol_cos_holds,
        prediction_lhs=pred_lhs,
        prediction_rhs=pred_rhs,
        prediction_holds=pred_holds,
        cos_theta=cos,
        dev_ppx=dev,
        residual_gamma=gamma,
        residual_eta=eta,
        residual_rhs=d_rhs,
        residual_holds=d_holds,
        skipped=tuple(skipped),
    )
