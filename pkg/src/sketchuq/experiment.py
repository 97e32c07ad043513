"""Sweep harness: schemes x sketch dimensions x replicates.

For every cell it records the rank-preservation diagnostic and the relative
error of the sketched solution, then summarises each (scheme, r) cell by
Pr[rank preserved] and the median log10 relative error.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .diagnostics import diagnose
from .errors import InvalidConfig, ParseError, RankDeficientDesign, SketchUQError
from .model import DesignData, ModelSpec, exact_solve, simulate_response
from .seeding import derive_seed, make_rng
from .sketch import SchemeKind, SketchScheme, draw_sketch

RECORD_COLUMNS = [
    "scheme",
    "r",
    "replicate",
    "seed",
    "rank_preserved",
    "kappa_p0",
    "rel_err_beta",
    "rel_err_pred",
    "wall_time_us",
]
SUMMARY_COLUMNS = ["scheme", "r", "pr_rank_preserved", "pr_stderr", "median_log10_rel_err"]


# -- synthetic data -------------------------------------------------------------


def generate_synthetic_design(
    n: int,
    p: int,
    coherence: float,
    seed: int,
    sigma2: float = 1e-12,
    sparsity: float = 0.3,
    n_outliers: int = 10,
    max_tries: int = 20,
) -> tuple[DesignData, ModelSpec]:
    """Gaussian-model regression data with tunable leverage heterogeneity.

    The first column is an intercept and the rest are i.i.d. standard normal.
    For ``coherence > 0`` two things change, both growing with coherence:

    * ``n_outliers`` rows have their continuous entries scaled by
      ``(1 - coherence)^-2``, which concentrates leverage on them;
    * ``ceil(coherence * max(1, (p - 1) // 10))`` columns become rare
      indicators, each supported on ``max(2, n (1 - coherence) / 5)`` rows.
      A row sample that misses a support loses rank, which is what makes
      uniform sampling need a larger r than leverage sampling.

    ``beta0`` is standard normal with the ``sparsity`` fraction of smallest
    continuous coefficients set to zero; indicator coefficients are kept
    away from zero.
    """
    if n <= p or p < 1:
        raise InvalidConfig(f"need n > p >= 1, got n={n}, p={p}")
    if not 0.0 <= coherence < 1.0:
        raise InvalidConfig(f"coherence must lie in [0, 1), got {coherence}")
    if not 0.0 <= sparsity < 1.0:
        raise InvalidConfig(f"sparsity must lie in [0, 1), got {sparsity}")
    for attempt in range(max_tries):
        rng = make_rng((seed, attempt))
        X = rng.standard_normal((n, p))
        if p > 1:
            X[:, 0] = 1.0
        rare = []
        if coherence > 0 and p > 2:
            k = min(p - 2, math.ceil(coherence * max(1, (p - 1) // 10)))
            m = max(2, round(n * (1 - coherence) / 5))
            n_out = min(n_outliers, n // 10)
            outliers = rng.choice(n, size=n_out, replace=False)
            pool = np.setdiff1d(np.arange(n), outliers)
            rare = list(range(p - k, p))
            for j in rare:
                X[:, j] = 0.0
                X[rng.choice(pool, size=min(m, pool.size), replace=False), j] = 1.0
            X[np.ix_(outliers, np.arange(1, p - k))] *= (1.0 - coherence) ** -2
        beta0 = rng.standard_normal(p)
        cont = [j for j in range(1, p) if j not in rare]
        n_zero = int(round(sparsity * len(cont)))
        if n_zero:
            order = sorted(cont, key=lambda j: abs(beta0[j]))
            beta0[order[:n_zero]] = 0.0
        for j in rare:
            beta0[j] = math.copysign(1.0 + abs(beta0[j]), beta0[j])
        spec = ModelSpec(beta0, sigma2)
        y = simulate_response(X, spec, derive_seed(seed, attempt, 1))
        try:
            return DesignData(X, y), spec
        except RankDeficientDesign:
            continue
    raise InvalidConfig(f"could not draw a full-rank design in {max_tries} attempts")


# -- configuration --------------------------------------------------------------


@dataclass
class SyntheticSource:
    n: int = 2000
    p: int = 21
    coherence: float = 0.9
    sigma2: float = 1e-12
    sparsity: float = 0.3
    seed: int | None = None
    kind: str = "synthetic"


@dataclass
class CsvSource:
    x: str
    y: str
    header: bool = False
    kind: str = "csv"


@dataclass
class ExperimentConfig:
    schemes: list = field(default_factory=lambda: ["unif", "lev", "norm"])
    r_grid: list = field(default_factory=lambda: list(range(20, 101, 5)))
    n_replicates: int = 100
    master_seed: int = 0
    data: SyntheticSource | CsvSource = field(default_factory=SyntheticSource)
    records_path: str | None = None
    summary_path: str | None = None

    def __post_init__(self):
        try:
            self.schemes = [SchemeKind(str(s).lower()).value for s in self.schemes]
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        self.r_grid = [int(r) for r in self.r_grid]
        if not self.r_grid or any(r < 1 for r in self.r_grid):
            raise InvalidConfig("r_grid must be a non-empty list of positive integers")
        if self.r_grid != sorted(self.r_grid):
            raise InvalidConfig("r_grid must be sorted ascending")
        if int(self.n_replicates) < 1:
            raise InvalidConfig("n_replicates must be >= 1")
        if int(self.master_seed) < 0 or int(self.master_seed) >= 2**64:
            raise InvalidConfig("master_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {
            "schemes",
            "r_grid",
            "n_replicates",
            "master_seed",
            "data",
            "outputs",
        }
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        grid = d.get("r_grid", list(range(20, 101, 5)))
        if isinstance(grid, dict):
            try:
                grid = list(range(int(grid["start"]), int(grid["stop"]) + 1, int(grid.get("step", 5))))
            except KeyError as exc:
                raise InvalidConfig(f"r_grid range needs key {exc}") from None
        src = dict(d.get("data", {"kind": "synthetic"}))
        kind = src.pop("kind", "synthetic")
        try:
            if kind == "synthetic":
                data = SyntheticSource(**src)
            elif kind == "csv":
                data = CsvSource(**src)
            else:
                raise InvalidConfig(f"unknown data kind {kind!r}")
        except TypeError as exc:
            raise InvalidConfig(f"bad data section: {exc}") from None
        outputs = d.get("outputs", {})
        return cls(
            schemes=d.get("schemes", ["unif", "lev", "norm"]),
            r_grid=grid,
            n_replicates=int(d.get("n_replicates", 100)),
            master_seed=int(d.get("master_seed", 0)),
            data=data,
            records_path=outputs.get("records"),
            summary_path=outputs.get("summary"),
        )

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", path, exc.lineno, exc.colno) from None
        except OSError as exc:
            raise ParseError(f"cannot read config ({exc.strerror})", path) from None

    def to_dict(self) -> dict:
        return {
            "schemes": list(self.schemes),
            "r_grid": list(self.r_grid),
            "n_replicates": self.n_replicates,
            "master_seed": self.master_seed,
            "data": asdict(self.data),
            "outputs": {"records": self.records_path, "summary": self.summary_path},
        }


def load_data(config: ExperimentConfig) -> DesignData:
    src = config.data
    if isinstance(src, CsvSource):
        X = io.read_matrix_csv(src.x, header=src.header)
        y = io.read_vector_csv(src.y, header=src.header)
        return DesignData(X, y)
    seed = src.seed if src.seed is not None else derive_seed(config.master_seed, 2**31)
    data, _ = generate_synthetic_design(
        src.n, src.p, src.coherence, seed, sigma2=src.sigma2, sparsity=src.sparsity
    )
    return data


# -- sweep ------------------------------------------------------------------------


@dataclass
class SweepResult:
    records: list
    summary: list
    config: ExperimentConfig

    def cell(self, scheme: str, r: int) -> dict:
        for row in self.summary:
            if row["scheme"] == scheme and row["r"] == r:
                return row
        raise KeyError((scheme, r))


def _run_replicate(data, fit, kind, r, seed, deterministic):
    t0 = time.perf_counter_ns()
    draw = draw_sketch(SketchScheme(kind, r), data, seed)
    rec = diagnose(data, draw, fit)
    elapsed = 0 if deterministic else (time.perf_counter_ns() - t0) // 1000
    return {
        "scheme": kind,
        "r": r,
        "seed": seed,
        "rank_preserved": int(rec.rank_preserved),
        "kappa_p0": rec.kappa_p0,
        "rel_err_beta": rec.rel_err_beta,
        "rel_err_pred": rec.rel_err_pred,
        "wall_time_us": int(elapsed),
    }


def summarize(records: list, schemes, r_grid) -> list:
    out = []
    for kind in schemes:
        for r in r_grid:
            rows = [x for x in records if x["scheme"] == kind and x["r"] == r]
            if not rows:
                continue
            pr = float(np.mean([x["rank_preserved"] for x in rows]))
            with np.errstate(divide="ignore"):
                logs = np.log10([x["rel_err_beta"] for x in rows])
            out.append(
                {
                    "scheme": kind,
                    "r": r,
                    "pr_rank_preserved": pr,
                    "pr_stderr": math.sqrt(pr * (1 - pr) / len(rows)),
                    "median_log10_rel_err": float(np.median(logs)),
                }
            )
    return out


def run_sweep(
    config: ExperimentConfig,
    data: DesignData | None = None,
    threads: int = 1,
    deterministic: bool = False,
) -> SweepResult:
    """Run every (scheme, r, replicate) cell and write the CSVs named in ``config``.

    Replicate seeds are ``derive_seed(master_seed, scheme_index, r_index,
    replicate)``. Results are collected in grid order, so output does not
    depend on ``threads``; ``deterministic`` additionally zeroes the timing
    column.
    """
    if data is None:
        data = load_data(config)
    fit = exact_solve(data, hat_cap=0)
    tasks = []
    for si, kind in enumerate(config.schemes):
        for ri, r in enumerate(config.r_grid):
            if r > data.n:
                raise InvalidConfig(f"cell ({kind}, r={r}): r exceeds n={data.n}")
            for rep in range(config.n_replicates):
                seed = derive_seed(config.master_seed, si, ri, rep)
                tasks.append((kind, r, rep, seed))

    def run(task):
        kind, r, rep, seed = task
        try:
            row = _run_replicate(data, fit, kind, r, seed, deterministic)
        except SketchUQError as exc:
            raise type(exc)(f"cell ({kind}, r={r}, replicate={rep}): {exc}") from exc
        row["replicate"] = rep
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            records = list(ex.map(run, tasks, chunksize=16))
    else:
        records = [run(t) for t in tasks]
    summary = summarize(records, config.schemes, config.r_grid)
    if config.records_path:
        write_csv(config.records_path, RECORD_COLUMNS, records)
    if config.summary_path:
        write_csv(config.summary_path, SUMMARY_COLUMNS, summary)
    return SweepResult(records, summary, config)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns, rows):
    """Write rows atomically: a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(row[c]) for c in columns])
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise OSError(f"writing {path}: {exc}") from exc


# -- transition analysis -----------------------------------------------------------


def _cells(summary, scheme):
    return sorted((row for row in summary if row["scheme"] == scheme), key=lambda x: x["r"])


def first_r_above(summary, scheme: str, level: float = 0.5) -> int | None:
    """Smallest r whose estimated rank-preservation probability exceeds ``level``."""
    for row in _cells(summary, scheme):
        if row["pr_rank_preserved"] > level:
            return row["r"]
    return None


def error_transition_r(summary, scheme: str, decades: float = 3.0) -> int | None:
    """Smallest r whose median log10 error is ``decades`` below the first grid point."""
    cells = _cells(summary, scheme)
    if not cells:
        return None
    base = cells[0]["median_log10_rel_err"]
    for row in cells:
        if row["median_log10_rel_err"] <= base - decades:
            return row["r"]
    return None
