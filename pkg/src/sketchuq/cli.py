"""Command-line front end.

JSON goes to stdout, CSV to files, logs to stderr. Exit codes: 0 success,
2 precondition violation, 3 input parse error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import io
from .diagnostics import diagnose, rank_preservation_probability
from .errors import InvalidInput, ParseError, SketchUQError
from .experiment import CsvSource, ExperimentConfig, SyntheticSource, run_sweep
from .linalg import as_vector
from .model import DesignData, ModelSpec, exact_solve
from .projector import build_projectors, sketched_solve
from .seeding import GENERATOR_VERSION, entropy_seed
from .sketch import SchemeKind, SketchScheme, draw_sketch
from .uq import agreement_z, decompose, empirical_oracle

log = logging.getLogger("sketchuq")

SCHEMES = [k.value for k in SchemeKind]


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _pos(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _default_threads() -> int:
    env = os.environ.get("SKETCHUQ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer SKETCHUQ_THREADS=%r", env)
    return os.cpu_count() or 1


def _add_data(p, y_required=True):
    p.add_argument("--x", required=True, help="design matrix CSV, one observation per row")
    p.add_argument("--y", required=y_required, help="response CSV, single column")
    p.add_argument("--header", action="store_true", help="skip the first line of each CSV")


def _add_seed(p, required=True):
    p.add_argument("--seed", type=_u64, help="master seed (64-bit unsigned)")
    p.add_argument(
        "--seed-from-entropy",
        action="store_true",
        help="draw the master seed from OS entropy; the value is echoed in the output",
    )
    p.set_defaults(seed_required=required)


def _add_run(p):
    p.add_argument("--threads", type=_pos, default=None, help="worker threads (env SKETCHUQ_THREADS)")
    p.add_argument(
        "--deterministic",
        action="store_true",
        help="bit-stable output: fixed reduction order and no wall-clock fields",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sketchuq",
        description="Sketched least squares: solvers, projector diagnostics and uncertainty quantification.",
    )
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="exact least-squares fit")
    _add_data(p)

    p = sub.add_parser("sketch", help="one sketched solve plus its rank diagnostic")
    _add_data(p)
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--r", required=True, type=_pos, help="sketch dimension")
    _add_seed(p)
    _add_run(p)

    p = sub.add_parser("diagnose", help="estimate Pr[rank(SX) = p] over replicates")
    _add_data(p)
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--r", required=True, type=_pos)
    p.add_argument("--replicates", type=_pos, default=100)
    _add_seed(p)
    _add_run(p)

    p = sub.add_parser(
        "uq",
        help="total bias/variance/MSE/risk decomposition (simulation tool: needs the true beta0 and sigma2)",
        description=(
            "Monte Carlo evaluation of the total moments of the sketched estimator. "
            "This is a simulation-grade tool: the true coefficients --beta0 and the "
            "noise variance --sigma2 must be supplied."
        ),
    )
    _add_data(p, y_required=False)
    p.add_argument("--beta0", help="true coefficient CSV, single column (required)")
    p.add_argument("--sigma2", type=float, help="noise variance (required)")
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--r", required=True, type=_pos)
    p.add_argument("--draws", type=_pos, default=1000, help="number of sketch draws")
    p.add_argument("--rank-conditioned", action="store_true", help="discard draws with rank(SX) < p")
    p.add_argument("--oracle", type=_pos, metavar="NNOISE", help="also run the brute-force oracle with NNOISE noise draws per sketch")
    p.add_argument("--oracle-draws", type=_pos, help="sketch draws for the oracle (default: --draws)")
    _add_seed(p)
    _add_run(p)

    p = sub.add_parser("experiment", help="rank-preservation / relative-error sweep")
    p.add_argument("--config", help="JSON config file; flags below override it")
    p.add_argument("--schemes", help="comma-separated subset of unif,lev,norm")
    p.add_argument("--r-grid", help="START:STOP:STEP (inclusive) or comma list")
    p.add_argument("--replicates", type=_pos)
    p.add_argument("--n", type=_pos, help="synthetic rows")
    p.add_argument("--p", type=_pos, help="synthetic columns")
    p.add_argument("--coherence", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--x", help="design CSV instead of synthetic data")
    p.add_argument("--y", help="response CSV instead of synthetic data")
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", help="per-replicate CSV path")
    p.add_argument("--summary", help="summary CSV path")
    _add_seed(p)
    _add_run(p)
    return ap


def _load(args, need_y=True) -> DesignData:
    X = io.read_matrix_csv(args.x, header=args.header)
    if args.y is not None:
        y = io.read_vector_csv(args.y, header=args.header)
    elif need_y:
        raise InvalidInput("--y is required")
    else:
        y = np.zeros(X.shape[0])
    return DesignData(X, y)


def _seed(args, fallback=None) -> int:
    if args.seed is not None:
        return args.seed
    if args.seed_from_entropy:
        s = entropy_seed()
        log.info("seed drawn from entropy: %d", s)
        return s
    if fallback is not None:
        return fallback
    raise InvalidInput("--seed is required (or pass --seed-from-entropy)")


def _threads(args) -> int:
    return args.threads or _default_threads()


def cmd_solve(args):
    data = _load(args)
    fit = exact_solve(data, hat_cap=0)
    return {
        "betaHat": fit.beta_hat,
        "residualNorm": float(np.linalg.norm(fit.residual)),
        "cosTheta": fit.cos_theta,
        "kappaX": fit.kappa_x,
    }


def cmd_sketch(args):
    data = _load(args)
    seed = _seed(args)
    fit = exact_solve(data, hat_cap=0)
    draw = draw_sketch(SketchScheme.parse(args.scheme, args.r), data, seed)
    sfit = sketched_solve(data, draw)
    rec = diagnose(data, draw, fit)
    proj = build_projectors(data, draw)
    return {
        "scheme": args.scheme,
        "r": args.r,
        "seed": seed,
        "betaTilde": sfit.beta_tilde,
        "betaHat": fit.beta_hat,
        "rankSX": rec.rank_sx,
        "rankPreserved": rec.rank_preserved,
        "kappaP0": rec.kappa_p0,
        "sigmaMinP0": rec.sigma_min_p0,
        "relErrBeta": rec.rel_err_beta,
        "relErrPred": rec.rel_err_pred,
        "devPPx": proj.dev_ppx,
        "devPPt": proj.dev_ppt,
        "devP0": proj.dev_p0,
        "normMethod": proj.norm_method,
        "generator": GENERATOR_VERSION,
    }


def cmd_diagnose(args):
    data = _load(args)
    seed = _seed(args)
    res = rank_preservation_probability(data, SketchScheme.parse(args.scheme, args.r), args.replicates, seed)
    return {
        "scheme": args.scheme,
        "r": args.r,
        "seed": seed,
        "replicates": res.n_replicates,
        "prRankPreserved": res.estimate,
        "stderr": res.stderr,
        "nPreserved": res.n_preserved,
    }


def cmd_uq(args):
    if args.beta0 is None:
        raise InvalidInput("--beta0 is required: total moments need the true coefficients")
    if args.sigma2 is None:
        raise InvalidInput("--sigma2 is required")
    data = _load(args, need_y=False)
    beta0 = as_vector(io.read_vector_csv(args.beta0, header=args.header), "beta0")
    spec = ModelSpec(beta0, args.sigma2)
    seed = _seed(args)
    scheme = SketchScheme.parse(args.scheme, args.r)
    threads = 1 if args.deterministic else _threads(args)
    rep = decompose(data, spec, scheme, args.draws, seed, args.rank_conditioned, threads)
    out = {"report": rep, "tolerances": {"stderr_multiple": 3.0, "rank": "max(r, p) * eps * sigma_max(SX)"}}
    if args.oracle:
        orc = empirical_oracle(
            data,
            spec,
            scheme,
            args.oracle,
            args.oracle_draws or args.draws,
            seed + 1 if seed < 2**64 - 1 else 0,
            args.rank_conditioned,
        )
        out["oracle"] = orc
        out["agreement_z"] = agreement_z(rep, orc)
    return out


def _parse_grid(text: str) -> list:
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(start, stop + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInput(f"cannot parse r grid {text!r}") from None


def cmd_experiment(args):
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.schemes:
        cfg.schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    if args.r_grid:
        cfg.r_grid = _parse_grid(args.r_grid)
    if args.replicates:
        cfg.n_replicates = args.replicates
    if args.x or args.y:
        if not (args.x and args.y):
            raise InvalidInput("--x and --y must be given together")
        cfg.data = CsvSource(args.x, args.y, args.header)
    elif isinstance(cfg.data, SyntheticSource):
        for name in ("n", "p", "coherence", "sigma2"):
            v = getattr(args, name)
            if v is not None:
                setattr(cfg.data, name, v)
    if args.out:
        cfg.records_path = args.out
    if args.summary:
        cfg.summary_path = args.summary
    cfg.master_seed = _seed(args, fallback=cfg.master_seed if args.config else None)
    cfg.__post_init__()
    threads = 1 if args.deterministic else _threads(args)
    res = run_sweep(cfg, threads=threads, deterministic=args.deterministic)
    return {"config": cfg.to_dict(), "summary": res.summary, "generator": GENERATOR_VERSION}


COMMANDS = {
    "solve": cmd_solve,
    "sketch": cmd_sketch,
    "diagnose": cmd_diagnose,
    "uq": cmd_uq,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        result = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SketchUQError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    sys.stdout.write(io.dumps(result) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
