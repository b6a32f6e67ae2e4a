"""Batch CLI: estimation, covariance projection, MA fitting, segmentation,
simulation, and the Monte Carlo benchmark.

Exit codes: 0 success, 2 I/O failure (E_IO), 3 argument or domain failure
(E_ARGS / E_DOMAIN).  Diagnostics are one machine-parsable line on stderr.
Omitted seeds fall back to the fixed default so runs are reproducible.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as dio
from .core import Acvf, ConvergenceError, DomainError
from .estimators import AcvfEstimate, dbacf, gamma0_hat, gammah_hat, acf_from_estimate
from .jusd import build_intervals, null_quantile, segment
from .mafit import ma_from_acvf, validate_acvf
from .projection import covariance_matrix_estimate
from .sim import BenchmarkConfig, Ma1Spec, gen_ma, gen_ma1, run_benchmark

__all__ = ["main", "entry", "DEFAULT_SEED"]

DEFAULT_SEED = 20210
MAX_SEED = 2 ** 64 - 1
# dimension cap for the PSD repair embedded in the segmentation pipeline
SEGMENT_PROJECTION_DIM = 256


class _ArgsError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgsError(message)


def _write_out(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _seed_arg(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _build_parser() -> _Parser:
    p = _Parser(prog="dbacv", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="difference-based acvf estimate from a series CSV")
    est.add_argument("--input", required=True)
    est.add_argument("--m", type=int, required=True)
    est.add_argument("--d", type=float, default=None,
                     help="override weight: use this d for the variance and every lag")
    est.add_argument("--with-acf", action="store_true", help="also emit rho_h = gamma_h/gamma_0")
    est.add_argument("--header", action="store_true", help="input CSV has a header line")
    est.add_argument("--output", default=None)

    proj = sub.add_parser("project", help="nearest PSD banded-Toeplitz covariance from an acvf JSON")
    proj.add_argument("--input", required=True)
    proj.add_argument("--n", type=int, required=True)
    proj.add_argument("--tol", type=float, default=1e-10)
    proj.add_argument("--max-iter", type=int, default=10_000)
    proj.add_argument("--output", default=None)

    maf = sub.add_parser("mafit", help="fit an invertible MA(m) model to an acvf JSON")
    maf.add_argument("--input", required=True)
    maf.add_argument("--tol", type=float, default=1e-10)
    maf.add_argument("--max-iter", type=int, default=200)
    maf.add_argument("--output", default=None)

    seg = sub.add_parser("segment", help="JUSD segmentation of a series CSV")
    seg.add_argument("--input", required=True)
    seg.add_argument("--m", type=int, required=True)
    seg.add_argument("--alpha", type=float, default=0.05)
    seg.add_argument("--reps", type=int, default=1000, help="null-quantile Monte Carlo replicates")
    seg.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    seg.add_argument("--intervals", choices=("full", "dyadic"), default="dyadic")
    seg.add_argument("--noise-acvf", default=None,
                     help="acvf JSON of a known noise model; skips estimation from the data")
    seg.add_argument("--tol", type=float, default=1e-10)
    seg.add_argument("--max-iter", type=int, default=10_000)
    seg.add_argument("--header", action="store_true")
    seg.add_argument("--output", default=None)

    ben = sub.add_parser("bench", help="Monte Carlo MSE benchmark of the acf estimators")
    ben.add_argument("--config", default=None, help="key=value config file; flags override")
    ben.add_argument("--n", type=int, default=1600)
    ben.add_argument("--reps", type=int, default=500)
    ben.add_argument("--m", type=int, default=2)
    ben.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    ben.add_argument("--signal", choices=("chakar", "park"), default="chakar")
    ben.add_argument("--dist", choices=("gaussian", "t4"), default="gaussian")
    ben.add_argument("--gamma1", default="0.0", help="comma-separated lag-1 correlations")
    ben.add_argument("--estimators", default="O,H,R")
    ben.add_argument("--standardized-t", action="store_true")
    ben.add_argument("--format", choices=("csv", "json"), default="csv")
    ben.add_argument("--output", default=None)

    sim = sub.add_parser("simulate", help="generate signal-plus-noise series CSV")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    sim.add_argument("--signal", choices=("chakar", "park", "constant"), default="constant")
    sim.add_argument("--signal-json", default=None, help="StepSignal JSON file (overrides --signal)")
    sim.add_argument("--gamma1", type=float, default=0.0)
    sim.add_argument("--dist", choices=("gaussian", "t4"), default="gaussian")
    sim.add_argument("--ma", default=None, help="MaModel JSON file (overrides --gamma1)")
    sim.add_argument("--standardized-t", action="store_true")
    sim.add_argument("--header", action="store_true")
    sim.add_argument("--output", default=None)
    return p


def _cmd_estimate(args) -> int:
    y = dio.read_series_csv(args.input, header=args.header)
    if args.m < 0:
        raise DomainError("m must be >= 0")
    if args.d is None:
        est = dbacf(y, args.m)
    else:
        gam = [gamma0_hat(y, args.m, args.d)]
        gam += [gammah_hat(y, args.m, h, args.d) for h in range(1, args.m + 1)]
        est = AcvfEstimate(args.m, np.array(gam), np.full(args.m + 1, args.d), len(y))
    out = dio.estimate_to_dict(est)
    if args.with_acf:
        out["acf"] = acf_from_estimate(est).tolist()
    _write_out(dio.dump_json(out), args.output)
    return 0


def _cmd_project(args) -> int:
    acvf = dio.acvf_from_dict(dio.load_json(args.input))
    bt, report = covariance_matrix_estimate(acvf, args.n, tol=args.tol, max_iter=args.max_iter)
    out = dio.banded_toeplitz_to_dict(bt)
    out["report"] = dio.report_to_dict(report)
    _write_out(dio.dump_json(out), args.output)
    return 0


def _cmd_mafit(args) -> int:
    acvf = dio.acvf_from_dict(dio.load_json(args.input))
    model = ma_from_acvf(acvf, max_iter=args.max_iter, tol=args.tol)
    _write_out(dio.dump_json(dio.ma_model_to_dict(model)), args.output)
    return 0


def _cmd_segment(args) -> int:
    y = dio.read_series_csv(args.input, header=args.header)
    if not 0.0 < args.alpha < 1.0:
        raise DomainError("alpha must be in (0, 1)")
    if args.noise_acvf is not None:
        acvf = dio.acvf_from_dict(dio.load_json(args.noise_acvf))
        if acvf.m != args.m:
            raise DomainError(f"--noise-acvf has order {acvf.m}, expected m={args.m}")
    else:
        est = dbacf(y, args.m)
        gamma = est.gamma
        # a noiseless input estimates gamma_0 = 0; floor it so the variance
        # weights stay positive and any non-constant stretch is flagged
        floor = 1e-12 * max(1.0, float(np.var(y)))
        if gamma[0] > floor and validate_acvf(Acvf(args.m, gamma)):
            acvf = Acvf(args.m, gamma)
        elif gamma[0] > floor:
            # repair on a capped embedding dimension; only the band matters downstream
            dim = min(len(y), max(SEGMENT_PROJECTION_DIM, 2 * (args.m + 1)))
            bt, _ = covariance_matrix_estimate(est, dim, tol=args.tol, max_iter=args.max_iter)
            row = bt.first_row
            if row[0] <= floor:
                row = np.concatenate(([floor], np.zeros(args.m)))
            acvf = Acvf(args.m, row)
        else:
            acvf = Acvf(args.m, np.concatenate(([floor], np.zeros(args.m))))
    model = ma_from_acvf(acvf)
    intervals = build_intervals(len(y), args.intervals)
    q = null_quantile(model, len(y), args.alpha, args.reps, args.seed, intervals)
    fit = segment(y, acvf, q, intervals, alpha=args.alpha)
    _write_out(dio.dump_json(dio.step_fit_to_dict(fit)), args.output)
    return 0


def _parse_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"bad config line: {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def _cmd_bench(args) -> int:
    ov = _parse_config_file(args.config) if args.config else {}
    n = int(ov.get("n", args.n))
    reps = int(ov.get("reps", args.reps))
    m = int(ov.get("m", args.m))
    seed = int(ov.get("seed", args.seed))
    signal = ov.get("signal", args.signal)
    dist = ov.get("dist", args.dist)
    gamma1s = [float(x) for x in str(ov.get("gamma1", args.gamma1)).split(",")]
    codes = tuple(c.strip() for c in str(ov.get("estimators", args.estimators)).split(",") if c.strip())
    standardized = bool(int(ov["standardized_t"])) if "standardized_t" in ov else args.standardized_t
    rows = []
    failures = 0
    for g1 in gamma1s:
        if "ma_theta" in ov:
            from .mafit import MaModel
            error = MaModel(np.array([float(x) for x in ov["ma_theta"].split(",")]),
                            float(ov.get("ma_sigma2", 1.0)))
        else:
            error = Ma1Spec(g1, dist)
        cfg = BenchmarkConfig(n=n, reps=reps, m=m, seed=seed, signal=signal,
                              error=error, estimators=codes, standardized_t=standardized)
        res = run_benchmark(cfg)
        rows += res.rows
        failures += res.failures
    if failures:
        sys.stderr.write(f"W_BENCH: {failures} replicates failed and were excluded\n")
    if args.format == "csv":
        _write_out(dio.bench_rows_to_csv(rows), args.output)
    else:
        payload = {"schema": dio.SCHEMA_VERSION, "failures": failures,
                   "rows": [vars(r) for r in rows]}
        _write_out(dio.dump_json(payload), args.output)
    return 0


def _cmd_simulate(args) -> int:
    from .core import sample_signal
    from .sim import chakar_signal, park_signal, replicate_rng

    if args.signal_json is not None:
        f = sample_signal(dio.step_signal_from_dict(dio.load_json(args.signal_json)), args.n)
    elif args.signal == "chakar":
        f = sample_signal(chakar_signal(), args.n)
    elif args.signal == "park":
        f = park_signal(args.n)
    else:
        f = np.zeros(args.n)
    rng = replicate_rng(args.seed, 0)
    if args.ma is not None:
        noise = gen_ma(dio.ma_model_from_dict(dio.load_json(args.ma)), args.n, rng, dist=args.dist)
    else:
        noise = gen_ma1(Ma1Spec(args.gamma1, args.dist), args.n, rng,
                        standardized=args.standardized_t)
    dio.write_series_csv(args.output or "/dev/stdout", f + noise, header=args.header)
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "project": _cmd_project,
    "mafit": _cmd_mafit,
    "segment": _cmd_segment,
    "bench": _cmd_bench,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgsError as exc:
        sys.stderr.write(f"E_ARGS: {exc}\n")
        return 3
    try:
        return _COMMANDS[args.command](args)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"E_IO: {exc}\n")
        return 2
    except (DomainError, ConvergenceError, ValueError, KeyError) as exc:
        sys.stderr.write(f"E_DOMAIN: {exc}\n")
        return 3


def entry() -> None:
    sys.exit(main(argv=None))
