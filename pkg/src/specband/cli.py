"""Command-line front end: ``specband {estimate,band,simulate,oracle-check}``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__, bands, checks, longrun, pipeline, sim
from .series import ConfigError, InvalidInputError, read_series_csv
from .windows import DEFAULT_WINDOW, WINDOW_NAMES

THREADS_ENV = "SPECBAND_THREADS"

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()[:16]


def render_csv(header: list, rows, config: dict, diagnostics: dict | None = None) -> str:
    """CSV text preceded by ``#`` provenance lines (version, config hash, seed, resolved config)."""
    buf = io.StringIO()
    buf.write(f"# specband {__version__}\n")
    buf.write(f"# config_hash: {config_hash(config)}\n")
    buf.write(f"# seed: {config.get('seed', '')}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True, default=str)}\n")
    if diagnostics:
        buf.write(f"# diagnostics: {json.dumps(diagnostics, sort_keys=True, default=str)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    return v


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory and rename over the destination."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _add_common(p):
    p.add_argument("--output", "-o", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--threads", type=int, default=None, help=f"worker cap (default ${THREADS_ENV} or 1)")
    p.add_argument("--window", default=None, choices=WINDOW_NAMES)


def _add_series_args(p):
    p.add_argument("--input", "-i", required=True, help="single-column CSV of observations")
    p.add_argument("--m-lag", type=int, required=True, help="truncation lag M")
    p.add_argument("--no-demean", action="store_true", help="skip subtracting the sample mean")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specband", description=__doc__)
    parser.add_argument("--version", action="version", version=f"specband {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="lag-window spectral density on the Fourier grid")
    _add_series_args(p)
    _add_common(p)

    p = sub.add_parser("band", help="simultaneous confidence band")
    _add_series_args(p)
    _add_common(p)
    p.add_argument("--method", choices=sim.METHODS, default="bootstrap")
    p.add_argument("--bandwidth", type=float, default=None, help="kernel bandwidth b_T (bootstrap)")
    p.add_argument("--cov-kernel", choices=longrun.KERNEL_NAMES, default="gaussian")
    p.add_argument("--kernel-scale", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--bootstrap-reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gumbel-convention", choices=bands.GUMBEL_CONVENTIONS, default="squared")

    p = sub.add_parser("simulate", help="coverage / mean-length study")
    _add_common(p)
    p.add_argument("--config", default=None, help="flat key = value config file")
    p.add_argument("--model", choices=sim.MODELS, default=None)
    p.add_argument("--T", dest="T", type=int, default=None)
    p.add_argument("--m-lag", type=int, default=None)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--cov-kernel", choices=longrun.KERNEL_NAMES, default=None)
    p.add_argument("--kernel-scale", type=float, default=None)
    p.add_argument("--alpha", default=None, help="comma-separated list")
    p.add_argument("--reps", type=int, default=None, help="replications R")
    p.add_argument("--bootstrap-reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--method", choices=sim.METHODS, default=None)
    p.add_argument("--full", action="store_true", help="use R = 500")
    p.add_argument("--log", default=None, help="per-replication log CSV")

    p = sub.add_parser("oracle-check", help="run the oracle property suite")
    p.add_argument("--quick", action="store_true", help="smaller Monte-Carlo sizes")
    p.add_argument("--output", "-o", default=None)
    return parser


def _cmd_estimate(args, threads) -> int:
    # single-series commands run BLAS single-threaded so output bits never depend on --threads
    series = read_series_csv(args.input)
    window = args.window or DEFAULT_WINDOW
    with threadpool_limits(1):
        est = pipeline.estimate(series, args.m_lag, window, demean=not args.no_demean)
    config = {"command": "estimate", "input": str(args.input), "m_lag": args.m_lag, "window": window,
              "demean": not args.no_demean, "T": series.T}
    rows = ((k, lam, f) for k, (lam, f) in enumerate(zip(est.freqs, est.values), start=1))
    write_atomic(args.output, render_csv(["k", "lambda", "f_hat"], rows, config))
    if est.has_negative:
        print("warning: negative spectral estimates present", file=sys.stderr)
    return EXIT_OK


def _cmd_band(args, threads) -> int:
    series = read_series_csv(args.input)
    window = args.window or DEFAULT_WINDOW
    demean = not args.no_demean
    bands.check_alpha(args.alpha)
    config = {"command": "band", "input": str(args.input), "m_lag": args.m_lag, "window": window,
              "demean": demean, "T": series.T, "method": args.method, "alpha": args.alpha}
    diagnostics = {}
    with threadpool_limits(1):
        if args.method == "bootstrap":
            if args.bandwidth is None:
                raise ConfigError("--bandwidth is required for --method bootstrap")
            kernel = longrun.CovKernel(args.cov_kernel, args.bandwidth, args.kernel_scale)
            cfg = bands.BootstrapConfig(B=args.bootstrap_reps, alpha=args.alpha, seed=args.seed)
            band, diag = pipeline.bootstrap_band(series, args.m_lag, kernel, cfg, window, demean)
            config.update(bandwidth=args.bandwidth, cov_kernel=args.cov_kernel, kernel_scale=args.kernel_scale,
                          bootstrap_reps=args.bootstrap_reps, seed=args.seed)
            diagnostics = {"q_star": band.quantile, "min_eig": diag.min_eig,
                           "clipped_mass": diag.clipped_mass, "clamped": diag.n_clamped}
        else:
            band = pipeline.gumbel_band(series, args.m_lag, args.alpha, window, demean, args.gumbel_convention)
            config.update(gumbel_convention=args.gumbel_convention)
            diagnostics = {"mean_halfwidth": band.quantile}
    rows = zip(band.freqs, band.f_hat, band.lower, band.upper)
    write_atomic(args.output, render_csv(["lambda", "f_hat", "lower", "upper"], rows, config, diagnostics))
    return EXIT_OK


def _resolve_sim_config(args, threads) -> sim.ExperimentConfig:
    overrides = {
        "model": args.model, "T": args.T, "M": args.m_lag, "bandwidth": args.bandwidth,
        "cov_kernel": args.cov_kernel, "kernel_scale": args.kernel_scale, "R": args.reps,
        "B": args.bootstrap_reps, "seed": args.seed, "method": args.method, "window": args.window,
        "threads": threads,
    }
    if args.alpha is not None:
        overrides["alphas"] = tuple(float(a) for a in args.alpha.split(","))
    if args.full:
        overrides["R"] = 500
    if args.config:
        return sim.load_config(args.config, **overrides)
    return sim.ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def _cmd_simulate(args, threads) -> int:
    cfg = _resolve_sim_config(args, threads)
    result = sim.coverage_experiment(cfg)
    # thread count does not affect results; keep it out of the hashed config
    config = sim.config_to_dict(replace(cfg, threads=1))
    config.pop("threads")
    header = ["model", "method", "T", "M", "b_T", "level", "R", "B", "Cov", "ML"]
    rows = ([r.model, r.method, r.T, r.M, r.bandwidth, r.level, r.R, r.B, r.Cov, r.ML] for r in result.rows)
    write_atomic(args.output, render_csv(header, rows, config))
    if args.log:
        keys = list(result.log[0])
        write_atomic(args.log, render_csv(keys, ([rec[k] for k in keys] for rec in result.log), config))
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    results = checks.run_all(quick=args.quick)
    text = "\n".join(r.line() for r in results) + "\n"
    write_atomic(args.output, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.command == "oracle-check":
            return _cmd_oracle_check(args)
        threads = args.threads if args.threads is not None else _default_threads()
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.command == "estimate":
            return _cmd_estimate(args, threads)
        if args.command == "band":
            return _cmd_band(args, threads)
        return _cmd_simulate(args, threads)
    except (ConfigError, InvalidInputError, IndexError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, np.linalg.LinAlgError, sim.GenerationError, sim.ReplicationError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
