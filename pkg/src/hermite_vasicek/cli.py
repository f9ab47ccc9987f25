"""Command line interface.

Exit codes: 0 on success, 1 on usage errors (unknown flags, malformed
values), 2 on runtime failures (infeasible parameters, unreadable or
malformed files, degenerate estimates).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from .asymptotics import b_constant, fluctuation_law, sigma_h
from .errors import (ConfigurationError, FormatError, NumericalError,
                     ParameterError, UnsupportedDistributionTargetError)
from .estimators import estimate
from .fileio import (config_from_mapping, default_output_dir,
                     parse_config_file, read_path_csv, write_manifest,
                     write_path_csv, write_rate_points_csv, write_raw_csv,
                     write_summary_csv, RunManifest)
from .harness import MCConfig, run_experiment
from .hermite import DEFAULT_REFINEMENT, HermiteSpec, simulate_hermite
from .paths import GridSpec
from .reports import render_report
from .vasicek import VasicekParams, vasicek_path

_RUNTIME_ERRORS = (ParameterError, ConfigurationError, NumericalError,
                   FormatError, UnsupportedDistributionTargetError, OSError)
_EXPERIMENT_OF = {"mc-consistency": "consistency", "mc-rate": "rate",
                  "mc-dist": "distribution", "gt-converge": "gt-converge"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _spec_of(args) -> HermiteSpec:
    return HermiteSpec(q=args.q, hurst=args.hurst)


def _print_warnings(warnings) -> None:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


def _cmd_simulate(args) -> int:
    spec = _spec_of(args)
    grid = GridSpec(horizon=args.horizon, n=args.n)
    path = simulate_hermite(spec, grid, args.seed, args.refinement)
    if args.a is not None:
        path = vasicek_path(VasicekParams(a=args.a, b=args.b), path)
    dest = Path(args.output) if args.output else (
        default_output_dir() / "path.csv")
    write_path_csv(path, dest)
    _print_warnings(path.warnings)
    print(f"wrote {dest}")
    return 0


def _cmd_estimate(args) -> int:
    spec = _spec_of(args)
    path = read_path_csv(args.input)
    res = estimate(path, spec)
    print(json.dumps(asdict(res), sort_keys=True))
    return 0


def _cmd_constants(args) -> int:
    spec = _spec_of(args)
    print(f"h0 = {spec.h0:.17g}")
    print(f"c = {spec.c:.17g}")
    print(f"stationary_moment_scale = "
          f"{spec.hurst * math.gamma(2.0 * spec.hurst):.17g}")
    if spec.q == 1 and spec.hurst < 0.75:
        print(f"sigma_h = {sigma_h(spec.hurst):.17g}")
    try:
        print(f"b_constant = {b_constant(spec):.17g}")
    except ParameterError:
        pass
    law = fluctuation_law(spec, args.a)
    print(f"law = {json.dumps(asdict(law), sort_keys=True)}")
    return 0


def _merge_config(args, experiment: str) -> MCConfig:
    mapping: dict[str, str] = {}
    if args.config:
        mapping.update(parse_config_file(args.config))
    overrides = {"q": args.q, "hurst": args.hurst, "a": args.a, "b": args.b,
                 "horizons": args.horizons, "dt": args.dt,
                 "replications": args.replications,
                 "master_seed": args.master_seed}
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = str(value)
    mapping["experiment"] = experiment
    return config_from_mapping(mapping)


def _cmd_mc(args) -> int:
    experiment = _EXPERIMENT_OF[args.command]
    config = _merge_config(args, experiment)
    result = run_experiment(config, workers=args.workers,
                            refinement=args.refinement)
    outdir = Path(args.outdir) if args.outdir else default_output_dir()
    outdir.mkdir(parents=True, exist_ok=True)
    stem = args.stem or experiment
    outputs = []
    raw = outdir / f"{stem}_raw.csv"
    write_raw_csv(result, raw)
    outputs.append(raw)
    summary = outdir / f"{stem}_summary.csv"
    write_summary_csv(result, summary)
    outputs.append(summary)
    if experiment in ("rate", "distribution"):
        points = outdir / f"{stem}_points.csv"
        write_rate_points_csv(result, points)
        outputs.append(points)
    outputs.extend(render_report(result, outdir, stem))
    manifest = outdir / f"{stem}_manifest.json"
    write_manifest(RunManifest.for_result(
        result, tuple(p.name for p in outputs)), manifest)
    outputs.append(manifest)
    _print_warnings(result.warnings)
    _print_stats(result)
    print("wrote " + " ".join(str(p) for p in outputs))
    return 0


def _print_stats(result) -> None:
    experiment = result.config.experiment
    if experiment == "gt-converge":
        for s in result.horizon_stats:
            print(f"T={s.horizon:g} mean={s.mean_g:.6g} se={s.se_mean_g:.6g} "
                  f"var={s.var_g:.6g} var_ratio={s.var_ratio:.6g}")
        print(f"b_squared = {result.b_squared:.17g}")
        return
    for s in result.horizon_stats:
        print(f"T={s.horizon:g} mean_abs_err_a={s.mean_abs_err_a:.6g} "
              f"mean_abs_err_b={s.mean_abs_err_b:.6g} sd_a={s.sd_a:.6g} "
              f"sd_b={s.sd_b:.6g} excluded={s.excluded}")
    if result.fit_a is not None:
        print(f"slope_a = {result.fit_a.slope:.6g} "
              f"(r2 {result.fit_a.r_squared:.4f}), expected "
              f"{-result.law.a_rate_exponent:.6g}")
        print(f"slope_b = {result.fit_b.slope:.6g} "
              f"(r2 {result.fit_b.r_squared:.4f}), expected "
              f"{-result.law.b_rate_exponent:.6g}")
    if result.ks_a is not None:
        for ks in result.ks_a:
            print(f"ks_a T={ks.horizon:g} stat={ks.statistic:.6g} "
                  f"p={ks.pvalue:.6g}")
    if result.ks_b is not None:
        for ks in result.ks_b:
            print(f"ks_b T={ks.horizon:g} stat={ks.statistic:.6g} "
                  f"p={ks.pvalue:.6g}")


def _add_spec_flags(p, required: bool) -> None:
    p.add_argument("--q", type=int, required=required,
                   help="Hermite order (1 = Gaussian driver)")
    p.add_argument("--hurst", "--H", type=float, required=required,
                   help="Hurst index in (1/2, 1)")


def build_parser() -> _Parser:
    parser = _Parser(prog="hermite-vasicek",
                     description="Simulation and drift inference for "
                                 "mean-reverting processes with "
                                 "Hermite-process noise.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("simulate", help="sample one path to a CSV file")
    _add_spec_flags(p, required=True)
    p.add_argument("--horizon", "--T", type=float, required=True)
    p.add_argument("--n", type=int, required=True,
                   help="number of grid steps")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--refinement", type=int, default=DEFAULT_REFINEMENT)
    p.add_argument("--a", type=float, default=None,
                   help="mean-reversion rate; omit to write the raw driver")
    p.add_argument("--b", type=float, default=0.0, help="mean level")
    p.add_argument("--output", "--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="drift estimates from a path CSV")
    _add_spec_flags(p, required=True)
    p.add_argument("--input", "--in", required=True)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("constants", help="print model and limit constants")
    _add_spec_flags(p, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.set_defaults(func=_cmd_constants)

    for name, blurb in (("mc-consistency", "estimator errors across horizons"),
                        ("mc-rate", "log-log convergence rate fits"),
                        ("mc-dist", "normalized errors against the "
                                    "Gaussian limit"),
                        ("gt-converge", "normalized integrated-square "
                                        "statistic against its limit")):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", default=None,
                       help="flat key = value configuration file")
        _add_spec_flags(p, required=False)
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--horizons", default=None,
                       help="comma-separated, strictly increasing")
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--master-seed", dest="master_seed", type=int,
                       default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--refinement", type=int, default=DEFAULT_REFINEMENT)
        p.add_argument("--outdir", default=None)
        p.add_argument("--stem", default=None,
                       help="output file name stem (default: experiment)")
        p.set_defaults(func=_cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
