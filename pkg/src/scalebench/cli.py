"""Command-line front end: ``run``, ``analyze``, ``oracle`` and ``plot``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import OUT_ENV, ConfigError, ConfigParseError, execute, load_config
from .orchestrator import analytic_demand_oracle
from .plot import plot_results
from .results import read_lag_csv, write_results
from .slo import LagSeries, NoSamplesAfterWarmup, check_lag_slo, lag_trend
from .workload import LoadSpec

EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_DATA = 4


def _load(path: str):
    try:
        return load_config(path), 0
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_PARSE
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return None, EXIT_INVALID


def cmd_run(args: argparse.Namespace) -> int:
    cfg, code = _load(args.config)
    if cfg is None:
        return code
    out_root = Path(args.out or os.environ.get(OUT_ENV) or cfg.output_dir)
    curve = execute(cfg)
    run_dir = write_results(out_root / (args.run_id or cfg.name), cfg.to_dict(), curve)
    for p in curve.points:
        print(f"{p.load},{'' if p.demand is None else p.demand},{p.status}")
    print(f"wrote {run_dir} ({curve.experiments_run} experiments)", file=sys.stderr)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        samples = read_lag_csv(Path(args.csv))
        slope = lag_trend(LagSeries(tuple(samples), args.warmup))
    except (OSError, ValueError) as exc:
        kind = "no samples after warm-up" if isinstance(exc, NoSamplesAfterWarmup) else "bad lag data"
        print(f"error: {kind}: {exc}", file=sys.stderr)
        return EXIT_DATA
    line = f"slope={slope:.6f}"
    if args.load is not None:
        verdict = check_lag_slo(slope, args.load, args.ratio)
        line += f" threshold={verdict.threshold:.6f} {'PASS' if verdict.passed else 'FAIL'}"
    print(line)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    cfg, code = _load(args.config)
    if cfg is None:
        return code
    if not cfg.deterministic or cfg.p_late > 0:
        print("error: the analytic oracle needs a deterministic config with p_late = 0",
              file=sys.stderr)
        return EXIT_INVALID
    for magnitude in cfg.load.magnitudes:
        need = analytic_demand_oracle(
            cfg.use_case, cfg.sut_profile, LoadSpec(cfg.load.kind, magnitude, cfg.load.base_sensors),
            cfg.resources.kind, fixed_instances=cfg.resources.instances,
            fixed_cores=cfg.resources.cores, use_case_options=cfg.use_case_options,
        )
        print(f"{magnitude},{'exceeded' if need is None else need}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    try:
        svg, dat = plot_results(Path(args.results), Path(args.out) if args.out else None)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"wrote {svg} and {dat}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scalebench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a benchmark config and write demand/cell CSVs")
    p.add_argument("config")
    p.add_argument("--out", help=f"output root (overrides ${OUT_ENV} and the config)")
    p.add_argument("--run-id", help="results subdirectory name (default: config name)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="lag trend of a t_seconds,lag CSV")
    p.add_argument("csv")
    p.add_argument("--warmup", type=float, default=0.0)
    p.add_argument("--load", type=float, help="generated messages/second; enables the verdict")
    p.add_argument("--ratio", type=float, default=0.01)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="closed-form expected demand per load")
    p.add_argument("config")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("plot", help="render demand.svg and demand.dat from results")
    p.add_argument("results")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
