"""``hybridswarm`` command line: run, bench, stats, list.

Exit codes: 0 success, 1 runtime failure, 2 bad configuration or input.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import harness, stats
from .benchmarks import BENCHMARK_NAMES, DOMAINS

WORKERS_ENV = "HYBRIDSWARM_WORKERS"


class UsageError(Exception):
    pass


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _load(args) -> harness.ExperimentConfig:
    config = harness.load_config(args.config)
    if getattr(args, "seed", None) is not None:
        data = config.to_dict()
        data["master_seed"] = args.seed
        config = harness.ExperimentConfig.from_dict(data)
    return config


def cmd_run(args) -> int:
    config = _load(args)
    filters = harness.parse_filters(args.filter)
    records = harness.run_experiment(config, workers=args.workers, filters=filters)
    if not records:
        raise UsageError(f"filter {args.filter!r} selects no cells")
    out = harness.write_outputs(config, records, args.out, filters)
    print(f"{len(records)} runs written to {out}")
    return 0


def cmd_bench(args) -> int:
    """Run the selected cells and print the summary table without writing files."""
    config = _load(args)
    if args.runs is not None:
        data = config.to_dict()
        data["runs_per_cell"] = args.runs
        config = harness.ExperimentConfig.from_dict(data)
    filters = harness.parse_filters(args.filter)
    records = harness.run_experiment(config, workers=args.workers, filters=filters)
    if not records:
        raise UsageError(f"filter {args.filter!r} selects no cells")
    print(f"{'problem':<12} {'dim':>5} {'algorithm':<10} {'mean':>14} {'sd':>12}")
    for row in harness.summarize(records):
        print(f"{row.problem:<12} {row.dim:>5} {row.algorithm:<10} {row.mean:>14.4f} {row.sd:>12.4f}")
    return 0


def cmd_stats(args) -> int:
    path = Path(args.input)
    if path.is_dir():
        path = path / "finals.csv"
    if not path.exists():
        raise UsageError(f"{path} does not exist")
    grouped = harness.read_finals(path)
    if not grouped:
        raise UsageError(f"{path} holds no runs")
    reports = stats.compare_all(grouped, args.alpha)
    out = Path(args.out) if args.out else path.with_name("stats_report.csv")
    stats.write_stats_report(reports, out)
    print(stats.format_non_significant(reports))
    print(f"pairwise report written to {out}")
    return 0


def cmd_list(args) -> int:
    print("algorithms:")
    for name in harness.ALGORITHM_NAMES:
        print(f"  {name}")
    print("benchmarks:")
    for name in BENCHMARK_NAMES:
        display, low, high = DOMAINS[name]
        print(f"  {name:<12} {display} [{low:g}, {high:g}]^n")
    print("default parameters (mutation_numerator c gives p_m = c/n):")
    for name, params in harness.DEFAULT_PARAMETERS.items():
        print(f"  {name}: {json.dumps(params)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridswarm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_options(p):
        p.add_argument("--config", default="paper",
                       help="experiment JSON file, or 'paper' for the bundled grid")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--workers", type=int, default=_default_workers(),
                       help=f"parallel worker processes (default ${WORKERS_ENV} or 1)")
        p.add_argument("--filter", help="cell filter, e.g. problem=rastrigin,dim=10,algorithm=PG*")

    run = sub.add_parser("run", help="execute the experiment grid and write CSV outputs")
    grid_options(run)
    run.add_argument("--out", required=True, help="output directory")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="run selected cells and print a summary only")
    grid_options(bench)
    bench.add_argument("--runs", type=int, help="override runs per cell")
    bench.set_defaults(func=cmd_bench)

    st = sub.add_parser("stats", help="statistical comparison of finals.csv")
    st.add_argument("input", help="finals.csv or a run output directory")
    st.add_argument("--alpha", type=float, default=stats.ALPHA)
    st.add_argument("--out", help="report path (default: stats_report.csv next to the input)")
    st.set_defaults(func=cmd_stats)

    ls = sub.add_parser("list", help="show algorithms, benchmarks and default parameters")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, harness.ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
