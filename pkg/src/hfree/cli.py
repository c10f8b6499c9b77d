"""Command-line surface.

Subcommands: simulate, params, verify, analyze, density.
Exit codes: 0 success, 1 usage error, 2 verification failure,
3 partial trial failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .analysis import verify_density_bound
from .config import parse_config
from .density import bounded_density_scan
from .graphs import read_edge_list
from .harness import aggregate_stats, run_experiment
from .patterns import parse_pattern
from .theory import Constants
from .verify import run_verification

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_PARTIAL_FAILURE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hfree",
                     description="Constraint-free random graph process toolkit")
    parser.add_argument("--version", action="version", version=f"hfree {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="run seeded experiment trials")
    p_sim.add_argument("--config", required=True, help="experiment config file")
    p_sim.add_argument("--out", required=True, help="output directory (write-once)")
    p_sim.add_argument("--seed", type=int, default=None, help="override base seed")
    p_sim.add_argument("--workers", type=int, default=None, help="worker pool size")
    p_sim.add_argument("--force", action="store_true",
                       help="clear a non-empty output directory")

    p_par = sub.add_parser("params", help="print constants for (pattern, n)")
    p_par.add_argument("pattern", help="pattern spec, e.g. C3, K4, K3,3, Q3")
    p_par.add_argument("n", type=int)
    p_par.add_argument("--eps", default=None)
    p_par.add_argument("--mu", default=None)
    p_par.add_argument("--json", action="store_true", help="JSON output only")

    p_ver = sub.add_parser("verify", help="fast-vs-oracle equivalence checks")
    p_ver.add_argument("--scope", default="all",
                       choices=["closure", "density", "counts", "all"])
    p_ver.add_argument("--size", type=int, default=12, help="host size")
    p_ver.add_argument("--seeds", type=int, default=5, help="seeds per check")

    p_ana = sub.add_parser("analyze", help="aggregate tables from a run directory")
    p_ana.add_argument("dir", help="simulate output directory")
    p_ana.add_argument("--json", action="store_true", help="JSON output only")

    p_den = sub.add_parser("density", help="bounded density scan of a graph file")
    p_den.add_argument("graph", help="edge-list file (1-based 'u v' lines)")
    p_den.add_argument("--k", type=int, required=True, help="size cap")
    p_den.add_argument("--mode", default="exact", choices=["exact", "heuristic"])
    p_den.add_argument("--budget", type=int, default=0, help="node budget (0 = none)")
    p_den.add_argument("--threshold", type=float, default=None,
                       help="also report the e(A) < c|A| check at this c")
    p_den.add_argument("--pattern", default="C3",
                       help="pattern for reference constants")
    return parser


def cmd_simulate(args) -> int:
    with open(args.config) as fh:
        cfg = parse_config(fh.read())
    if args.seed is not None:
        cfg.seed = args.seed
    result = run_experiment(cfg, args.out, force=args.force, workers=args.workers)
    if result.failures:
        for line in result.failures:
            print(f"FAILED {line}", file=sys.stderr)
        return EXIT_PARTIAL_FAILURE
    print(f"ok: outputs in {result.out_dir} (manifest {result.manifest_path})")
    return EXIT_OK


def cmd_params(args) -> int:
    pattern = parse_pattern(args.pattern)
    constants = Constants.for_run(pattern, args.n, eps=args.eps, mu=args.mu)
    data = constants.as_dict()
    if args.json:
        print(json.dumps(data, sort_keys=True))
        return EXIT_OK
    width = max(len(k) for k in data)
    for key in ("pattern", "n", "eps", "mu", "p", "m_steps", "beta", "c", "d", "log"):
        print(f"{key:<{width}}  {data[key]}")
    print()
    print(json.dumps(data, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    mismatches = run_verification(scope=args.scope, size=args.size, seeds=args.seeds)
    if mismatches:
        for line in mismatches:
            print(f"MISMATCH {line}", file=sys.stderr)
        print(f"{len(mismatches)} mismatches", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print(f"ok: scope={args.scope} size={args.size} seeds={args.seeds}, no mismatches")
    return EXIT_OK


def cmd_analyze(args) -> int:
    summary = aggregate_stats(args.dir)
    if args.json:
        print(json.dumps(summary, sort_keys=True))
        return EXIT_OK
    print(f"config {summary['config_hash']}")
    for n, row in summary["by_n"].items():
        print(f"n={n}: trials={row['trials']} mean_final_edges={row['mean_final_edges']:.2f} "
              f"min={row['min']} median={row['median']} max={row['max']}")
    if "edge_exponent" in summary:
        fit = summary["edge_exponent"]
        print(f"edge exponent: slope={fit['slope']:.4f} stderr={fit['stderr']:.4f}")
    if "monitor" in summary:
        mon = summary["monitor"]
        print(f"monitor: checkpoints={mon['checkpoints']} "
              f"max_open_ratio={mon['max_open_ratio']:.4f}")
    return EXIT_OK


def cmd_density(args) -> int:
    with open(args.graph) as fh:
        g = read_edge_list(fh)
    budget = args.budget if args.budget > 0 else None
    pattern = parse_pattern(args.pattern)
    constants = None
    try:
        constants = Constants.for_run(pattern, g.n)
    except ValueError:
        pass  # reference constants undefined for tiny hosts; scan still runs
    report = bounded_density_scan(g, args.k, mode=args.mode,
                                  node_budget=budget, constants=constants)
    print(json.dumps(report.as_row(), sort_keys=True))
    if args.threshold is not None:
        check = verify_density_bound(g, constants,
                                       override=(args.threshold, args.k),
                                       node_budget=budget)
        print(json.dumps(check.as_dict(), sort_keys=True))
        return EXIT_OK if check.passed else EXIT_VERIFY_FAILED
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "params": cmd_params,
        "verify": cmd_verify,
        "analyze": cmd_analyze,
        "density": cmd_density,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
