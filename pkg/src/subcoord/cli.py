"""Command-line driver: ``run``, ``check`` and ``regret``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import checks, metrics
from .baselines import PolicyKind
from .config import ConfigError, load_config
from .core import check_normalized_monotone_submodular
from .experiment import run_instances, summarize, with_overrides
from .trace_io import MissingColumnError, read_traces, write_run_csv


def output_paths(out: str) -> tuple[Path, Path]:
    """CSV and JSON paths for an output stem (a ``.csv`` suffix is optional)."""
    path = Path(out)
    stem = path.with_suffix("") if path.suffix == ".csv" else path
    return stem.with_name(stem.name + ".csv"), stem.with_name(stem.name + ".json")


def cmd_run(args) -> int:
    config = load_config(args.config)
    policy = PolicyKind.parse(args.policy).value if args.policy else None
    config = with_overrides(config, master_seed=args.seed, policy=policy,
                            output_path=args.out)
    results = run_instances(config, parallel=args.parallel)
    summary = summarize(config, results)
    csv_path, json_path = output_paths(config.output_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_run_csv(csv_path, results, len(config.robots), len(config.targets),
                  config.brute_force)
    json_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {csv_path} and {json_path}")
    print(f"mean tail min-distance {summary['mean_tail_min_distance']:.4f}, "
          f"mean maneuvers {summary['maneuvers_mean']:.2f}")
    if "tracking_regret_half" in summary:
        print(f"tracking regret {summary['tracking_regret_half']:.6g}, "
              f"bound {summary['regret_bound_rhs']:.6g}")
    return 0


def cmd_check(args) -> int:
    ok = True
    sub = checks.check_tracking_submodularity(args.instances, seed=args.seed or 0)
    print(f"tracking objective, {sub.n_instances} instances: "
          f"{'pass' if sub.passed else 'FAIL'}")
    for k, report in sub.failures[:3]:
        print(f"  instance {k}:\n" + report.summary())
    ok &= sub.passed

    eq = checks.forecaster_equivalence(seed=args.seed or 0)
    print(f"forecaster equivalence, {eq.n_streams} streams: max error {eq.max_error:.3g} "
          f"(tol {eq.tol:g}) {'pass' if eq.passed else 'FAIL'}")
    ok &= eq.passed

    if args.inject_supermodular:
        report = check_normalized_monotone_submodular(checks.supermodular_oracle())
        print("injected supermodular oracle: " + ("pass" if report.passed else "FAIL"))
        print(report.summary())
        ok &= report.passed
    return 0 if ok else 1


def cmd_regret(args) -> int:
    try:
        traces = read_traces(args.trace)
    except MissingColumnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not traces:
        print(f"error: {args.trace}: no rows", file=sys.stderr)
        return 2
    for k, trace in sorted(traces.items()):
        regret = metrics.tracking_regret_half(trace)
        delta = metrics.adversarial_effect(trace)
        bound = metrics.regret_bound_rhs(trace.n_agents, trace.n_steps, delta,
                                         max(trace.action_sizes))
        print(f"instance {k}: tracking_regret_half={regret:.17g} delta={delta} "
              f"bound={bound:.17g} ratio={regret / bound:.6g}")
    s = metrics.summarize_regret(list(traces.values()))
    print(f"mean: tracking_regret_half={s['tracking_regret_half']:.17g} "
          f"delta={s['adversarial_effect']:g} bound={s['regret_bound_rhs']:.17g} "
          f"ratio={s['regret_over_bound']:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcoord",
                                     description="Online submodular multi-agent coordination")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write CSV/JSON output")
    run.add_argument("--config", required=True, metavar="PATH")
    run.add_argument("--seed", type=int, metavar="N", help="override master_seed")
    run.add_argument("--policy", metavar="NAME",
                     help="override policy: " + ", ".join(k.value for k in PolicyKind))
    run.add_argument("--out", metavar="PATH", help="output stem; .csv and .json are added")
    run.add_argument("--parallel", type=int, default=1, metavar="N")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="run the property-check suites")
    check.add_argument("--config", metavar="PATH", help="accepted for symmetry; unused")
    check.add_argument("--seed", type=int, metavar="N")
    check.add_argument("--instances", type=int, default=200, metavar="N")
    check.add_argument("--inject-supermodular", action="store_true",
                       help="also check a supermodular oracle (expected to fail)")
    check.set_defaults(func=cmd_check)

    regret = sub.add_parser("regret", help="regret and bound from a trace CSV")
    regret.add_argument("trace", metavar="PATH")
    regret.set_defaults(func=cmd_regret)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
