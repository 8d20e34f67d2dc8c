"""``brt-pareto`` command line: generate, solve, verify, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .generator import (
    BudgetSplit,
    CostPattern,
    DemandPattern,
    ScenarioError,
    ScenarioSpec,
    generate,
    generate_intractable,
    generate_prefix_special,
)
from .model import UNBOUNDED, normalize_cap, validate_instance
from .oracle import OracleSizeError, brute_force_cost_front, brute_force_front
from .pareto import EnumerationIncomplete, enumerate_pareto, evaluate_front_by_cost
from .reporting import SPLITS, cap_label, grid_keys, plot_front, run_bench
from .response import ResponseKind
from .solvers import SolverConfig
from .serialization import (
    InstanceFormatError,
    front_from_csv,
    front_to_csv,
    load_instance,
    rational_to_json,
    save_instance,
    trace_to_dict,
)

EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _cap_arg(text: str):
    try:
        return normalize_cap(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_generate(args) -> int:
    try:
        if args.family == "intractable":
            instance = generate_intractable(args.stations)
        elif args.family in ("unimodal-weights", "unimodal-costs"):
            instance = generate_prefix_special(args.stations, args.family)
        else:
            spec = ScenarioSpec(
                stations=args.stations, cost_pattern=args.cost, demand_pattern=args.demand,
                budget_split=args.split, municipalities=args.municipalities,
                component_cap=args.components, response=args.response,
                threshold_fraction=args.threshold_fraction, seed=args.seed,
            )
            instance = generate(spec)
    except (ScenarioError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    save_instance(instance, args.output)
    print(args.output)
    return 0


def _load(path):
    instance = load_instance(path)
    problems = validate_instance(instance)
    if problems:
        raise InstanceFormatError("; ".join(problems))
    return instance


def cmd_solve(args) -> int:
    instance = _load(args.instance)
    z = instance.component_cap if args.components is None else args.components
    kind = ResponseKind.parse(args.response)
    status = 0
    try:
        config = SolverConfig(node_limit=args.node_limit) if args.node_limit else SolverConfig()
        trace = enumerate_pareto(instance, kind, z, config)
    except EnumerationIncomplete as exc:
        print(f"incomplete: {exc}", file=sys.stderr)
        trace, status = exc.trace, EXIT_RESOURCE
    prefix = Path(args.out) if args.out else Path(args.instance).with_suffix("")
    csv_path = prefix.with_name(prefix.name + ".csv")
    json_path = prefix.with_name(prefix.name + ".json")
    csv_path.write_text(front_to_csv(instance, trace.front))
    doc = trace_to_dict(instance, trace, kind, z)
    doc["costEvaluation"] = [
        {"passengers": rational_to_json(c.passengers), "cost": c.cost, "components": c.components}
        for c in evaluate_front_by_cost(instance, trace, kind)
    ]
    json_path.write_text(json.dumps(doc, indent=1) + "\n")
    written = [csv_path, json_path]
    if args.svg:
        svg = prefix.with_name(prefix.name + ".svg")
        plot_front(instance, trace.front, svg, f"{kind.value}, Z={cap_label(z)}",
                   evaluate_front_by_cost(instance, trace, kind))
        written.append(svg)
    for p in written:
        print(p)
    return status


def _first_divergence(got, want):
    for i, (a, b) in enumerate(zip(got.values(), want.values())):
        if a != b:
            return f"point {i}: got (p={a[0]}, v={a[1]}) expected (p={b[0]}, v={b[1]})"
    if len(got) != len(want):
        i = min(len(got), len(want))
        extra = got.values()[i] if len(got) > len(want) else want.values()[i]
        side = "unexpected" if len(got) > len(want) else "missing"
        return f"point {i}: {side} (p={extra[0]}, v={extra[1]})"
    return None


def cmd_verify(args) -> int:
    instance = _load(args.instance)
    caps = args.components or [instance.component_cap]
    kinds = [ResponseKind.parse(args.response)] if args.response else list(ResponseKind)
    failed = False
    try:
        for kind in kinds:
            for z in caps:
                label = f"{kind.value} Z={cap_label(z)}"
                want = brute_force_front(instance, kind, z)
                if args.check_file:
                    got = front_from_csv(Path(args.check_file).read_text())
                else:
                    got = enumerate_pareto(instance, kind, z).front
                diff = _first_divergence(got, want)
                if diff:
                    failed = True
                    print(f"FAIL {label}: {diff}")
                    continue
                cost_front = brute_force_cost_front(instance, kind, z)
                same = cost_front.values() == want.values()
                print(f"PASS {label}: {len(want)} points; cost front "
                      f"{'coincides' if same else 'differs'} ({len(cost_front)} points)")
    except OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_MISMATCH if failed else 0


def cmd_bench(args) -> int:
    keys = grid_keys(args.responses, args.costs, args.demands, args.splits, args.components)
    report = run_bench(args.stations, args.seed, keys, args.threads, args.improvement_range)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "aggregate.csv").write_text(report.to_csv())
    (out / "report.json").write_text(report.to_json())
    bad = [c for c in report.cells if c.status != "ok"]
    over = [c for c in report.cells if len(c.front) > c.bound]
    print(f"{len(report.cells)} fronts in {report.seconds:.1f}s; "
          f"{len(bad)} failed; {len(over)} above the size bound")
    print(out / "aggregate.csv")
    return 1 if bad or over else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brt-pareto", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated instance as JSON")
    g.add_argument("--family", choices=["scenario", "intractable", "unimodal-weights", "unimodal-costs"],
                   default="scenario")
    g.add_argument("--stations", type=int, default=25)
    g.add_argument("--cost", choices=[c.value for c in CostPattern], default="unit")
    g.add_argument("--demand", choices=[d.value for d in DemandPattern], default="even")
    g.add_argument("--split", choices=[s.value for s in BudgetSplit], default="equal")
    g.add_argument("--municipalities", type=int, default=5)
    g.add_argument("--components", type=_cap_arg, default=UNBOUNDED)
    g.add_argument("--response", choices=[k.value for k in ResponseKind], default="linear")
    g.add_argument("--threshold-fraction", default="3/4")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="enumerate the Pareto front of an instance")
    s.add_argument("instance")
    s.add_argument("--response", choices=[k.value for k in ResponseKind], default="linear")
    s.add_argument("--components", type=_cap_arg, default=None,
                   help="component cap Z (integer or 'inf'); defaults to the instance's")
    s.add_argument("--out", help="output prefix (writes PREFIX.csv and PREFIX.json)")
    s.add_argument("--svg", action="store_true", help="also write PREFIX.svg")
    s.add_argument("--node-limit", type=int, default=None,
                   help="branch-and-bound node budget per solve (exit 3 when exceeded)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="compare against the brute-force oracle")
    v.add_argument("instance")
    v.add_argument("--response", choices=[k.value for k in ResponseKind])
    v.add_argument("--components", type=_cap_arg, action="append")
    v.add_argument("--check-file", help="front CSV to check instead of solving")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run the scenario grid")
    b.add_argument("--stations", type=int, default=25)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--responses", nargs="+", choices=[k.value for k in ResponseKind],
                   default=[k.value for k in ResponseKind])
    b.add_argument("--costs", nargs="+", choices=[c.value for c in CostPattern],
                   default=[c.value for c in CostPattern])
    b.add_argument("--demands", nargs="+", choices=[d.value for d in DemandPattern],
                   default=[d.value for d in DemandPattern])
    b.add_argument("--splits", nargs="+", choices=SPLITS, default=list(SPLITS))
    b.add_argument("--components", nargs="+", type=_cap_arg, default=[1, 2, 3, UNBOUNDED])
    b.add_argument("--improvement-range", type=int, nargs=2, metavar=("LO", "HI"), default=None,
                   help="override the per-segment improvement draw (default 1 10)")
    b.add_argument("--out", default="bench_out")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InstanceFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
