#!/usr/bin/env python3
"""Run the 25-station scenario grid and summarize how the fronts compare.

    python scripts/run_study.py --out study_out
    python scripts/run_study.py --improvement-range 8 10 --out study_narrow

Writes aggregate.csv, report.json and SVG plots of the MinImprov/TERMINI
single-municipality fronts, then prints the comparisons across component caps
and municipality splits.
"""

from __future__ import annotations

import argparse
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from brt_pareto.generator import CostPattern, generate
from brt_pareto.model import UpgradeSet
from brt_pareto.pareto import ParetoFront, ParetoPoint
from brt_pareto.reporting import cost_jumps, max_gap, plot_front, pointwise_le, run_bench, scenario_spec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--stations", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--improvement-range", type=int, nargs=2, default=None, metavar=("LO", "HI"))
    ap.add_argument("--out", default="study_out")
    args = ap.parse_args()

    report = run_bench(args.stations, args.seed, threads=args.threads,
                       improvement_range=args.improvement_range)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "aggregate.csv").write_text(report.to_csv())
    (out / "report.json").write_text(report.to_json())

    bad = [c.key for c in report.cells if c.status != "ok" or len(c.front) > c.bound]
    print(f"{len(report.cells)} fronts in {report.seconds:.0f}s, {len(bad)} incomplete or above bound")

    scen = defaultdict(dict)
    for c in report.cells:
        scen[c.key.scenario][c.key.components] = c
    z_monotone = sum(pointwise_le(cells[a].front, cells[b].front)
                     for cells in scen.values() for a, b in (("1", "2"), ("2", "3"), ("3", "inf")))
    print(f"front grows with Z: {z_monotone}/{3 * len(scen)} adjacent pairs")
    split_ok = sum(pointwise_le(cells[z].front, scen[(r, c, d, "single")][z].front)
                   for (r, c, d, s), cells in scen.items() if s != "single" for z in cells)
    print(f"five municipalities never beat one: {split_ok}/{sum(s != 'single' for *_, s in scen) * 4} cells")
    gaps = sorted(max_gap(cells["3"].front, cells["inf"].front) / cells["3"].total_potential
                  for cells in scen.values())
    close = sum(g <= Fraction(2, 100) for g in gaps)
    print(f"Z=3 within 2% of Z=inf: {close}/{len(gaps)} scenarios, median gap {float(gaps[len(gaps) // 2]):.1%}")

    for cost in CostPattern:
        for z in ("1", "inf"):
            cell = report.cell(response="minimprov", cost=cost.value, demand="termini", split="single", components=z)
            inst = generate(scenario_spec(cell.key, args.stations, args.seed, args.improvement_range))
            big = max(cost_jumps(inst, cell.front), key=lambda t: t[1])
            print(f"minimprov/termini/{cost.value} Z={z}: largest jump {float(big[1]):.1%} "
                  f"of potential at {float(big[0]):.0%} of full cost")
            pts = ParetoFront(ParetoPoint(p, v, UpgradeSet(m)) for p, v, m in cell.front)
            plot_front(inst, pts, out / f"termini_{cost.value}_z{z}.svg",
                       f"MinImprov, TERMINI, {cost.value} costs, Z={z}")


if __name__ == "__main__":
    main()
