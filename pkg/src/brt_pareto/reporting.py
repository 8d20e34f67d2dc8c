"""Study grid runner, aggregate reports and Pareto plots."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

from .generator import CostPattern, DemandPattern, ScenarioSpec, generate
from .model import UNBOUNDED, Instance, UpgradeSet, investment_cost
from .pareto import EnumerationIncomplete, ParetoFront, ParetoPoint, enumerate_pareto, front_size_bound
from .response import ResponseKind
from .serialization import rational_to_json

log = logging.getLogger(__name__)

THREADS_ENV = "BRT_PARETO_THREADS"
COMPONENT_CAPS = (1, 2, 3, UNBOUNDED)
# "single" means one municipality; the split is then irrelevant
SPLITS = ("single", "equal", "cost", "pass")

AGGREGATE_HEADER = ["response", "cost", "demand", "split", "components", "status", "front_seconds",
                    "points", "seconds_per_point", "iterations", "bound", "within_bound"]


def percent(x: Fraction, whole) -> str:
    """``100 * x / whole`` rounded half up to 4 decimals, computed exactly."""
    if whole == 0:
        return "0.0000"
    scaled = Fraction(x) * 100 * 10**4 / Fraction(whole)
    q = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // 10**4}.{q % 10**4:04d}"


def cap_label(z) -> str:
    return "inf" if z == UNBOUNDED else str(int(z))


@dataclass(frozen=True, order=True)
class CellKey:
    response: str
    cost: str
    demand: str
    split: str
    components: str

    @property
    def scenario(self) -> tuple:
        """The grid cell without its component cap."""
        return (self.response, self.cost, self.demand, self.split)


@dataclass
class CellResult:
    key: CellKey
    status: str = "ok"
    front: list = field(default_factory=list)  # (passengers, budget, mask), budget descending
    seconds: float = 0.0
    point_seconds: list = field(default_factory=list)
    iterations: int = 0
    bound: int = 0
    total_potential: int = 0
    full_cost: int = 0
    error: str = ""

    def pareto_front(self) -> ParetoFront:
        return ParetoFront(ParetoPoint(p, v, UpgradeSet(m)) for p, v, m in self.front)


@dataclass
class RunReport:
    stations: int
    seed: int
    cells: list[CellResult] = field(default_factory=list)
    seconds: float = 0.0

    def __post_init__(self):
        self.cells.sort(key=lambda c: c.key)

    def cell(self, **key) -> CellResult:
        want = CellKey(**key)
        for c in self.cells:
            if c.key == want:
                return c
        raise KeyError(want)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for c in self.cells:
            k = c.key
            n = len(c.front)
            w.writerow([k.response, k.cost, k.demand, k.split, k.components, c.status,
                        f"{c.seconds:.4f}", n, f"{c.seconds / n:.6f}" if n else "",
                        c.iterations, c.bound, int(n <= c.bound)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        cells = []
        for c in self.cells:
            d = asdict(c)
            d["front"] = [{"passengers": rational_to_json(p), "budget": rational_to_json(v), "witness": m}
                          for p, v, m in c.front]
            cells.append(d)
        return {"stations": self.stations, "seed": self.seed, "seconds": self.seconds, "cells": cells}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def scenario_spec(key: CellKey, stations: int, seed: int,
                  improvement_range: tuple[int, int] | None = None) -> ScenarioSpec:
    """Generator input for one grid cell; ``improvement_range`` overrides the default draw."""
    single = key.split == "single"
    extra = {} if improvement_range is None else {"improvement_range": tuple(improvement_range)}
    return ScenarioSpec(
        stations=stations, cost_pattern=key.cost, demand_pattern=key.demand,
        budget_split="equal" if single else key.split,
        municipalities=1 if single else min(5, stations - 1),
        component_cap=key.components, response=key.response, seed=seed, **extra,
    )


def grid_keys(responses: Iterable = ResponseKind, costs: Iterable = CostPattern,
              demands: Iterable = DemandPattern, splits: Iterable = SPLITS,
              caps: Iterable = COMPONENT_CAPS) -> list[CellKey]:
    splits, caps, costs, demands = list(splits), list(caps), list(costs), list(demands)
    return sorted(
        CellKey(ResponseKind.parse(r).value, CostPattern(c).value, DemandPattern(d).value, s, cap_label(z))
        for r in responses for c in costs for d in demands for s in splits for z in caps
    )


def run_cell(key: CellKey, stations: int, seed: int,
             improvement_range: tuple[int, int] | None = None) -> CellResult:
    instance = generate(scenario_spec(key, stations, seed, improvement_range))
    result = CellResult(key, bound=front_size_bound(instance),
                        total_potential=instance.total_potential,
                        full_cost=investment_cost(instance, UpgradeSet(instance.upgradable_mask)))
    t0 = time.perf_counter()
    try:
        trace = enumerate_pareto(instance, key.response)
    except EnumerationIncomplete as exc:
        trace = exc.trace
        result.status, result.error = "incomplete", str(exc)
    except Exception as exc:  # recorded per cell so the grid keeps going
        log.exception("cell %s failed", key)
        result.status, result.error = "error", repr(exc)
        result.seconds = time.perf_counter() - t0
        return result
    result.seconds = time.perf_counter() - t0
    result.front = [(p.passengers, p.budget, p.witness.mask) for p in trace.front]
    result.point_seconds = [it.seconds for it in trace.iterations]
    result.iterations = len(trace.iterations)
    return result


def _run_cell_args(args):
    return run_cell(*args)


def pool_width(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, 0)) or os.cpu_count() or 1
    return max(1, threads)


def run_bench(stations: int = 25, seed: int = 0, keys: list[CellKey] | None = None,
              threads: int | None = None,
              improvement_range: tuple[int, int] | None = None) -> RunReport:
    """Run every grid cell; cells are independent and merged in key order."""
    keys = grid_keys() if keys is None else keys
    width = pool_width(threads)
    t0 = time.perf_counter()
    jobs = [(k, stations, seed, improvement_range) for k in keys]
    if width == 1:
        cells = [_run_cell_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=width) as pool:
            cells = list(pool.map(_run_cell_args, jobs))
    return RunReport(stations, seed, cells, time.perf_counter() - t0)


# --------------------------------------------------------------------------
# qualitative checks over a report
# --------------------------------------------------------------------------

def step_value(front: list, budget) -> Fraction:
    """Passengers reachable with at most ``budget`` on a (p, v, mask) list."""
    for p, v, _ in front:
        if v <= budget:
            return p
    return Fraction(0)


def pointwise_le(lower: list, upper: list) -> bool:
    budgets = {v for _, v, _ in lower} | {v for _, v, _ in upper}
    return all(step_value(lower, b) <= step_value(upper, b) for b in budgets)


def max_gap(a: list, b: list) -> Fraction:
    budgets = {v for _, v, _ in a} | {v for _, v, _ in b}
    return max((abs(step_value(a, x) - step_value(b, x)) for x in budgets), default=Fraction(0))


def cost_jumps(instance: Instance, front: list) -> list[tuple[Fraction, Fraction]]:
    """(cost share of the larger point, passenger share gained) for consecutive front points."""
    total = instance.total_potential
    full = investment_cost(instance, UpgradeSet(instance.upgradable_mask))
    pts = sorted((investment_cost(instance, UpgradeSet(m)), p) for p, _, m in front)
    return [(Fraction(c1, full), (p1 - p0) / total) for (c0, p0), (c1, p1) in zip(pts, pts[1:])]


# --------------------------------------------------------------------------
# plotting
# --------------------------------------------------------------------------

def plot_front(instance: Instance, front: ParetoFront, path, title: str = "", cost_points=None):
    """SVG step plot with both axes in percent of total potential and full-upgrade cost."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    total = instance.total_potential
    full = investment_cost(instance, UpgradeSet(instance.upgradable_mask))
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [float(percent(p.budget, full)) for p in front]
    ys = [float(percent(p.passengers, total)) for p in front]
    ax.step(xs, ys, where="post", marker="o", ms=3, label="budget")
    if cost_points:
        cx = [float(percent(c.cost, full)) for c in cost_points]
        cy = [float(percent(c.passengers, total)) for c in cost_points]
        ax.plot(cx, cy, "x", ms=4, label="investment cost")
    ax.set_xlabel("budget / cost [% of full upgrade cost]")
    ax.set_ylabel("attracted passengers [% of total potential]")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
