"""Budget-stepping epsilon-constraint loop that enumerates the exact Pareto front.

Starting from the budget that pays for every upgradable segment, each
iteration solves the single-objective problem, computes the minimum budget
``vbar`` of the optimal set, and lowers the budget to ``vbar - delta`` where
``delta`` is the largest step that cannot skip a non-dominated point (costs are
integers, so each municipality's spend can only drop to the next integer).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .model import (
    Instance,
    UpgradeSet,
    count_components,
    investment_cost,
    min_investment_budget,
    spend_per_municipality,
)
from .response import ResponseKind, attracted
from .solvers import SolverConfig, SolverContext, SolverLimitExceeded


@dataclass(frozen=True)
class ParetoPoint:
    passengers: Fraction
    budget: Fraction
    witness: UpgradeSet = UpgradeSet()


class ParetoFront:
    """Points sorted by strictly decreasing budget and strictly decreasing passengers."""

    def __init__(self, points: Iterable[ParetoPoint] = ()):
        self.points = sorted(points, key=lambda p: p.budget, reverse=True)
        for hi, lo in zip(self.points, self.points[1:]):
            if not (hi.budget > lo.budget and hi.passengers > lo.passengers):
                raise ValueError(
                    f"not a Pareto front: ({hi.passengers}, {hi.budget}) and "
                    f"({lo.passengers}, {lo.budget}) are not strictly ordered"
                )

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def values(self) -> list[tuple[Fraction, Fraction]]:
        return [(p.passengers, p.budget) for p in self.points]

    def __eq__(self, other):
        if not isinstance(other, ParetoFront):
            return NotImplemented
        return self.values() == other.values()

    def __repr__(self):
        body = ", ".join(f"({p}, {v})" for p, v in self.values())
        return f"ParetoFront([{body}])"

    def passengers_at(self, budget) -> Fraction:
        """Best passenger value reachable with at most ``budget`` (step function)."""
        for p in self.points:
            if p.budget <= budget:
                return p.passengers
        return Fraction(0)

    def breakpoints(self) -> list[Fraction]:
        return [p.budget for p in self.points]


@dataclass(frozen=True)
class Iteration:
    budget: Fraction
    objective: Fraction
    min_budget: Fraction
    tight: frozenset
    step: Fraction
    solver: str
    nodes: int
    seconds: float


@dataclass
class EnumerationTrace:
    iterations: list[Iteration] = field(default_factory=list)
    front: ParetoFront = field(default_factory=ParetoFront)
    complete: bool = True
    seconds: float = 0.0


class EnumerationIncomplete(RuntimeError):
    def __init__(self, message, trace: EnumerationTrace, cause: SolverLimitExceeded):
        super().__init__(message)
        self.trace = trace
        self.cause = cause


def initial_budget(instance: Instance) -> Fraction:
    """Budget at which every municipality can upgrade all its upgradable segments."""
    return min_investment_budget(instance, UpgradeSet(instance.upgradable_mask))


def front_size_bound(instance: Instance) -> int:
    """Upper bound on the number of non-dominated points."""
    top = initial_budget(instance)
    return 1 + sum(math.floor(m.share * top) for m in instance.municipalities)


def tight_municipalities(instance: Instance, f: UpgradeSet, vbar) -> frozenset:
    spend = spend_per_municipality(instance, f)
    return frozenset(
        m.id for m, s in zip(instance.municipalities, spend) if s == m.share * vbar
    )


def step_width(instance: Instance, vbar, tight) -> Fraction:
    """Largest budget decrease that keeps every cheaper solution feasible."""
    vbar = Fraction(vbar)
    candidates = []
    for m in instance.municipalities:
        if m.id in tight:
            candidates.append(1 / m.share)
        else:
            level = m.share * vbar
            candidates.append((level - math.ceil(level - 1)) / m.share)
    return min(candidates)


def enumerate_pareto(instance: Instance, kind, z=None, config: SolverConfig | None = None,
                     context: SolverContext | None = None) -> EnumerationTrace:
    """Complete exact Pareto front (passengers vs. investment budget).

    ``z`` overrides the instance's component cap.
    """
    kind = ResponseKind.parse(kind)
    ctx = context or SolverContext(instance, kind, z, config or SolverConfig())
    trace = EnumerationTrace()
    started = time.perf_counter()
    points: list[ParetoPoint] = []

    budget = initial_budget(instance)
    p_star = v_star = witness_star = None
    while budget >= 0:
        t0 = time.perf_counter()
        try:
            res = ctx.solve(budget, upper_bound=p_star)
        except SolverLimitExceeded as exc:
            if p_star is not None:
                points.append(ParetoPoint(p_star, v_star, witness_star))
            trace.front = ParetoFront(points)
            trace.complete = False
            trace.seconds = time.perf_counter() - started
            raise EnumerationIncomplete(f"solver gave up at budget {budget}: {exc}", trace, exc) from exc
        vbar = min_investment_budget(instance, res.best)
        tight = tight_municipalities(instance, res.best, vbar)
        delta = step_width(instance, vbar, tight)
        trace.iterations.append(Iteration(
            budget, res.objective, vbar, tight, delta, res.solver_used.value,
            res.nodes_explored, time.perf_counter() - t0,
        ))
        if p_star is None:
            # first solve at the full budget yields the global maximum
            p_star = res.objective
        elif res.objective < p_star:
            points.append(ParetoPoint(p_star, v_star, witness_star))
            p_star = res.objective
        v_star, witness_star = vbar, res.best
        budget = vbar - delta
    points.append(ParetoPoint(p_star, v_star, witness_star))
    trace.front = ParetoFront(points)
    trace.seconds = time.perf_counter() - started
    return trace


@dataclass(frozen=True)
class CostPoint:
    passengers: Fraction
    cost: int
    components: int


def evaluate_front_by_cost(instance: Instance, trace: EnumerationTrace | ParetoFront,
                           kind) -> list[CostPoint]:
    """Evaluate each witness by investment cost; deliberately not re-filtered."""
    front = trace.front if isinstance(trace, EnumerationTrace) else trace
    return [
        CostPoint(attracted(instance, p.witness, kind), investment_cost(instance, p.witness),
                  count_components(instance, p.witness))
        for p in front
    ]
