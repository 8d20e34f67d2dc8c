"""Brute-force ground truth by exhaustive subset enumeration (small instances only)."""

from __future__ import annotations

from fractions import Fraction

from .model import (
    Instance,
    UpgradeSet,
    as_fraction,
    count_components,
    investment_cost,
    min_investment_budget,
    municipality_caps,
    spend_per_municipality,
)
from .pareto import ParetoFront, ParetoPoint
from .response import attracted
from .solvers import SolverKind, SubproblemResult, preference_key

SINGLE_LIMIT = 24
FRONT_LIMIT = 20


class OracleSizeError(ValueError):
    pass


def _feasible_sets(instance: Instance, limit: int, z=None):
    n = instance.n_segments
    if n > limit:
        raise OracleSizeError(f"{n} segments exceed the oracle limit of {limit}")
    cap = instance.component_cap if z is None else z
    upgradable = instance.upgradable_mask
    for mask in range(1 << n):
        if mask & ~upgradable:
            continue
        f = UpgradeSet(mask)
        if count_components(instance, f) <= cap:
            yield f


def brute_force_single(instance: Instance, kind, budget, z=None) -> SubproblemResult:
    caps = municipality_caps(instance, as_fraction(budget))
    best, best_key = None, None
    scanned = 0
    for f in _feasible_sets(instance, SINGLE_LIMIT, z):
        scanned += 1
        if any(s > c for s, c in zip(spend_per_municipality(instance, f), caps)):
            continue
        key = (attracted(instance, f, kind), preference_key(f.mask, instance.n_segments))
        if best_key is None or key > best_key:
            best, best_key = f, key
    return SubproblemResult(best, best_key[0], SolverKind.BRANCH_BOUND, scanned)


def _non_dominated(points):
    """Keep points not weakly dominated; among equal passengers the cheapest wins."""
    best_at: dict[Fraction, tuple] = {}
    for p, v, f in points:
        if p not in best_at or (v, -preference_key(f.mask, 64)) < best_at[p][:2]:
            best_at[p] = (v, -preference_key(f.mask, 64), f)
    front = []
    floor_budget = None
    for p in sorted(best_at, reverse=True):
        v, _, f = best_at[p]
        if floor_budget is None or v < floor_budget:
            front.append((p, v, f))
            floor_budget = v
    return front


def brute_force_front(instance: Instance, kind, z=None) -> ParetoFront:
    """Non-dominated (passengers, minimum budget) points over every feasible set."""
    pts = [(attracted(instance, f, kind), min_investment_budget(instance, f), f)
           for f in _feasible_sets(instance, FRONT_LIMIT, z)]
    return ParetoFront([ParetoPoint(p, v, f) for p, v, f in _non_dominated(pts)])


def brute_force_cost_front(instance: Instance, kind, z=None) -> ParetoFront:
    """Non-dominated (passengers, investment cost) points; budget shares ignored."""
    pts = [(attracted(instance, f, kind), Fraction(investment_cost(instance, f)), f)
           for f in _feasible_sets(instance, FRONT_LIMIT, z)]
    return ParetoFront([ParetoPoint(p, v, f) for p, v, f in _non_dominated(pts)])
