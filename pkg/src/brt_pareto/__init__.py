"""Exact Pareto fronts for BRT segment upgrades on a bus line (passengers vs. budget)."""

from .generator import ScenarioSpec, generate, generate_intractable, generate_prefix_special
from .model import (
    UNBOUNDED,
    Instance,
    Municipality,
    ODPair,
    Segment,
    UpgradeSet,
    count_components,
    investment_cost,
    min_investment_budget,
    validate_instance,
)
from .oracle import brute_force_cost_front, brute_force_front, brute_force_single
from .pareto import ParetoFront, ParetoPoint, enumerate_pareto, evaluate_front_by_cost, front_size_bound
from .response import ResponseKind, attracted, attracted_per_od, effective_weights
from .serialization import load_instance, save_instance
from .solvers import SolverConfig, SolverKind, solve_single_objective

__all__ = [
    "UNBOUNDED", "Instance", "Municipality", "ODPair", "Segment", "UpgradeSet",
    "count_components", "investment_cost", "min_investment_budget", "validate_instance",
    "ResponseKind", "attracted", "attracted_per_od", "effective_weights",
    "SolverConfig", "SolverKind", "solve_single_objective",
    "ParetoFront", "ParetoPoint", "enumerate_pareto", "evaluate_front_by_cost", "front_size_bound",
    "brute_force_single", "brute_force_front", "brute_force_cost_front",
    "ScenarioSpec", "generate", "generate_intractable", "generate_prefix_special",
    "load_instance", "save_instance",
]
