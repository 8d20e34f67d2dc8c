"""Seeded artificial instances and theory-driven test families.

Random draws come from SplitMix64 (Steele, Lea & Flood 2014) so an instance is
reproducible from its seed in any language:

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    output z ^ (z >> 31)

Integers in ``[lo, hi]`` use rejection sampling on the raw 64-bit output
(reject values >= the largest multiple of the range width, then take the
remainder).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .model import UNBOUNDED, Instance, Municipality, ODPair, Segment, normalize_cap
from .response import ResponseKind

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        width = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % width)
        while True:
            x = self.next()
            if x < limit:
                return lo + x % width

    def sample(self, population: list, k: int) -> list:
        """``k`` distinct items, partial Fisher-Yates."""
        pool = list(population)
        for i in range(k):
            j = self.randint(i, len(pool) - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


class CostPattern(enum.Enum):
    UNIT = "unit"
    MIDDLE = "middle"
    ENDS = "ends"


class DemandPattern(enum.Enum):
    EVEN = "even"
    HUBS = "hubs"
    TERMINI = "termini"


class BudgetSplit(enum.Enum):
    EQUAL = "equal"
    COST = "cost"
    PASS = "pass"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    stations: int = 25
    cost_pattern: CostPattern = CostPattern.UNIT
    demand_pattern: DemandPattern = DemandPattern.EVEN
    budget_split: BudgetSplit = BudgetSplit.EQUAL
    municipalities: int = 5
    component_cap: object = UNBOUNDED
    response: ResponseKind = ResponseKind.LINEAR
    threshold_fraction: Fraction = Fraction(3, 4)
    seed: int = 0
    # generator constants
    cost_amplitude: int = 9
    improvement_range: tuple = (1, 10)
    even_potential: int = 10
    hub_attractiveness: int = 10
    hub_count: int = 3
    end_to_end_share: Fraction = Fraction(14, 100)

    def __post_init__(self):
        conv = {"cost_pattern": CostPattern, "demand_pattern": DemandPattern,
                "budget_split": BudgetSplit}
        for name, cls in conv.items():
            value = getattr(self, name)
            if not isinstance(value, cls):
                try:
                    object.__setattr__(self, name, cls(str(value).lower()))
                except ValueError:
                    raise ScenarioError(f"{name}: unknown value {value!r}; "
                                        f"choose from {[c.value for c in cls]}") from None
        object.__setattr__(self, "response", ResponseKind.parse(self.response))
        object.__setattr__(self, "threshold_fraction", Fraction(self.threshold_fraction))
        try:
            object.__setattr__(self, "component_cap", normalize_cap(self.component_cap))
        except ValueError as exc:
            raise ScenarioError(f"component_cap: {exc}") from None
        problems = []
        if self.stations < 2:
            problems.append(f"stations must be >= 2, got {self.stations}")
        if not 1 <= self.municipalities <= self.stations - 1:
            problems.append(f"municipalities must be in 1..{self.stations - 1}, got {self.municipalities}")
        if not 0 < self.threshold_fraction <= 1:
            problems.append(f"threshold_fraction must be in (0, 1], got {self.threshold_fraction}")
        if not 0 <= self.seed <= MASK64:
            problems.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        lo, hi = self.improvement_range
        if not 1 <= lo <= hi:
            problems.append(f"improvement_range must satisfy 1 <= lo <= hi, got {self.improvement_range}")
        if self.cost_amplitude < 0 or self.even_potential < 1:
            problems.append("cost_amplitude must be >= 0 and even_potential >= 1")
        if not 0 < self.end_to_end_share < 1:
            problems.append(f"end_to_end_share must be in (0, 1), got {self.end_to_end_share}")
        if problems:
            raise ScenarioError("; ".join(problems))

    def meta(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if isinstance(value, enum.Enum):
                value = value.value
            elif isinstance(value, Fraction):
                value = f"{value.numerator}/{value.denominator}"
            elif value == UNBOUNDED:
                value = "inf"
            elif isinstance(value, tuple):
                value = list(value)
            out[key] = value
        return out


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def cost_profile(pattern: CostPattern, n_segments: int, amplitude: int = 9) -> list[int]:
    """Symmetric integer costs ``1 + round(amplitude * triangle)``."""
    if pattern is CostPattern.UNIT or n_segments == 1:
        return [1] * n_segments
    costs = []
    for i in range(n_segments):
        # distance from the midpoint, 0 at the centre and 1 at the ends
        edge = abs(Fraction(2 * i, n_segments - 1) - 1)
        tri = 1 - edge if pattern is CostPattern.MIDDLE else edge
        costs.append(1 + _round_half_up(amplitude * tri))
    return costs


def municipality_blocks(n_segments: int, count: int) -> list[tuple[int, int]]:
    """Consecutive groups of near-equal size; the smaller groups sit in the middle."""
    q, r = divmod(n_segments, count)
    centre = (count - 1) / 2
    by_centrality = sorted(range(count), key=lambda g: (abs(g - centre), g))
    small = set(by_centrality[:count - r])
    blocks, start = [], 1
    for g in range(count):
        size = q if g in small else q + 1
        blocks.append((start, start + size - 1))
        start += size
    return blocks


def _demand(spec: ScenarioSpec, rng: SplitMix64) -> tuple[dict, dict]:
    n = spec.stations
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    meta: dict = {}
    if spec.demand_pattern is DemandPattern.EVEN:
        return {p: spec.even_potential for p in pairs}, meta
    if spec.demand_pattern is DemandPattern.TERMINI:
        demand = {p: spec.even_potential for p in pairs}
        base = sum(v for p, v in demand.items() if p != (1, n))
        share = spec.end_to_end_share
        if n > 2:
            demand[(1, n)] = max(1, _round_half_up(share * base / (1 - share)))
        meta["endToEndPotential"] = demand[(1, n)]
        return demand, meta
    # gravity model around a few hub stations
    interior = list(range(2, n)) or list(range(1, n + 1))
    hubs = sorted(rng.sample(interior, min(spec.hub_count, len(interior))))
    attract = {s: spec.hub_attractiveness if s in hubs else rng.randint(1, 3)
               for s in range(1, n + 1)}
    target = spec.even_potential * len(pairs)
    raw = {(i, j): Fraction(attract[i] * attract[j], j - i) for i, j in pairs}
    scale = Fraction(target) / sum(raw.values())
    meta.update(hubs=hubs, attractiveness=[attract[s] for s in range(1, n + 1)],
                gravityScale=f"{scale.numerator}/{scale.denominator}", targetPotential=target)
    return {p: max(1, _round_half_up(scale * v)) for p, v in raw.items()}, meta


def _shares(spec: ScenarioSpec, blocks, costs, demand) -> list[Fraction]:
    count = len(blocks)
    if count == 1:
        return [Fraction(1)]
    if spec.budget_split is BudgetSplit.EQUAL:
        return [Fraction(1, count)] * count
    if spec.budget_split is BudgetSplit.COST:
        per = [sum(costs[s - 1:t]) for s, t in blocks]
        return [Fraction(c, sum(per)) for c in per]
    # passengers entering or leaving at each station, split over its incident segments
    n = spec.stations
    flow = [0] * (n + 1)
    for (i, j), a in demand.items():
        flow[i] += a
        flow[j] += a
    owner = {}
    for m, (s, t) in enumerate(blocks):
        for e in range(s, t + 1):
            owner[e] = m
    per = [Fraction(0)] * count
    for s in range(1, n + 1):
        incident = [e for e in (s - 1, s) if 1 <= e <= n - 1]
        for e in incident:
            per[owner[e]] += Fraction(flow[s], len(incident))
    total = sum(per)
    return [p / total for p in per]


def generate(spec: ScenarioSpec) -> Instance:
    """Deterministic instance for ``spec``; the same seed always gives the same instance."""
    rng = SplitMix64(spec.seed)
    n = spec.stations
    lo, hi = spec.improvement_range
    improvements = [rng.randint(lo, hi) for _ in range(n - 1)]
    costs = cost_profile(spec.cost_pattern, n - 1, spec.cost_amplitude)
    demand, demand_meta = _demand(spec, rng)
    segments = [Segment(i, costs[i - 1], Fraction(improvements[i - 1])) for i in range(1, n)]
    prefix = [0]
    for u in improvements:
        prefix.append(prefix[-1] + u)
    od_pairs = [
        ODPair(i, j, a, Fraction(math.floor(spec.threshold_fraction * (prefix[j - 1] - prefix[i - 1]))))
        for (i, j), a in sorted(demand.items())
    ]
    blocks = municipality_blocks(n - 1, spec.municipalities)
    shares = _shares(spec, blocks, costs, demand)
    munis = [Municipality(f"m{k + 1}", s, t, b) for k, ((s, t), b) in enumerate(zip(blocks, shares))]
    meta = {"generator": "scenario", **spec.meta(), **demand_meta}
    return Instance(n, segments, munis, od_pairs, spec.component_cap, meta)


def generate_intractable(n: int) -> Instance:
    """Line whose front has ``2**(n-1)`` points: costs and potentials ``2**(i-1)``."""
    if n < 2:
        raise ValueError(f"need at least 2 stations, got {n}")
    if n - 1 > 62:
        raise OverflowError(f"2**{n - 2} does not fit a 64-bit integer")
    segments = [Segment(i, 2 ** (i - 1), Fraction(1)) for i in range(1, n)]
    ods = [ODPair(i, i + 1, 2 ** (i - 1), Fraction(1)) for i in range(1, n)]
    munis = [Municipality("m1", 1, n - 1, Fraction(1))]
    return Instance(n, segments, munis, ods, UNBOUNDED, {"generator": "intractable", "stations": n})


def generate_prefix_special(n: int, variant: str) -> Instance:
    """Single-municipality instances whose fronts have connected sorted-prefix solutions.

    ``unimodal-weights``: unit costs, per-segment gains rising then falling.
    ``unimodal-costs``: every segment gains exactly 1, costs falling then rising.
    """
    if n < 3:
        raise ValueError(f"need at least 3 stations, got {n}")
    m = n - 1
    if variant == "unimodal-weights":
        costs = [1] * m
        potentials = [min(i, n - i) for i in range(1, n)]
    elif variant == "unimodal-costs":
        costs = [1 + abs(2 * i - n) // 2 for i in range(1, n)]
        potentials = [1] * m
    else:
        raise ValueError(f"unknown variant {variant!r}")
    segments = [Segment(i, costs[i - 1], Fraction(1)) for i in range(1, n)]
    ods = [ODPair(i, i + 1, potentials[i - 1], Fraction(1)) for i in range(1, n)]
    munis = [Municipality("m1", 1, m, Fraction(1))]
    return Instance(n, segments, munis, ods, UNBOUNDED, {"generator": variant, "stations": n})
