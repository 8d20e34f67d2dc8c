"""Instance data model for the BRT upgrade problem on a single bus line.

Stations are numbered ``1..n`` and segment ``i`` joins stations ``i`` and
``i + 1``.  All quantities that enter feasibility or dominance decisions are
exact: costs are integers, everything else is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Rational = Fraction

#: Sentinel for an unbounded component cap.
UNBOUNDED = math.inf


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


@dataclass(frozen=True)
class Segment:
    index: int
    cost: int
    improvement: Fraction
    upgradable: bool = True


@dataclass(frozen=True)
class Municipality:
    id: str
    first_segment: int
    last_segment: int
    share: Fraction

    @property
    def segments(self) -> range:
        return range(self.first_segment, self.last_segment + 1)


@dataclass(frozen=True)
class ODPair:
    origin: int
    destination: int
    potential: int
    threshold: Fraction = Fraction(0)

    @property
    def first_segment(self) -> int:
        return min(self.origin, self.destination)

    @property
    def last_segment(self) -> int:
        return max(self.origin, self.destination) - 1

    @property
    def path(self) -> range:
        """Segments strictly between the two stations."""
        return range(self.first_segment, self.last_segment + 1)


@dataclass(frozen=True)
class UpgradeSet:
    """Set of segments as a bitmask; bit ``i - 1`` marks segment ``i``."""

    mask: int = 0

    @classmethod
    def of(cls, segments: Iterable[int]) -> "UpgradeSet":
        mask = 0
        for i in segments:
            if i < 1:
                raise ValueError(f"segment indices are 1-based, got {i}")
            mask |= 1 << (i - 1)
        return cls(mask)

    def __contains__(self, segment: int) -> bool:
        return segment >= 1 and bool(self.mask >> (segment - 1) & 1)

    def __iter__(self):
        mask, i = self.mask, 1
        while mask:
            if mask & 1:
                yield i
            mask >>= 1
            i += 1

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def segments(self) -> tuple[int, ...]:
        return tuple(self)

    def __repr__(self) -> str:
        return f"UpgradeSet({set(self) or '{}'})"


@dataclass(frozen=True)
class Instance:
    stations: int
    segments: tuple[Segment, ...]
    municipalities: tuple[Municipality, ...]
    od_pairs: tuple[ODPair, ...]
    component_cap: float | int = UNBOUNDED
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        for name in ("segments", "municipalities", "od_pairs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    def segment(self, i: int) -> Segment:
        return self.segments[i - 1]

    @cached_property
    def municipality_of(self) -> tuple[int, ...]:
        """0-based municipality position for each segment (0-based)."""
        owner = [-1] * self.n_segments
        for m, muni in enumerate(self.municipalities):
            for i in muni.segments:
                if 1 <= i <= self.n_segments:
                    owner[i - 1] = m
        return tuple(owner)

    @cached_property
    def upgradable_mask(self) -> int:
        return UpgradeSet.of(s.index for s in self.segments if s.upgradable).mask

    @cached_property
    def path_improvement(self) -> tuple[Fraction, ...]:
        return tuple(
            sum((self.segment(i).improvement for i in d.path), Fraction(0))
            for d in self.od_pairs
        )

    @property
    def total_potential(self) -> int:
        return sum(d.potential for d in self.od_pairs)

    @property
    def cap_is_unbounded(self) -> bool:
        return self.component_cap == UNBOUNDED

    def with_component_cap(self, z) -> "Instance":
        return Instance(
            self.stations, self.segments, self.municipalities, self.od_pairs,
            normalize_cap(z), dict(self.meta),
        )

    def with_municipalities(self, municipalities: Sequence[Municipality]) -> "Instance":
        return Instance(
            self.stations, self.segments, tuple(municipalities), self.od_pairs,
            self.component_cap, dict(self.meta),
        )


def normalize_cap(z):
    if z is None or z == UNBOUNDED or (isinstance(z, str) and z.strip().lower() in ("inf", "infinity", "∞")):
        return UNBOUNDED
    z = int(z)
    if z < 1:
        raise ValueError(f"component cap must be >= 1, got {z}")
    return z


def effective_component_cap(instance: Instance, z=None) -> int:
    """Finite cap equivalent to ``z``: more than ceil(|E|/2) components is impossible."""
    z = instance.component_cap if z is None else normalize_cap(z)
    redundant = max(1, math.ceil(instance.n_segments / 2))
    return redundant if z == UNBOUNDED else min(int(z), redundant)


def validate_instance(instance: Instance) -> list[str]:
    """Return a description of every violated invariant; empty means valid."""
    problems: list[str] = []
    n = instance.stations
    if n < 2:
        problems.append(f"stations: need at least 2, got {n}")
    if len(instance.segments) != n - 1:
        problems.append(f"segments: expected {n - 1} for {n} stations, got {len(instance.segments)}")
    for pos, seg in enumerate(instance.segments, start=1):
        if seg.index != pos:
            problems.append(f"segment {pos}: index is {seg.index}, expected {pos}")
        if not isinstance(seg.cost, int) or isinstance(seg.cost, bool) or seg.cost < 1:
            problems.append(f"segment {pos}: cost must be an integer >= 1, got {seg.cost!r}")
        if not isinstance(seg.improvement, Fraction) or seg.improvement <= 0:
            problems.append(f"segment {pos}: improvement must be a positive rational, got {seg.improvement!r}")

    m_count = len(instance.municipalities)
    if m_count == 0:
        problems.append("municipalities: at least one is required")
    covered: dict[int, str] = {}
    ids = set()
    for muni in instance.municipalities:
        if muni.id in ids:
            problems.append(f"municipality {muni.id}: duplicate id")
        ids.add(muni.id)
        if muni.first_segment > muni.last_segment:
            problems.append(f"municipality {muni.id}: empty segment range {muni.first_segment}..{muni.last_segment}")
        for i in muni.segments:
            if not 1 <= i <= instance.n_segments:
                problems.append(f"municipality {muni.id}: segment {i} does not exist")
            elif i in covered:
                problems.append(f"municipality {muni.id}: segment {i} already belongs to {covered[i]}")
            else:
                covered[i] = muni.id
        if not isinstance(muni.share, Fraction) or muni.share <= 0:
            problems.append(f"municipality {muni.id}: budget share must be positive, got {muni.share}")
    missing = [i for i in range(1, instance.n_segments + 1) if i not in covered]
    if missing and m_count:
        problems.append(f"municipalities: segments {missing} are not covered")
    total_share = sum((m.share for m in instance.municipalities), Fraction(0))
    if m_count and total_share != 1:
        problems.append(f"budget shares sum to {total_share} ≠ 1")

    for k, d in enumerate(instance.od_pairs, start=1):
        label = f"OD pair {k} ({d.origin}->{d.destination})"
        if not (1 <= d.origin <= n and 1 <= d.destination <= n):
            problems.append(f"{label}: station outside 1..{n}")
            continue
        if d.origin == d.destination:
            problems.append(f"{label}: origin equals destination")
            continue
        if not isinstance(d.potential, int) or isinstance(d.potential, bool) or d.potential < 1:
            problems.append(f"{label}: potential must be an integer >= 1, got {d.potential!r}")
        if d.threshold < 0:
            problems.append(f"{label}: threshold must be nonnegative, got {d.threshold}")
        if len(instance.segments) == n - 1:
            path_sum = instance.path_improvement[k - 1]
            if d.threshold > path_sum:
                problems.append(f"{label}: threshold exceeds path improvement ({d.threshold} > {path_sum})")
            else:
                reachable = sum(
                    (instance.segment(i).improvement for i in d.path if instance.segment(i).upgradable),
                    Fraction(0),
                )
                if d.threshold > reachable:
                    warnings.warn(
                        f"{label}: threshold {d.threshold} is unreachable through upgradable segments "
                        f"(at most {reachable}); the pair can never be attracted",
                        stacklevel=2,
                    )

    z = instance.component_cap
    if z != UNBOUNDED and (not isinstance(z, int) or z < 1):
        problems.append(f"componentCap must be a positive integer or unbounded, got {z!r}")
    return problems


def check_upgrade_set(instance: Instance, f: UpgradeSet) -> None:
    extra = f.mask & ~instance.upgradable_mask
    if extra:
        raise ValueError(f"upgrade set contains non-upgradable or unknown segments: {UpgradeSet(extra)}")


def spend_per_municipality(instance: Instance, f: UpgradeSet) -> list[int]:
    spend = [0] * len(instance.municipalities)
    owner = instance.municipality_of
    for i in f:
        spend[owner[i - 1]] += instance.segment(i).cost
    return spend


def investment_cost(instance: Instance, f: UpgradeSet) -> int:
    return sum(instance.segment(i).cost for i in f)


def min_investment_budget(instance: Instance, f: UpgradeSet) -> Fraction:
    """Smallest ``v`` such that every municipality's spend is at most ``b_m * v``."""
    spend = spend_per_municipality(instance, f)
    return max(
        (Fraction(s) / m.share for s, m in zip(spend, instance.municipalities)),
        default=Fraction(0),
    )


def count_components(instance: Instance, f: UpgradeSet) -> int:
    """Number of maximal runs of consecutive upgraded segments."""
    mask = f.mask
    # a run starts wherever bit i is set and bit i-1 is not
    return bin(mask & ~(mask << 1)).count("1")


def municipality_caps(instance: Instance, budget) -> list[int]:
    """Largest integer spend each municipality may make under ``budget``."""
    budget = as_fraction(budget)
    return [math.floor(m.share * budget) for m in instance.municipalities]
