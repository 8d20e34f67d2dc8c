"""Exact solvers for the single-objective problem at a fixed budget.

Maximize attracted passengers subject to ``spend_m <= floor(b_m * B)`` for
every municipality and at most ``z`` BRT components.

Tie-breaking: among optimal sets every solver returns the one whose
membership vector ``(x_1, x_2, ...)`` is lexicographically largest, i.e. the
one that keeps the earliest segments.  :func:`preference_key` encodes this.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _bb_kernel
from .model import (
    UNBOUNDED,
    Instance,
    UpgradeSet,
    as_fraction,
    effective_component_cap,
    municipality_caps,
)
from .response import ResponseKind, effective_weights

log = logging.getLogger(__name__)

INT64_HEADROOM = 2**62


class SolverKind(enum.Enum):
    LINEAR_DP = "LinearDP"
    INTERVAL_ENUM = "IntervalEnum"
    BRANCH_BOUND = "BranchBound"
    PREFIX_FAST_PATH = "PrefixFastPath"


class SolverLimitExceeded(RuntimeError):
    """Raised when an exact solve is abandoned; never replaced by a heuristic."""

    def __init__(self, message, incumbent: UpgradeSet | None = None,
                 incumbent_value=None, bound=None, nodes: int = 0):
        super().__init__(message)
        self.incumbent = incumbent
        self.incumbent_value = incumbent_value
        self.bound = bound
        self.nodes = nodes


class EnumerationCapExceeded(Exception):
    """Too many interval placements; the caller should use branch and bound."""


@dataclass(frozen=True)
class SubproblemResult:
    best: UpgradeSet
    objective: Fraction
    solver_used: SolverKind
    nodes_explored: int = 0


@dataclass
class SolverConfig:
    enumeration_cap: int = 10**7
    max_enum_components: int = 3
    max_enum_stations: int = 64
    node_limit: int = 10**8
    use_interval_enum: bool = True
    use_prefix_fast_path: bool = True
    lp_bound: bool = True
    jit: bool = True


def preference_key(mask: int, n_segments: int) -> int:
    """Tie-break key: larger is preferred; segment 1 is the most significant bit."""
    key = 0
    for _ in range(n_segments):
        key = (key << 1) | (mask & 1)
        mask >>= 1
    return key


def _lcm_denominator(values) -> int:
    den = 1
    for v in values:
        den = math.lcm(den, Fraction(v).denominator)
    return den


def interval_candidate_count(n_segments: int, z: int) -> int:
    """Number of segment sets with at most ``z`` components on a line."""
    return sum(math.comb(n_segments + 1, 2 * k) for k in range(z + 1))


# --------------------------------------------------------------------------
# Linear response: dynamic programming
# --------------------------------------------------------------------------

class LinearDP:
    """Knapsack-style DP for an additive objective ``sum(w_e for e in F)``.

    Each municipality owns a consecutive block of segments, so a table per block
    indexed by (spend, components inside the block, first/last segment upgraded)
    is built once.  A query for a caps vector then only sweeps the blocks in line
    order, tracking the global component count and whether the previous block
    ended on an upgraded segment.
    """

    def __init__(self, instance: Instance, weights: Sequence, z=None):
        self.instance = instance
        self.z = effective_component_cap(instance, z)
        self.scale = _lcm_denominator(weights)
        self.values = [int(Fraction(w) * self.scale) for w in weights]
        self.blocks = [self._block_table(muni) for muni in instance.municipalities]

    def _block_table(self, muni):
        inst = self.instance
        segs = list(muni.segments)
        total = sum(inst.segment(i).cost for i in segs if inst.segment(i).upgradable)
        # state (spend, k, first_up, last_up) -> (value, key); first_up is -1 before any segment
        states = {(0, 0, -1, 0): (0, 0)}
        for pos, i in enumerate(segs):
            seg = inst.segment(i)
            nxt: dict = {}
            for (spend, k, first, last), (val, key) in states.items():
                f0 = 0 if pos == 0 else first
                cand = (spend, k, f0, 0)
                entry = (val, key << 1)
                if cand not in nxt or entry > nxt[cand]:
                    nxt[cand] = entry
                if seg.upgradable:
                    nk = k if last else k + 1
                    if nk <= self.z:
                        f1 = 1 if pos == 0 else first
                        cand = (spend + seg.cost, nk, f1, 1)
                        entry = (val + self.values[i - 1], (key << 1) | 1)
                        if cand not in nxt or entry > nxt[cand]:
                            nxt[cand] = entry
            states = nxt
        # best entry with spend <= cap, per (k, first, last)
        table: dict = {}
        for (spend, k, first, last), entry in states.items():
            table.setdefault((k, first, last), [None] * (total + 1))[spend] = entry
        for row in table.values():
            running = None
            for s in range(total + 1):
                if row[s] is not None and (running is None or row[s] > running):
                    running = row[s]
                row[s] = running
        return len(segs), total, table

    def solve(self, caps: Sequence[int]) -> tuple[int, int, int]:
        """Return (scaled value, mask, transitions) of the best set under ``caps``."""
        states = {(0, 0): (0, 0)}
        work = 0
        for (length, total, table), cap in zip(self.blocks, caps):
            cap = min(int(cap), total)
            if cap < 0:
                cap = -1
            nxt: dict = {}
            for (k_tot, last), (val, key) in states.items():
                for (k, first, end), row in table.items():
                    if cap < 0:
                        continue
                    entry = row[cap]
                    if entry is None:
                        continue
                    work += 1
                    nk = k_tot + k - (1 if last and first == 1 else 0)
                    if nk > self.z:
                        continue
                    cand = (nk, end)
                    new = (val + entry[0], (key << length) | entry[1])
                    if cand not in nxt or new > nxt[cand]:
                        nxt[cand] = new
            states = nxt
        value, key = max(states.values())
        return value, _key_to_mask(key, self.instance.n_segments), work


def _key_to_mask(key: int, n_segments: int) -> int:
    return preference_key(key, n_segments)  # bit reversal is an involution


def solve_linear_dp(instance: Instance, weights, caps: Sequence[int], z=None,
                    dp: LinearDP | None = None) -> SubproblemResult:
    dp = dp or LinearDP(instance, weights, z)
    value, mask, work = dp.solve(caps)
    return SubproblemResult(UpgradeSet(mask), Fraction(value, dp.scale), SolverKind.LINEAR_DP, work)


def solve_prefix(instance: Instance, weights, cap: int) -> SubproblemResult:
    """Unit costs, one municipality, no component cap: take the largest weights."""
    ranked = sorted(
        (i for i in range(1, instance.n_segments + 1) if instance.segment(i).upgradable),
        key=lambda i: (-weights[i - 1], i),
    )
    chosen = ranked[:max(0, cap)]
    f = UpgradeSet.of(chosen)
    return SubproblemResult(
        f, sum((Fraction(weights[i - 1]) for i in chosen), Fraction(0)),
        SolverKind.PREFIX_FAST_PATH, len(ranked),
    )


def prefix_applies(instance: Instance, z=None) -> bool:
    redundant = effective_component_cap(instance, UNBOUNDED)
    return (
        len(instance.municipalities) == 1
        and all(s.cost == 1 for s in instance.segments)
        and effective_component_cap(instance, z) >= redundant
    )


# --------------------------------------------------------------------------
# Integer encoding shared by enumeration and branch and bound
# --------------------------------------------------------------------------

@dataclass
class _Encoded:
    u: list          # scaled improvements (ints)
    thr: list        # scaled thresholds (ints)
    bonus: list      # scaled linear weights (ints)
    a: list          # potentials (threshold response) or zeros
    value_scale: int  # objective = value / value_scale
    fits_int64: bool


def _encode(instance: Instance, kind: ResponseKind, weights=None) -> _Encoded:
    n = instance.n_segments
    if kind is ResponseKind.LINEAR:
        weights = effective_weights(instance) if weights is None else weights
        scale = _lcm_denominator(weights)
        bonus = [int(Fraction(w) * scale) for w in weights]
        u = [0] * n
        thr, a = [], []
        total = sum(bonus)
    else:
        den = _lcm_denominator([s.improvement for s in instance.segments]
                               + [d.threshold for d in instance.od_pairs])
        u = [int(s.improvement * den) for s in instance.segments]
        thr = [int(d.threshold * den) for d in instance.od_pairs]
        a = [d.potential for d in instance.od_pairs]
        bonus = [0] * n
        scale = 1
        total = max(sum(a), sum(u))
    return _Encoded(u, thr, bonus, a, scale, total < INT64_HEADROOM)


# --------------------------------------------------------------------------
# Interval enumeration (fixed, small component cap)
# --------------------------------------------------------------------------

def _interval_sets(instance: Instance, z: int):
    """Yield masks of all sets of upgradable segments with at most ``z`` components."""
    n = instance.n_segments
    upg = [instance.segment(i).upgradable for i in range(1, n + 1)]
    # longest upgradable run starting at each 0-based position
    run = [0] * (n + 1)
    for s in range(n - 1, -1, -1):
        run[s] = run[s + 1] + 1 if upg[s] else 0

    def rec(start, left, mask):
        yield mask
        if left == 0:
            return
        for s in range(start, n):
            block = 0
            for t in range(s, s + run[s]):
                block |= 1 << t
                yield from rec(t + 2, left - 1, mask | block)

    yield from rec(0, z, 0)


class IntervalEnumeration:
    """All sets with at most ``z`` components, evaluated once, queried per caps vector."""

    def __init__(self, instance: Instance, kind, z: int, cap: int = 10**7, weights=None):
        self.instance = instance
        self.kind = ResponseKind.parse(kind)
        self.z = effective_component_cap(instance, z)
        count = interval_candidate_count(instance.n_segments, self.z)
        if count > cap:
            raise EnumerationCapExceeded(f"{count} interval placements exceed the cap {cap}")
        enc = _encode(instance, self.kind, weights)
        self.value_scale = enc.value_scale
        masks = list(_interval_sets(instance, self.z))
        n = instance.n_segments
        values = self._evaluate(masks, enc)
        owner = instance.municipality_of
        n_muni = len(instance.municipalities)
        spend = np.zeros((len(masks), n_muni), dtype=np.int64)
        cost = [s.cost for s in instance.segments]
        for row, mask in enumerate(masks):
            e = 0
            while mask:
                if mask & 1:
                    spend[row, owner[e]] += cost[e]
                mask >>= 1
                e += 1
        order = sorted(range(len(masks)),
                       key=lambda r: (values[r], preference_key(masks[r], n)), reverse=True)
        self.masks = [masks[r] for r in order]
        self.values = [values[r] for r in order]
        self.spend = spend[order]

    def _evaluate(self, masks, enc: _Encoded) -> list[int]:
        inst = self.instance
        if self.kind is ResponseKind.LINEAR:
            out = []
            for mask in masks:
                v, e = 0, 0
                while mask:
                    if mask & 1:
                        v += enc.bonus[e]
                    mask >>= 1
                    e += 1
                out.append(v)
            return out
        if not inst.od_pairs:
            return [0] * len(masks)
        n = inst.n_segments
        # float64 products are exact while every partial sum stays below 2**53
        exact_float = n <= 62 and sum(enc.u) < 2**52 and sum(enc.a) < 2**52
        dtype = np.float64 if exact_float else object
        cover = np.zeros((n, len(inst.od_pairs)), dtype=dtype)
        for d, od in enumerate(inst.od_pairs):
            for i in od.path:
                cover[i - 1, d] = enc.u[i - 1]
        thr = np.array(enc.thr, dtype=dtype)
        a = np.array(enc.a, dtype=dtype)
        out: list[int] = []
        chunk = 16384
        for start in range(0, len(masks), chunk):
            part = masks[start:start + chunk]
            if exact_float:
                arr = np.asarray(part, dtype=np.int64)
                bits = ((arr[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.float64)
            else:
                bits = np.array([[(m >> e) & 1 for e in range(n)] for m in part], dtype=object)
            achieved = bits @ cover
            out.extend(int(v) for v in ((achieved >= thr) * a).sum(axis=1))
        return out

    def solve(self, caps: Sequence[int]) -> SubproblemResult:
        caps_arr = np.asarray([int(c) for c in caps], dtype=np.int64)
        feasible = np.all(self.spend <= caps_arr, axis=1)
        row = int(np.argmax(feasible))  # candidates are sorted best-first; the empty set is always feasible
        return SubproblemResult(
            UpgradeSet(self.masks[row]),
            Fraction(self.values[row], self.value_scale),
            SolverKind.INTERVAL_ENUM,
            row + 1,
        )


def solve_interval_enum(instance: Instance, kind, caps: Sequence[int], z: int,
                        cap: int = 10**7) -> SubproblemResult:
    if z == UNBOUNDED:
        raise ValueError("interval enumeration needs a finite component cap")
    return IntervalEnumeration(instance, kind, z, cap).solve(caps)


# --------------------------------------------------------------------------
# Branch and bound
# --------------------------------------------------------------------------

class BranchBound:
    """Depth-first search, segments in line order, include branch first.

    Prunes on municipality caps, the component cap, and an upper bound made of
    the passengers already locked in plus every OD pair that can still reach
    its threshold (optionally tightened by a linear relaxation).
    """

    def __init__(self, instance: Instance, kind, z=None, config: SolverConfig | None = None,
                 weights=None):
        self.instance = instance
        self.kind = ResponseKind.parse(kind)
        self.z = effective_component_cap(instance, z)
        self.config = config or SolverConfig()
        enc = _encode(instance, self.kind, weights)
        self.value_scale = enc.value_scale
        n = instance.n_segments
        ods = instance.od_pairs if self.kind is ResponseKind.MINIMPROV else ()
        self.jit = self.config.jit and enc.fits_int64 and _bb_kernel.search_jit is not None
        ptr, idx = [0], []
        for e in range(1, n + 1):
            idx.extend(d for d, od in enumerate(ods) if od.first_segment <= e <= od.last_segment)
            ptr.append(len(idx))
        inv_thr = [1.0 / t if t > 0 else 0.0 for t in enc.thr]
        self.total_value = sum(enc.bonus) + sum(enc.a)
        n_od = len(ods)
        n_muni = len(instance.municipalities)
        if self.jit:
            i64 = lambda xs: np.asarray(xs, dtype=np.int64)  # noqa: E731
            self._static = (
                n, i64([s.cost for s in instance.segments]), i64(enc.u),
                i64([1 if s.upgradable else 0 for s in instance.segments]),
                i64(instance.municipality_of),
            )
            self._od = (i64(enc.bonus), i64([od.first_segment - 1 for od in ods]),
                        i64([od.last_segment - 1 for od in ods]), i64(enc.a), i64(enc.thr),
                        i64(ptr), i64(idx if idx else [0]), np.asarray(inv_thr, dtype=np.float64))
            self._scratch = lambda: (
                np.zeros(n_od, np.int64), np.zeros(n_od, np.int64),
                np.zeros(n + 1, np.int64), np.zeros(n + 1, np.int64), np.zeros(n + 1, np.int64),
                np.zeros(n + 2, np.int64), np.zeros(n_muni, np.int64),
                np.zeros(n + 1, np.float64), np.zeros(n + 1, np.int64), np.zeros(n_muni, np.float64),
                np.zeros(n + 1, np.int64), np.zeros(2, np.int64),
            )
        else:
            self._static = (
                n, [s.cost for s in instance.segments], list(enc.u),
                [1 if s.upgradable else 0 for s in instance.segments],
                list(instance.municipality_of),
            )
            self._od = (list(enc.bonus), [od.first_segment - 1 for od in ods],
                        [od.last_segment - 1 for od in ods], list(enc.a), list(enc.thr),
                        ptr, idx, inv_thr)
            self._scratch = lambda: (
                [0] * n_od, [0] * n_od, [0] * (n + 1), [0] * (n + 1), [0] * (n + 1),
                [0] * (n + 2), [0] * n_muni, [0.0] * (n + 1), [0] * (n + 1), [0.0] * n_muni,
                [0] * (n + 1), [0, 0],
            )

    def solve(self, caps: Sequence[int], upper_bound=None) -> SubproblemResult:
        """Exact optimum under ``caps``; ``upper_bound`` (a known valid bound) allows early stop."""
        n, cost, u, upg, owner = self._static
        bonus, lo, hi, a, thr, ptr, idx, inv_thr = self._od
        upper = self.total_value
        if upper_bound is not None:
            upper = min(upper, math.floor(Fraction(upper_bound) * self.value_scale))
        scratch = self._scratch()
        best_sel, stats = scratch[-2], scratch[-1]
        if self.jit:
            caps_arr = np.asarray([int(c) for c in caps], dtype=np.int64)
            best = _bb_kernel.search_jit(
                n, cost, u, upg, owner, caps_arr, bonus, lo, hi, a, thr, ptr, idx, inv_thr,
                self.z, np.int64(upper), np.int64(self.config.node_limit), self.config.lp_bound,
                *scratch[:-2], best_sel, stats)
        else:
            best = _bb_kernel.search(
                n, cost, u, upg, owner, [int(c) for c in caps], bonus, lo, hi, a, thr, ptr, idx,
                inv_thr, self.z, upper, self.config.node_limit, self.config.lp_bound,
                *scratch[:-2], best_sel, stats)
        mask = sum(1 << e for e in range(n) if best_sel[e])
        nodes = int(stats[0])
        if int(stats[1]) != 0:
            raise SolverLimitExceeded(
                f"branch and bound exceeded {self.config.node_limit} nodes",
                incumbent=UpgradeSet(mask) if best >= 0 else None,
                incumbent_value=Fraction(int(best), self.value_scale) if best >= 0 else None,
                bound=Fraction(int(upper), self.value_scale),
                nodes=nodes,
            )
        return SubproblemResult(UpgradeSet(mask), Fraction(int(best), self.value_scale),
                                SolverKind.BRANCH_BOUND, nodes)


def solve_branch_bound(instance: Instance, kind, caps: Sequence[int], z=None,
                       config: SolverConfig | None = None) -> SubproblemResult:
    return BranchBound(instance, kind, z, config).solve(caps)


def linear_relaxation_bound(instance: Instance, caps: Sequence[int]):
    """Upper bound on the threshold-response optimum under ``caps``.

    Uses ``a*[L <= s] <= a*s/L``: the linear DP with weights
    ``u_e * sum(a_d / L_d)`` and no component cap.  Returns ``math.inf`` when
    some threshold is zero.
    """
    if any(d.threshold == 0 for d in instance.od_pairs):
        return math.inf
    weights = [Fraction(0)] * instance.n_segments
    for d in instance.od_pairs:
        share = Fraction(d.potential) / d.threshold
        for i in d.path:
            weights[i - 1] += share
    weights = [w * s.improvement for w, s in zip(weights, instance.segments)]
    return solve_linear_dp(instance, weights, caps, UNBOUNDED).objective


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------

@dataclass
class SolverContext:
    """Per-(instance, response, component cap) solver with its precomputed tables."""

    instance: Instance
    kind: ResponseKind
    z: object = None
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        self.kind = ResponseKind.parse(self.kind)
        self.z_eff = effective_component_cap(self.instance, self.z)
        self._impl = None
        self.solver_kind = None

    def _build(self):
        inst, cfg = self.instance, self.config
        if self.kind is ResponseKind.LINEAR:
            self.weights = effective_weights(inst)
            if cfg.use_prefix_fast_path and prefix_applies(inst, self.z) and \
                    all(s.upgradable for s in inst.segments):
                self.solver_kind = SolverKind.PREFIX_FAST_PATH
                self._impl = lambda caps, ub: solve_prefix(inst, self.weights, caps[0])
            else:
                dp = LinearDP(inst, self.weights, self.z_eff)
                self.solver_kind = SolverKind.LINEAR_DP
                self._impl = lambda caps, ub: solve_linear_dp(inst, self.weights, caps, dp=dp)
            return
        if (cfg.use_interval_enum and self.z_eff <= cfg.max_enum_components
                and inst.stations <= cfg.max_enum_stations):
            try:
                enum_ = IntervalEnumeration(inst, self.kind, self.z_eff, cfg.enumeration_cap)
            except EnumerationCapExceeded as exc:
                log.debug("falling back to branch and bound: %s", exc)
            else:
                self.solver_kind = SolverKind.INTERVAL_ENUM
                self._impl = lambda caps, ub: enum_.solve(caps)
                return
        bb = BranchBound(inst, self.kind, self.z_eff, cfg)
        self.solver_kind = SolverKind.BRANCH_BOUND
        self._impl = bb.solve

    def solve(self, budget, upper_bound=None) -> SubproblemResult:
        if self._impl is None:
            self._build()
        budget = as_fraction(budget)
        if budget < 0:
            raise ValueError(f"budget must be nonnegative, got {budget}")
        return self._impl(municipality_caps(self.instance, budget), upper_bound)


def solve_single_objective(instance: Instance, kind, budget, z=None,
                           config: SolverConfig | None = None) -> SubproblemResult:
    """Provably optimal upgrade set at ``budget`` (component cap from the instance unless given)."""
    return SolverContext(instance, kind, z, config or SolverConfig()).solve(budget)
