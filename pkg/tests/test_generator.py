from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brt_pareto.generator import (
    CostPattern,
    ScenarioError,
    ScenarioSpec,
    SplitMix64,
    cost_profile,
    generate,
    generate_intractable,
    generate_prefix_special,
    municipality_blocks,
)
from brt_pareto.model import UNBOUNDED, validate_instance
from brt_pareto.oracle import brute_force_front
from brt_pareto.pareto import enumerate_pareto
from brt_pareto.response import effective_weights
from brt_pareto.serialization import dumps_instance

specs = st.builds(
    ScenarioSpec,
    stations=st.integers(3, 30),
    cost_pattern=st.sampled_from(["unit", "middle", "ends"]),
    demand_pattern=st.sampled_from(["even", "hubs", "termini"]),
    budget_split=st.sampled_from(["equal", "cost", "pass"]),
    municipalities=st.just(1) | st.just(2),
    component_cap=st.sampled_from([1, 2, 3, UNBOUNDED]),
    seed=st.integers(0, 2**64 - 1),
)


def test_splitmix_reference_outputs():
    rng = SplitMix64(1234567)
    assert [rng.next() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821,
    ]
    assert SplitMix64(0).next() == 0xE220A8397B1DCDAF


def test_randint_stays_in_range():
    rng = SplitMix64(5)
    draws = [rng.randint(1, 10) for _ in range(2000)]
    assert set(draws) == set(range(1, 11))


def test_unit_even_equal():
    inst = generate(ScenarioSpec(stations=25, seed=3))
    assert all(s.cost == 1 for s in inst.segments)
    assert {d.potential for d in inst.od_pairs} == {10}
    assert len(inst.od_pairs) == 25 * 24 // 2
    assert [m.share for m in inst.municipalities] == [Fraction(1, 5)] * 5


def test_threshold_is_floor_of_fraction():
    inst = generate(ScenarioSpec(stations=25, seed=3))
    for d, total in zip(inst.od_pairs, inst.path_improvement):
        assert d.threshold == (3 * total) // 4
    # a path with total improvement 20 gets threshold 15
    hits = [d for d, t in zip(inst.od_pairs, inst.path_improvement) if t == 20]
    assert hits and all(d.threshold == 15 for d in hits)


def test_same_seed_same_bytes():
    spec = ScenarioSpec(cost_pattern="middle", demand_pattern="hubs", budget_split="pass", seed=99)
    assert dumps_instance(generate(spec)) == dumps_instance(generate(spec))
    other = ScenarioSpec(cost_pattern="middle", demand_pattern="hubs", budget_split="pass", seed=100)
    assert dumps_instance(generate(spec)) != dumps_instance(generate(other))


def test_improvements_shared_across_patterns():
    a = generate(ScenarioSpec(cost_pattern="unit", demand_pattern="even", seed=4))
    b = generate(ScenarioSpec(cost_pattern="ends", demand_pattern="hubs", municipalities=1, seed=4))
    assert [s.improvement for s in a.segments] == [s.improvement for s in b.segments]


@pytest.mark.parametrize("pattern", [CostPattern.MIDDLE, CostPattern.ENDS])
@pytest.mark.parametrize("n", [1, 2, 5, 24, 25])
def test_cost_profiles_symmetric_integer(pattern, n):
    costs = cost_profile(pattern, n)
    assert costs == costs[::-1]
    assert all(isinstance(c, int) and 1 <= c <= 10 for c in costs)
    if n >= 3:
        mid, end = costs[n // 2], costs[0]
        assert (mid > end) if pattern is CostPattern.MIDDLE else (end > mid)


def test_municipality_blocks_default_sizes():
    blocks = municipality_blocks(24, 5)
    assert [t - s + 1 for s, t in blocks] == [5, 5, 4, 5, 5]
    assert blocks[0][0] == 1 and blocks[-1][1] == 24


def test_cost_split_is_exact():
    inst = generate(ScenarioSpec(cost_pattern="middle", budget_split="cost", seed=1))
    total = sum(s.cost for s in inst.segments)
    for m in inst.municipalities:
        assert m.share == Fraction(sum(inst.segment(i).cost for i in m.segments), total)


def test_pass_split_is_exact():
    inst = generate(ScenarioSpec(demand_pattern="hubs", budget_split="pass", seed=1))
    n = inst.stations
    flow = [0] * (n + 1)
    for d in inst.od_pairs:
        flow[d.origin] += d.potential
        flow[d.destination] += d.potential
    per = []
    for m in inst.municipalities:
        acc = Fraction(0)
        for s in range(1, n + 1):
            incident = [e for e in (s - 1, s) if 1 <= e <= n - 1]
            acc += sum(Fraction(flow[s], len(incident)) for e in incident if e in m.segments)
        per.append(acc)
    assert [m.share for m in inst.municipalities] == [p / sum(per) for p in per]


def test_termini_end_to_end_share():
    inst = generate(ScenarioSpec(demand_pattern="termini", seed=0))
    end = next(d for d in inst.od_pairs if (d.origin, d.destination) == (1, 25))
    assert abs(Fraction(end.potential, inst.total_potential) - Fraction(14, 100)) < Fraction(1, 1000)


def _mean_path(inst):
    return Fraction(sum(d.potential * (d.destination - d.origin) for d in inst.od_pairs), inst.total_potential)


@pytest.mark.parametrize("seed", range(5))
def test_hubs_have_shorter_trips_than_termini(seed):
    hubs = generate(ScenarioSpec(demand_pattern="hubs", seed=seed))
    termini = generate(ScenarioSpec(demand_pattern="termini", seed=seed))
    assert _mean_path(hubs) < _mean_path(termini)


def test_hubs_meta_records_constants():
    meta = generate(ScenarioSpec(demand_pattern="hubs", seed=2)).meta
    assert len(meta["hubs"]) == 3 and "gravityScale" in meta and meta["seed"] == 2


@given(specs)
def test_generated_instances_validate(spec):
    assert validate_instance(generate(spec)) == []


@pytest.mark.parametrize("kwargs, fragment", [
    ({"threshold_fraction": 0}, "threshold_fraction"),
    ({"threshold_fraction": Fraction(5, 4)}, "threshold_fraction"),
    ({"stations": 5, "municipalities": 5}, "municipalities"),
    ({"cost_pattern": "steep"}, "cost_pattern"),
    ({"seed": -1}, "seed"),
    ({"component_cap": 0}, "component_cap"),
])
def test_invalid_specs_rejected(kwargs, fragment):
    with pytest.raises(ScenarioError, match=fragment):
        ScenarioSpec(**kwargs)


def test_intractable_three_stations():
    inst = generate_intractable(3)
    assert [s.cost for s in inst.segments] == [1, 2]
    assert [d.potential for d in inst.od_pairs] == [1, 2]
    assert inst.component_cap == UNBOUNDED and len(inst.municipalities) == 1


def test_intractable_two_stations():
    assert enumerate_pareto(generate_intractable(2), "linear").front.values() == [(1, 1), (0, 0)]


def test_intractable_six_stations():
    inst = generate_intractable(6)
    assert len(enumerate_pareto(inst, "minimprov").front) == 32
    assert enumerate_pareto(inst, "linear").front == brute_force_front(inst, "linear")


def test_intractable_overflow_guard():
    generate_intractable(63)
    with pytest.raises(OverflowError):
        generate_intractable(64)
    with pytest.raises(ValueError):
        generate_intractable(1)


def _unimodal(xs):
    peak = xs.index(max(xs))
    return all(a <= b for a, b in zip(xs[:peak], xs[1:peak + 1])) and \
        all(a >= b for a, b in zip(xs[peak:], xs[peak + 1:]))


def test_prefix_special_unimodal_weights():
    inst = generate_prefix_special(5, "unimodal-weights")
    w = effective_weights(inst)
    assert _unimodal(w)
    assert w.index(max(w)) in (1, 2)
    assert all(s.cost == 1 for s in inst.segments)


def test_prefix_special_unimodal_costs():
    inst = generate_prefix_special(5, "unimodal-costs")
    assert set(effective_weights(inst)) == {1}
    costs = [s.cost for s in inst.segments]
    assert _unimodal([-c for c in costs]) and costs == costs[::-1]


def test_prefix_special_minimal_and_errors():
    for variant in ("unimodal-weights", "unimodal-costs"):
        assert validate_instance(generate_prefix_special(3, variant)) == []
    with pytest.raises(ValueError):
        generate_prefix_special(2, "unimodal-weights")
    with pytest.raises(ValueError):
        generate_prefix_special(5, "bimodal")
