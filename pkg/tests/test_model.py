from __future__ import annotations

import warnings
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brt_pareto.model import (
    UNBOUNDED,
    Instance,
    Municipality,
    ODPair,
    Segment,
    UpgradeSet,
    as_fraction,
    check_upgrade_set,
    count_components,
    effective_component_cap,
    investment_cost,
    min_investment_budget,
    municipality_caps,
    normalize_cap,
    spend_per_municipality,
    validate_instance,
)
from brt_pareto.worked_examples import five_station_line, two_segment_line
from helpers import small_instances

E23 = UpgradeSet.of([2, 3])


def test_worked_examples_are_valid():
    assert validate_instance(five_station_line()) == []
    assert validate_instance(two_segment_line()) == []


def test_investment_cost_and_components_example():
    inst = five_station_line()
    assert investment_cost(inst, E23) == 16
    assert count_components(inst, E23) == 1
    assert spend_per_municipality(inst, E23) == [12, 4]
    assert min_investment_budget(inst, E23) == 24


def test_min_budget_single_municipality_equals_cost():
    inst = five_station_line(shares=(Fraction(1),))
    assert min_investment_budget(inst, E23) == 16


def test_two_segment_example_budget_exceeds_cost():
    inst = two_segment_line()
    both = UpgradeSet.of([1, 2])
    assert investment_cost(inst, both) == 3
    assert min_investment_budget(inst, both) == 3
    assert min_investment_budget(inst, UpgradeSet.of([1])) == 3
    assert min_investment_budget(inst, UpgradeSet.of([2])) == 3


def test_empty_set():
    inst = five_station_line()
    assert investment_cost(inst, UpgradeSet()) == 0
    assert count_components(inst, UpgradeSet()) == 0
    assert min_investment_budget(inst, UpgradeSet()) == 0


def test_components_of_alternating_set():
    inst = five_station_line()
    assert count_components(inst, UpgradeSet.of([1, 3])) == 2
    assert count_components(inst, UpgradeSet.of([1, 2, 3, 4])) == 1


@given(st.integers(0, 2**30 - 1))
def test_count_components_matches_run_scan(mask):
    bits = [(mask >> i) & 1 for i in range(30)]
    runs = sum(1 for i, b in enumerate(bits) if b and (i == 0 or not bits[i - 1]))
    assert count_components(None, UpgradeSet(mask)) == runs


def test_upgrade_set_protocol():
    f = UpgradeSet.of([4, 1, 2])
    assert list(f) == [1, 2, 4]
    assert 2 in f and 3 not in f
    assert len(f) == 3
    assert f.segments() == (1, 2, 4)
    with pytest.raises(ValueError):
        UpgradeSet.of([0])


def test_as_fraction_rejects_floats_and_bools():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(2) == 2
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_shares_must_sum_to_one():
    inst = five_station_line(shares=(Fraction(1, 2), Fraction(1, 3)))
    problems = validate_instance(inst)
    assert any("5/6" in p and "≠ 1" in p for p in problems)


def test_threshold_above_path_improvement_rejected():
    inst = five_station_line()
    bad = replace(inst.od_pairs[1], threshold=Fraction(21))
    inst = Instance(inst.stations, inst.segments, inst.municipalities,
                    (inst.od_pairs[0], bad, inst.od_pairs[2]))
    problems = validate_instance(inst)
    assert any("threshold exceeds path improvement" in p and "21 > 20" in p for p in problems)


def test_unreachable_threshold_warns():
    inst = five_station_line()
    segs = list(inst.segments)
    segs[2] = replace(segs[2], upgradable=False)
    inst = Instance(inst.stations, segs, inst.municipalities, inst.od_pairs)
    with pytest.warns(UserWarning, match="unreachable"):
        assert validate_instance(inst) == []


def test_structural_errors_are_listed():
    inst = Instance(
        3,
        [Segment(1, 0, Fraction(1)), Segment(2, 1, Fraction(0))],
        [Municipality("a", 1, 1, Fraction(1))],
        [ODPair(1, 1, 5), ODPair(1, 4, 2)],
        component_cap=0,
    )
    problems = " | ".join(validate_instance(inst))
    for fragment in ("cost must be an integer", "improvement must be a positive",
                     "not covered", "origin equals destination", "outside", "componentCap"):
        assert fragment in problems


def test_check_upgrade_set_rejects_frozen_segments():
    inst = five_station_line()
    segs = list(inst.segments)
    segs[0] = replace(segs[0], upgradable=False)
    inst = Instance(inst.stations, segs, inst.municipalities, inst.od_pairs)
    with pytest.raises(ValueError):
        check_upgrade_set(inst, UpgradeSet.of([1, 2]))
    check_upgrade_set(inst, UpgradeSet.of([2]))


def test_normalize_cap():
    assert normalize_cap("inf") == UNBOUNDED
    assert normalize_cap(None) == UNBOUNDED
    assert normalize_cap("3") == 3
    with pytest.raises(ValueError):
        normalize_cap(0)


def test_effective_component_cap():
    inst = five_station_line()
    assert effective_component_cap(inst) == 2
    assert effective_component_cap(inst, 1) == 1
    assert effective_component_cap(inst, 7) == 2


def test_caps_are_floor_of_share_times_budget():
    inst = two_segment_line()
    assert municipality_caps(inst, 3) == [2, 1]
    assert municipality_caps(inst, Fraction(5, 2)) == [1, 0]


@given(small_instances(frozen_prob=0), st.integers(0, 2**10 - 1))
def test_min_budget_is_tight(inst, raw):
    f = UpgradeSet(raw & inst.upgradable_mask)
    v = min_investment_budget(inst, f)
    spend = spend_per_municipality(inst, f)
    assert all(s <= m.share * v for s, m in zip(spend, inst.municipalities))
    if f.mask:
        # some municipality is exactly at its share
        assert any(s == m.share * v for s, m in zip(spend, inst.municipalities))
    # shares sum to one, so the largest spend/share ratio dominates the total spend
    assert v >= investment_cost(inst, f)
    if len(inst.municipalities) == 1:
        assert v == investment_cost(inst, f)


@given(small_instances())
def test_generated_helpers_are_valid(inst):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert validate_instance(inst) == []
