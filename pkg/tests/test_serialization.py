from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given

from brt_pareto.generator import ScenarioSpec, generate
from brt_pareto.model import UpgradeSet
from brt_pareto.pareto import ParetoFront, ParetoPoint, enumerate_pareto
from brt_pareto.serialization import (
    CSV_HEADER,
    InstanceFormatError,
    dumps_instance,
    format_mask,
    front_from_csv,
    front_to_csv,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    parse_mask,
    save_instance,
    trace_to_dict,
)
from brt_pareto.worked_examples import five_station_line, two_segment_line
from helpers import small_instances


def test_example_files_match_constructors(data_dir):
    assert load_instance(data_dir / "example1.json") == five_station_line()
    assert load_instance(data_dir / "example2.json") == two_segment_line()


@given(small_instances(frozen_prob=20))
def test_instance_round_trip(inst):
    back = instance_from_dict(json.loads(dumps_instance(inst)))
    assert back == inst


def test_shares_written_as_rational_strings():
    data = instance_to_dict(two_segment_line())
    assert [m["share"] for m in data["municipalities"]] == ["2/3", "1/3"]
    assert data["componentCap"] == "inf"


def test_meta_survives_file_round_trip(tmp_path):
    inst = generate(ScenarioSpec(stations=6, demand_pattern="hubs", seed=5))
    path = save_instance(inst, tmp_path / "i.json")
    assert load_instance(path).meta == json.loads(json.dumps(inst.meta))


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("segments"),
    lambda d: d["municipalities"][0].update(share=0.5),
    lambda d: d["odPairs"][0].update(threshold="x/y"),
    lambda d: d.update(componentCap=0),
])
def test_malformed_instances_raise(mutate):
    data = instance_to_dict(five_station_line())
    mutate(data)
    with pytest.raises(InstanceFormatError):
        instance_from_dict(data)


def test_masks_switch_to_hex_for_long_lines():
    assert format_mask(5, 10) == "5"
    assert format_mask(2**70, 80) == hex(2**70)
    assert parse_mask(format_mask(2**70, 80)) == 2**70


@given(small_instances())
def test_csv_round_trip(inst):
    for kind in ("linear", "minimprov"):
        front = enumerate_pareto(inst, kind).front
        text = front_to_csv(inst, front)
        assert text.splitlines()[0] == ",".join(CSV_HEADER)
        back = front_from_csv(text)
        assert back == front
        assert [p.witness for p in back] == [p.witness for p in front]


def test_csv_keeps_rationals_exact():
    inst = two_segment_line()
    front = ParetoFront([ParetoPoint(Fraction(7, 3), Fraction(9, 2), UpgradeSet.of([1])),
                         ParetoPoint(Fraction(0), Fraction(0))])
    rows = front_to_csv(inst, front).splitlines()
    assert rows[1] == "9,2,7,3,2,1,1"
    assert front_from_csv("\n".join(rows)) == front


def test_csv_header_checked():
    with pytest.raises(ValueError):
        front_from_csv("a,b\n1,2\n")


def test_trace_json_mirror():
    inst = five_station_line()
    trace = enumerate_pareto(inst, "minimprov")
    doc = trace_to_dict(inst, trace, "minimprov", inst.component_cap)
    assert doc["incomplete"] is False
    assert [(p["passengers"], p["budget"]) for p in doc["front"]] == \
        [(int(p), int(v)) for p, v in trace.front.values()]
    json.dumps(doc)
