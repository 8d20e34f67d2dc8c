"""File formats: instance JSON, front CSV and the JSON trace mirror.

Rationals are written as ``"p/q"`` strings (or plain ints) so nothing is rounded.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .model import (
    UNBOUNDED,
    Instance,
    Municipality,
    ODPair,
    Segment,
    UpgradeSet,
    as_fraction,
    count_components,
    investment_cost,
    normalize_cap,
)
from .pareto import EnumerationTrace, ParetoFront, ParetoPoint

CSV_HEADER = ["budget_num", "budget_den", "passengers_num", "passengers_den",
              "cost", "components", "witness_bitmask"]


class InstanceFormatError(ValueError):
    pass


def rational_to_json(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def instance_to_dict(instance: Instance) -> dict:
    out = {
        "stations": instance.stations,
        "segments": [
            {"cost": s.cost, "improvement": rational_to_json(s.improvement), "upgradable": s.upgradable}
            for s in instance.segments
        ],
        "municipalities": [
            {"id": m.id, "firstSegment": m.first_segment, "lastSegment": m.last_segment,
             "share": f"{m.share.numerator}/{m.share.denominator}"}
            for m in instance.municipalities
        ],
        "odPairs": [
            {"origin": d.origin, "destination": d.destination, "potential": d.potential,
             "threshold": rational_to_json(d.threshold)}
            for d in instance.od_pairs
        ],
        "componentCap": "inf" if instance.component_cap == UNBOUNDED else int(instance.component_cap),
    }
    if instance.meta:
        out["meta"] = instance.meta
    return out


def instance_from_dict(data: dict) -> Instance:
    try:
        stations = int(data["stations"])
        segments = [
            Segment(i, int(s["cost"]), as_fraction(s["improvement"]), bool(s.get("upgradable", True)))
            for i, s in enumerate(data["segments"], start=1)
        ]
        municipalities = [
            Municipality(str(m["id"]), int(m["firstSegment"]), int(m["lastSegment"]), as_fraction(m["share"]))
            for m in data["municipalities"]
        ]
        od_pairs = [
            ODPair(int(d["origin"]), int(d["destination"]), int(d["potential"]),
                   as_fraction(d.get("threshold", 0)))
            for d in data.get("odPairs", [])
        ]
        cap = normalize_cap(data.get("componentCap", "inf"))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"malformed instance: {exc!r}") from exc
    return Instance(stations, segments, municipalities, od_pairs, cap, dict(data.get("meta", {})))


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save_instance(instance: Instance, path) -> Path:
    path = Path(path)
    path.write_text(dumps_instance(instance))
    return path


def load_instance(path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def format_mask(mask: int, stations: int) -> str:
    return hex(mask) if stations > 64 else str(mask)


def parse_mask(text: str) -> int:
    text = text.strip()
    return int(text, 16) if text.lower().startswith("0x") else int(text)


def front_to_csv(instance: Instance, front: ParetoFront) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in front:
        writer.writerow([
            p.budget.numerator, p.budget.denominator,
            p.passengers.numerator, p.passengers.denominator,
            investment_cost(instance, p.witness), count_components(instance, p.witness),
            format_mask(p.witness.mask, instance.stations),
        ])
    return buf.getvalue()


def front_from_csv(text: str) -> ParetoFront:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    points = [
        ParetoPoint(
            Fraction(int(row["passengers_num"]), int(row["passengers_den"])),
            Fraction(int(row["budget_num"]), int(row["budget_den"])),
            UpgradeSet(parse_mask(row["witness_bitmask"])),
        )
        for row in reader
    ]
    return ParetoFront(points)


def trace_to_dict(instance: Instance, trace: EnumerationTrace, kind, z) -> dict:
    return {
        "response": getattr(kind, "value", str(kind)),
        "componentCap": "inf" if z == UNBOUNDED else int(z),
        "incomplete": not trace.complete,
        "seconds": trace.seconds,
        "front": [
            {"passengers": rational_to_json(p.passengers), "budget": rational_to_json(p.budget),
             "cost": investment_cost(instance, p.witness),
             "components": count_components(instance, p.witness),
             "witness": list(p.witness)}
            for p in trace.front
        ],
        "iterations": [
            {"budget": rational_to_json(it.budget), "objective": rational_to_json(it.objective),
             "minBudget": rational_to_json(it.min_budget), "tight": sorted(it.tight),
             "step": rational_to_json(it.step), "solver": it.solver, "nodes": it.nodes,
             "seconds": it.seconds}
            for it in trace.iterations
        ],
    }
