from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

import brt_pareto
from brt_pareto import cli, pareto, reporting

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

#: (front size, bound, unit-cost single-municipality station count or None) for every front
FRONT_LOG: list[tuple[int, int, int | None]] = []

_enumerate = pareto.enumerate_pareto


def _checked_enumerate(instance, *args, **kwargs):
    """Every front computed anywhere in the suite must respect the size bounds."""
    trace = _enumerate(instance, *args, **kwargs)
    bound = pareto.front_size_bound(instance)
    unit_single = None
    if len(instance.municipalities) == 1 and all(s.cost == 1 for s in instance.segments):
        unit_single = instance.stations
    FRONT_LOG.append((len(trace.front), bound, unit_single))
    assert len(trace.front) <= bound, f"front of {len(trace.front)} points exceeds bound {bound}"
    if unit_single is not None:
        assert len(trace.front) <= unit_single
    return trace


for module in (pareto, brt_pareto, reporting, cli):
    module.enumerate_pareto = _checked_enumerate


@pytest.fixture
def data_dir() -> Path:
    return Path(__file__).resolve().parents[1] / "data"


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
