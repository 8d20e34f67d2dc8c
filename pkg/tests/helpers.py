"""Random small instances for oracle comparisons."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from brt_pareto.generator import SplitMix64
from brt_pareto.model import UNBOUNDED, Instance, Municipality, ODPair, Segment


def _blocks(rng: SplitMix64, n_segments: int, count: int) -> list[tuple[int, int]]:
    cuts = sorted(rng.sample(list(range(1, n_segments)), count - 1))
    bounds = [0, *cuts, n_segments]
    return [(bounds[k] + 1, bounds[k + 1]) for k in range(count)]


def random_instance(seed: int, n_segments: int, municipalities: int = 1, z=UNBOUNDED,
                    max_cost: int = 5, od_count: int | None = None,
                    frozen_prob: int = 0) -> Instance:
    """Seeded instance with random costs, improvements, shares, OD pairs and thresholds.

    ``frozen_prob`` is the percentage chance that a segment is not upgradable.
    """
    rng = SplitMix64(seed)
    n = n_segments + 1
    segments = []
    for i in range(1, n):
        improvement = Fraction(rng.randint(1, 8), rng.randint(1, 2))
        upgradable = rng.randint(1, 100) > frozen_prob
        segments.append(Segment(i, rng.randint(1, max_cost), improvement, upgradable))
    weights = [rng.randint(1, 4) for _ in range(municipalities)]
    munis = [
        Municipality(f"m{k + 1}", s, t, Fraction(w, sum(weights)))
        for k, ((s, t), w) in enumerate(zip(_blocks(rng, n_segments, municipalities), weights))
    ]
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    count = od_count if od_count is not None else rng.randint(1, min(len(pairs), 2 * n))
    ods = []
    for i, j in sorted(rng.sample(pairs, min(count, len(pairs)))):
        path = sum((segments[e - 1].improvement for e in range(i, j)), Fraction(0))
        # random threshold in [0, path], kept exact
        threshold = path * Fraction(rng.randint(0, 4), 4)
        ods.append(ODPair(i, j, rng.randint(1, 20), threshold))
    return Instance(n, segments, munis, ods, z)


@st.composite
def small_instances(draw, min_segments: int = 1, max_segments: int = 8,
                    municipalities=(1, 2, 3), caps=(1, 2, 3, UNBOUNDED), frozen_prob: int = 0):
    n_segments = draw(st.integers(min_segments, max_segments))
    count = draw(st.sampled_from([m for m in municipalities if m <= n_segments] or [1]))
    z = draw(st.sampled_from(caps))
    seed = draw(st.integers(0, 2**64 - 1))
    return random_instance(seed, n_segments, count, z, frozen_prob=frozen_prob)


#: lines printed by the acceptance module, echoed in the pytest terminal summary
ACCEPTANCE_LINES: list[str] = []
