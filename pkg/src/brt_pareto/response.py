"""Passenger responses: how many new passengers an upgrade set attracts."""

from __future__ import annotations

import enum
from fractions import Fraction

from .model import Instance, UpgradeSet


class ResponseKind(enum.Enum):
    LINEAR = "linear"
    MINIMPROV = "minimprov"

    @classmethod
    def parse(cls, value) -> "ResponseKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown response {value!r}; expected 'linear' or 'minimprov'") from None


def effective_weights(instance: Instance) -> list[Fraction]:
    """Per-segment passenger gain under the linear response.

    ``w[e] = u_e * sum(a_d / U_d for d whose path contains e)`` where ``U_d`` is
    the total improvement along the path of ``d``.  Non-upgradable segments still
    get their weight (they count in ``U_d``) even though they can never be picked.
    """
    weights = [Fraction(0)] * instance.n_segments
    for d, path_sum in zip(instance.od_pairs, instance.path_improvement):
        share = Fraction(d.potential) / path_sum
        for i in d.path:
            weights[i - 1] += share
    return [w * s.improvement for w, s in zip(weights, instance.segments)]


def _improvement_on_path(instance: Instance, f: UpgradeSet, path: range) -> Fraction:
    return sum((instance.segment(i).improvement for i in path if i in f), Fraction(0))


def attracted_per_od(instance: Instance, f: UpgradeSet, kind) -> list[Fraction]:
    kind = ResponseKind.parse(kind)
    out = []
    for d, path_sum in zip(instance.od_pairs, instance.path_improvement):
        achieved = _improvement_on_path(instance, f, d.path)
        if kind is ResponseKind.LINEAR:
            out.append(achieved / path_sum * d.potential)
        else:
            out.append(Fraction(d.potential) if d.threshold <= achieved else Fraction(0))
    return out


def attracted(instance: Instance, f: UpgradeSet, kind) -> Fraction:
    """Total number of newly attracted passengers ``p(F)``, exact."""
    return sum(attracted_per_od(instance, f, kind), Fraction(0))
