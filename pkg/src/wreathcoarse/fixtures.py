"""Deterministic finite metric space fixtures."""

from __future__ import annotations

import random
from typing import Mapping

from .group import parse_group
from .metric import (
    FiniteMetricSpace,
    ball_space,
    grid_space,
    interval_space,
    random_metric_space,
    weighted_direct_sum_space,
)

KINDS = ("grid", "interval", "ball", "weighted-sum", "random-metric")
GENERATOR_NAME = "python-random-mt19937"


def generate_fixture(kind: str, params: Mapping, seed: int = 0) -> FiniteMetricSpace:
    """Build one fixture space.

    ``grid``: ``sizes`` (list of ints); ``interval``: ``lo``, ``hi``;
    ``ball``: ``group``, ``radius``; ``weighted-sum``: ``max_index``,
    ``bound``; ``random-metric``: ``n``.  Only ``random-metric`` consumes
    the seed; every kind is deterministic.
    """
    if kind == "grid":
        sizes = [int(s) for s in params.get("sizes", [5, 5])]
        return grid_space(*sizes)
    if kind == "interval":
        return interval_space(int(params.get("lo", 0)), int(params["hi"]))
    if kind == "ball":
        return ball_space(parse_group(params.get("group", "zwz")), int(params["radius"]),
                          params.get("max_size"))
    if kind == "weighted-sum":
        return weighted_direct_sum_space(int(params["max_index"]), int(params["bound"]))
    if kind == "random-metric":
        return random_metric_space(int(params["n"]), random.Random(seed))
    raise ValueError(f"unknown fixture kind {kind!r}; choose from {', '.join(KINDS)}")
