"""Problem assignment for course events.

Pure function of (event, students, pool, strategy, seed): re-running with the
same inputs always yields the same map, regardless of set iteration order or
interpreter hash seed.
"""
from __future__ import annotations

import random
from enum import Enum
from typing import Iterable, Optional

from ..common.util import seeded_int
from .records import CourseEvent, Problem


class AssignStrategy(str, Enum):
    SAME_FOR_ALL = "SAME_FOR_ALL"
    RANDOM_K = "RANDOM_K"
    ONE_PER_CATEGORY = "ONE_PER_CATEGORY"


class AssignError(ValueError):
    pass


def assign_problems(
    event: CourseEvent,
    students: Iterable[str],
    pool: list[Problem],
    strategy: AssignStrategy,
    seed: int,
    k: Optional[int] = None,
) -> dict[str, list[str]]:
    if not pool:
        raise AssignError("problem pool is empty")
    roster = sorted(set(students))
    ordered = sorted(pool, key=lambda p: p.problem_id)

    if strategy == AssignStrategy.SAME_FOR_ALL:
        shared = [p.problem_id for p in ordered]
        return {s: list(shared) for s in roster}

    if strategy == AssignStrategy.RANDOM_K:
        count = 1 if k is None else k
        if count < 1:
            raise AssignError("k must be at least 1")
        if count > len(ordered):
            raise AssignError(f"pool of {len(ordered)} cannot supply {count} distinct problems")
        out: dict[str, list[str]] = {}
        for s in roster:
            rng = random.Random(seeded_int(seed, event.event_id, s))
            out[s] = sorted(p.problem_id for p in rng.sample(ordered, count))
        return out

    if strategy == AssignStrategy.ONE_PER_CATEGORY:
        by_category: dict[str, list[Problem]] = {}
        for p in ordered:
            by_category.setdefault(p.category, []).append(p)
        out = {}
        for s in roster:
            rng = random.Random(seeded_int(seed, event.event_id, s))
            picks = [rng.choice(group) for _, group in sorted(by_category.items())]
            out[s] = sorted(p.problem_id for p in picks)
        return out

    raise AssignError(f"unknown strategy {strategy!r}")
