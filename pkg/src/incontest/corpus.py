"""Deterministic desk-scale corpora and instance generators."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from itertools import permutations, product
from typing import Iterator

from .model import Problem, validate_problem
from .priority_sets import is_high_priority_set

FIXTURE_NAMES = ("t1", "t2", "t3", "t4")


def fixture(name: str) -> Problem:
    """Load one of the bundled example instances (``t1`` .. ``t4``)."""
    text = resources.files("incontest").joinpath("fixtures", f"{name}.json").read_text("utf-8")
    return validate_problem(json.loads(text))


def fixture_assignment(name: str) -> dict:
    text = resources.files("incontest").joinpath("fixtures", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def _ids(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{k}" for k in range(1, n + 1)]


def frame(priorities: dict, capacities: dict) -> Problem:
    """A problem with empty preference lists; only priorities and capacities matter."""
    schools = list(capacities)
    students = list(next(iter(priorities.values())))
    return Problem(tuple(students), tuple(schools), {i: () for i in students}, priorities, capacities)


def all_lists(schools) -> list[tuple]:
    out = []
    for k in range(len(schools) + 1):
        out.extend(permutations(schools, k))
    return out


def priority_profiles(students, schools) -> list[dict]:
    """Every priority profile, in ``itertools.product`` order."""
    orders = list(permutations(students))
    return [dict(zip(schools, combo)) for combo in product(orders, repeat=len(schools))]


def small_frames(n_students: int = 3, n_schools: int = 2, count: int = 12) -> list[Problem]:
    """``count`` unit-capacity frames spread evenly over all priority profiles."""
    students, schools = _ids("i", n_students), _ids("s", n_schools)
    profiles = priority_profiles(students, schools)
    step = max(1, len(profiles) // count)
    chosen = profiles[::step][:count]
    caps = {s: 1 for s in schools}
    return [frame(pr, caps) for pr in chosen]


def all_profiles(fr: Problem) -> Iterator[Problem]:
    """Every preference profile on a frame (unbounded lists)."""
    lists = all_lists(fr.schools)
    for combo in product(lists, repeat=len(fr.students)):
        yield fr.with_prefs(dict(zip(fr.students, combo)))


def exhaustive_corpus(n_students: int = 3, n_schools: int = 2, count: int = 12) -> list[Problem]:
    """All preference profiles over ``count`` fixed priority profiles."""
    return [p for fr in small_frames(n_students, n_schools, count) for p in all_profiles(fr)]


def random_frame(rng: random.Random, n_students: int, n_schools: int, max_cap: int = 2) -> Problem:
    students, schools = _ids("i", n_students), _ids("s", n_schools)
    prio = {}
    for s in schools:
        order = list(students)
        rng.shuffle(order)
        prio[s] = tuple(order)
    caps = {s: rng.randint(1, max_cap) for s in schools}
    return frame(prio, caps)


def random_problem(rng: random.Random, n_students: int, n_schools: int, max_cap: int = 2) -> Problem:
    fr = random_frame(rng, n_students, n_schools, max_cap)
    prefs = {}
    for i in fr.students:
        k = rng.randint(0, n_schools)
        prefs[i] = tuple(rng.sample(list(fr.schools), k))
    return fr.with_prefs(prefs)


def sweep_frames(seed: int = 2024) -> list[Problem]:
    """Frames with at most four students and three schools used for outcome-set sweeps."""
    frames = [fixture(n) for n in FIXTURE_NAMES]
    frames += small_frames(3, 2, 4)
    rng = random.Random(seed)
    for n, m in ((3, 3), (3, 3), (4, 3), (4, 3), (4, 2), (4, 3)):
        frames.append(random_frame(rng, n, m, 2))
    return frames


def enumerated_frames(seed: int = 7) -> list[Problem]:
    """Two three-by-three frames whose full preference spaces join the audit corpus."""
    rng = random.Random(seed)
    return [random_frame(rng, 3, 3, 1), random_frame(rng, 3, 3, 2)]


def audit_corpus() -> list[Problem]:
    """Problems swept by the mechanism audits."""
    out = exhaustive_corpus(3, 2, 12)
    for fr in enumerated_frames():
        out.extend(all_profiles(fr))
    out.extend(fixture(n) for n in FIXTURE_NAMES)
    return out


@dataclass(frozen=True)
class ExclusionQuery:
    frame: Problem
    student: str
    pref: tuple
    schools: tuple


def exclusion_queries(count: int = 50, seed: int = 11) -> list[ExclusionQuery]:
    """Seeded (frame, student, list, school set) queries whose school set is not high-priority."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(3, 5)
        m = rng.randint(2, 3)
        fr = random_frame(rng, n, m, 2)
        i = rng.choice(fr.students)
        k = rng.randint(1, m)
        target = tuple(sorted(rng.sample(list(fr.schools), k)))
        if is_high_priority_set(fr.priorities, fr.capacities, i, target):
            continue
        pref = tuple(rng.sample(list(fr.schools), rng.randint(0, m)))
        out.append(ExclusionQuery(fr, i, pref, target))
    return out


def strictness_witness(k: int) -> tuple[Problem, str]:
    """``k`` unit schools sharing one priority order; the last-ranked student lists them all.

    Any ``k`` schools form a high-priority set for her, no ``k - 1`` of them do.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    students, schools = _ids("i", k), _ids("s", k)
    prio = {s: tuple(students) for s in schools}
    prefs = {i: tuple(schools) for i in students}
    return Problem(tuple(students), tuple(schools), prefs, prio, {s: 1 for s in schools}), students[-1]


def generate_instance(n_students: int, n_schools: int, seed: int, max_cap: int = 2) -> Problem:
    """Seeded random instance: uniform priorities, random-length preference lists."""
    return random_problem(random.Random(seed), n_students, n_schools, max_cap)


__all__ = [
    "ExclusionQuery",
    "all_lists",
    "all_profiles",
    "audit_corpus",
    "enumerated_frames",
    "exclusion_queries",
    "exhaustive_corpus",
    "fixture",
    "frame",
    "generate_instance",
    "priority_profiles",
    "random_frame",
    "random_problem",
    "small_frames",
    "strictness_witness",
    "sweep_frames",
]
