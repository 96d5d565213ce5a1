"""High-priority and top-priority sets, and the incontestability audit built on them.

A school set is *high-priority* for a student when its seats cannot all be
filled using, at each school, only students ranked above her there.  The
check is a seat-expanded bipartite matching: if the maximum matching leaves a
seat empty, Hall's condition fails and the set is high-priority.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import EmptySet, IsHighPrioritySet, UnknownId
from .model import SELF, Assignment, Problem, check_assignment, id_key
from .properties import unacceptable_seats, wasteful_witnesses


def _max_matching(adj: Sequence[Sequence[int]]) -> int:
    """Kuhn's augmenting-path matching; ``adj[v]`` lists right vertices of left vertex ``v``."""
    owner: dict[int, int] = {}

    def augment(v: int, seen: set) -> bool:
        for w in adj[v]:
            if w in seen:
                continue
            seen.add(w)
            if w not in owner or augment(owner[w], seen):
                owner[w] = v
                return True
        return False

    return sum(1 for v in range(len(adj)) if augment(v, set()))


def _contours(priorities: Mapping[str, Sequence[str]], i: str, schools: Iterable[str]):
    out = {}
    for s in schools:
        if s not in priorities:
            raise UnknownId(f"unknown school {s!r}")
        order = priorities[s]
        if i not in order:
            raise UnknownId(f"unknown student {i!r}")
        out[s] = order[: list(order).index(i)]
    return out


def is_high_priority_set(
    priorities: Mapping[str, Sequence[str]],
    capacities: Mapping[str, int],
    i: str,
    schools: Iterable[str],
) -> bool:
    """True iff the seats of ``schools`` cannot be filled from the students above ``i``."""
    schools = sorted(set(schools), key=id_key)
    if not schools:
        raise EmptySet("a high-priority set must be non-empty")
    return _hp(_frame_of(priorities, capacities, schools), i, tuple(schools))


def _frame_of(priorities, capacities, schools):
    for s in schools:
        if s not in capacities or s not in priorities:
            raise UnknownId(f"unknown school {s!r}")
    return tuple((s, tuple(priorities[s]), capacities[s]) for s in schools)


@lru_cache(maxsize=1 << 16)
def _hp(frame: tuple, i: str, schools: tuple) -> bool:
    prio = {s: order for s, order, _ in frame}
    caps = {s: q for s, _, q in frame}
    contours = _contours(prio, i, schools)
    students = sorted({j for c in contours.values() for j in c}, key=id_key)
    need = sum(caps[s] for s in schools)
    if len(students) < need:
        return True
    col = {j: k for k, j in enumerate(students)}
    adj = []
    for s in schools:
        row = [col[j] for j in contours[s]]
        adj.extend([row] * caps[s])
    return _max_matching(adj) < need


def is_high_priority_in(p: Problem, i: str, schools: Iterable[str]) -> bool:
    p.require_student(i)
    schools = list(schools)
    for s in schools:
        p.require_school(s)
    return is_high_priority_set(p.priorities, p.capacities, i, schools)


@dataclass(frozen=True)
class TopPriorityVerdict:
    """Smallest top-priority set of a student, or her individually rational outcome set."""

    student: str
    has_set: bool
    schools: frozenset
    outcomes: frozenset

    def contains(self, seat: Optional[str]) -> bool:
        return seat in self.outcomes

    def to_json(self) -> dict:
        return {
            "student": self.student,
            "has_top_priority_set": self.has_set,
            "set": sorted(self.schools, key=id_key),
            "outcomes": sorted(
                (s if s is not None else "self" for s in self.outcomes),
                key=lambda x: (x == "self", id_key(x)),
            ),
        }


def smallest_top_priority_set(p: Problem, i: str, pref: Optional[Sequence[str]] = None) -> TopPriorityVerdict:
    """Scan prefixes of ``i``'s list shortest first; the first high-priority one is the answer.

    ``pref`` overrides the student's list in ``p`` (useful for strategy analysis).
    """
    p.require_student(i)
    lst = tuple(p.prefs[i] if pref is None else pref)
    return _stps(p.frame_key, p.priorities, p.capacities, i, lst)


def _stps(frame_key, priorities, capacities, i, lst) -> TopPriorityVerdict:
    key = (frame_key, i, lst)
    hit = _STPS_CACHE.get(key)
    if hit is not None:
        return hit
    verdict = None
    for k in range(1, len(lst) + 1):
        prefix = lst[:k]
        if is_high_priority_set(priorities, capacities, i, prefix):
            verdict = TopPriorityVerdict(i, True, frozenset(prefix), frozenset(prefix))
            break
    if verdict is None:
        verdict = TopPriorityVerdict(i, False, frozenset(), frozenset(lst) | {SELF})
    if len(_STPS_CACHE) > 200_000:
        _STPS_CACHE.clear()
    _STPS_CACHE[key] = verdict
    return verdict


_STPS_CACHE: dict = {}


def top_priority_violations(p: Problem, a: Assignment) -> list[tuple[str, frozenset]]:
    check_assignment(p, a)
    out = []
    for i in p.students:
        v = smallest_top_priority_set(p, i)
        if v.has_set and a.seat(i) not in v.schools:
            out.append((i, v.schools))
    return out


def respects_top_priority_sets(p: Problem, a: Assignment) -> bool:
    return not top_priority_violations(p, a)


@dataclass(frozen=True)
class Complaint:
    student: str
    kind: str  # "unacceptable_seat" | "wasted_seat" | "top_priority_violation"
    witness: object = None

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, frozenset):
            w = sorted(w, key=id_key)
        return {"student": self.student, "kind": self.kind, "witness": w}


@dataclass(frozen=True)
class AuditReport:
    incontestable: bool
    complaints: tuple

    def students(self) -> set:
        return {c.student for c in self.complaints}

    def to_json(self) -> dict:
        return {"incontestable": self.incontestable, "complaints": [c.to_json() for c in self.complaints]}


def incontestability_verdict(p: Problem, a: Assignment) -> AuditReport:
    """Audit ``a``: incontestable iff IR, non-wasteful and respecting top-priority sets."""
    complaints = []
    bad = set(unacceptable_seats(p, a))
    waste = wasteful_witnesses(p, a)
    tps = dict(top_priority_violations(p, a))
    for i in p.students:
        if i in bad:
            complaints.append(Complaint(i, "unacceptable_seat", a.seat(i)))
        for j, s in waste:
            if j == i:
                complaints.append(Complaint(i, "wasted_seat", s))
        if i in tps:
            complaints.append(Complaint(i, "top_priority_violation", tps[i]))
    return AuditReport(not complaints, tuple(complaints))


def is_incontestable(p: Problem, a: Assignment) -> bool:
    return incontestability_verdict(p, a).incontestable


def is_comprehensive(
    a: Assignment,
    schools: Iterable[str],
    priorities: Mapping[str, Sequence[str]],
) -> bool:
    """Everyone above a student seated in ``schools`` is also seated in ``schools``."""
    target = set(schools)
    for s in target:
        if s not in priorities:
            raise UnknownId(f"unknown school {s!r}")
    for s in target:
        order = list(priorities[s])
        for i in a.roster(s):
            for j in order[: order.index(i)]:
                if a.seats.get(j) not in target:
                    return False
    return True


def construct_saturating_comprehensive(
    priorities: Mapping[str, Sequence[str]],
    capacities: Mapping[str, int],
    i: str,
    schools: Iterable[str],
) -> Assignment:
    """A fill of ``schools`` from students above ``i`` that is comprehensive.

    Exhaustive search, first solution in canonical order. Raises
    :class:`IsHighPrioritySet` if no saturating fill exists.
    """
    schools = sorted(set(schools), key=id_key)
    if not schools:
        raise EmptySet("school set must be non-empty")
    if is_high_priority_set(priorities, capacities, i, schools):
        raise IsHighPrioritySet(f"{sorted(schools, key=id_key)} is a high-priority set for {i}")
    contours = _contours(priorities, i, schools)
    everyone = sorted({j for order in priorities.values() for j in order}, key=id_key)
    pool = sorted({j for c in contours.values() for j in c}, key=id_key)
    options = {j: [None] + [s for s in schools if j in contours[s]] for j in pool}
    for combo in product(*(options[j] for j in pool)):
        fill = {s: 0 for s in schools}
        for s in combo:
            if s is not None:
                fill[s] += 1
        if any(fill[s] != capacities[s] for s in schools):
            continue
        seats = {j: None for j in everyone}
        seats.update(zip(pool, combo))
        a = Assignment(seats)
        if is_comprehensive(a, schools, priorities):
            return a
    raise AssertionError("no comprehensive saturating assignment found")  # pragma: no cover


__all__ = [
    "AuditReport",
    "Complaint",
    "TopPriorityVerdict",
    "construct_saturating_comprehensive",
    "incontestability_verdict",
    "is_comprehensive",
    "is_high_priority_in",
    "is_high_priority_set",
    "is_incontestable",
    "respects_top_priority_sets",
    "smallest_top_priority_set",
    "top_priority_violations",
]
