"""Stability, efficiency and rural-hospital predicates."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional

from .errors import InstanceTooLarge, PreconditionViolated
from .model import Assignment, Problem, check_assignment, seat_position

MAX_STUDENTS = int(os.environ.get("INCONTEST_MAX_STUDENTS", 6))
MAX_SCHOOLS = int(os.environ.get("INCONTEST_MAX_SCHOOLS", 4))


@dataclass(frozen=True)
class StabilityReport:
    individually_rational: bool
    unacceptable: tuple = ()
    wasteful_witnesses: tuple = ()
    envy_triples: tuple = ()

    @property
    def stable(self) -> bool:
        return self.individually_rational and not self.wasteful_witnesses and not self.envy_triples

    def to_json(self) -> dict:
        return {
            "stable": self.stable,
            "individually_rational": self.individually_rational,
            "unacceptable": list(self.unacceptable),
            "wasteful_witnesses": [list(w) for w in self.wasteful_witnesses],
            "envy_triples": [list(t) for t in self.envy_triples],
        }


def unacceptable_seats(p: Problem, a: Assignment) -> list[str]:
    check_assignment(p, a)
    return [i for i in p.students if a.seat(i) is not None and a.seat(i) not in p.prefs[i]]


def is_individually_rational(p: Problem, a: Assignment) -> bool:
    return not unacceptable_seats(p, a)


def wasteful_witnesses(p: Problem, a: Assignment) -> list[tuple[str, str]]:
    """Every (i, s) where i prefers s to her seat and s has a free seat."""
    check_assignment(p, a)
    out = []
    for i in p.students:
        seat = a.seat(i)
        for s in p.prefs[i]:
            if s == seat:
                break
            if a.fill(s) < p.capacities[s]:
                out.append((i, s))
    return out


def is_non_wasteful(p: Problem, a: Assignment) -> bool:
    return not wasteful_witnesses(p, a)


def justified_envy_triples(p: Problem, a: Assignment) -> list[tuple[str, str, str]]:
    """Every (i, j, s) where j sits at s, i prefers s to her seat and outranks j there."""
    check_assignment(p, a)
    out = []
    for i in p.students:
        seat = a.seat(i)
        for s in p.prefs[i]:
            if s == seat:
                break
            for j in sorted(a.roster(s), key=lambda j: p.rank(s, j)):
                if p.rank(s, i) < p.rank(s, j):
                    out.append((i, j, s))
    return out


def stability_report(p: Problem, a: Assignment) -> StabilityReport:
    bad = unacceptable_seats(p, a)
    return StabilityReport(
        individually_rational=not bad,
        unacceptable=tuple(bad),
        wasteful_witnesses=tuple(wasteful_witnesses(p, a)),
        envy_triples=tuple(justified_envy_triples(p, a)),
    )


def is_stable(p: Problem, a: Assignment) -> bool:
    return stability_report(p, a).stable


def pareto_dominates(p: Problem, a: Assignment, b: Assignment) -> bool:
    check_assignment(p, a)
    check_assignment(p, b)
    strict = False
    for i in p.students:
        pa = seat_position(p.prefs[i], a.seat(i))
        pb = seat_position(p.prefs[i], b.seat(i))
        if pa > pb:
            return False
        if pa < pb:
            strict = True
    return strict


def _check_bound(p: Problem, max_students: Optional[int], max_schools: Optional[int]) -> None:
    ms = MAX_STUDENTS if max_students is None else max_students
    mc = MAX_SCHOOLS if max_schools is None else max_schools
    if len(p.students) > ms or len(p.schools) > mc:
        raise InstanceTooLarge(
            f"exhaustive enumeration is limited to {ms} students and {mc} schools"
        )


def enumerate_assignments(
    p: Problem,
    max_students: Optional[int] = None,
    max_schools: Optional[int] = None,
) -> Iterator[Assignment]:
    """All capacity-feasible assignments, in a fixed order."""
    _check_bound(p, max_students, max_schools)
    options = (None,) + p.schools
    cap = p.capacities
    for combo in product(options, repeat=len(p.students)):
        counts: dict = {}
        ok = True
        for s in combo:
            if s is not None:
                counts[s] = counts.get(s, 0) + 1
                if counts[s] > cap[s]:
                    ok = False
                    break
        if ok:
            yield Assignment(dict(zip(p.students, combo)))


def is_efficient(p: Problem, a: Assignment, max_students=None, max_schools=None) -> bool:
    check_assignment(p, a)
    return not any(
        pareto_dominates(p, b, a) for b in enumerate_assignments(p, max_students, max_schools)
    )


@dataclass(frozen=True)
class RuralHospitalReport:
    passed: bool
    failures: tuple = field(default=())

    def to_json(self) -> dict:
        return {"passed": self.passed, "failures": [list(f) for f in self.failures]}


def check_generalized_rht(p: Problem, dominating: Assignment, base: Assignment) -> RuralHospitalReport:
    """Check the three rural-hospital clauses for a weak Pareto improvement of an IR, non-wasteful base.

    Failures are ``(clause, witness)`` pairs with clause in ``{"i", "ii", "iii"}``.
    """
    check_assignment(p, dominating)
    check_assignment(p, base)
    if not (is_individually_rational(p, base) and is_non_wasteful(p, base)):
        raise PreconditionViolated("base assignment must be individually rational and non-wasteful")
    if dominating != base and not pareto_dominates(p, dominating, base):
        raise PreconditionViolated("first assignment does not Pareto dominate the base")
    failures = []
    for s in p.schools:
        if dominating.fill(s) != base.fill(s):
            failures.append(("i", s))
    for s in p.schools:
        if dominating.fill(s) < p.capacities[s] and dominating.roster(s) != base.roster(s):
            failures.append(("ii", s))
    for i in p.students:
        if (dominating.seat(i) is None) != (base.seat(i) is None):
            failures.append(("iii", i))
    return RuralHospitalReport(not failures, tuple(failures))
