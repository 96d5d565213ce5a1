"""School-choice problems, assignments, information sets and mechanism specs.

Identifiers are strings at the boundary and dense integer indices inside the
kernels. A student's preference is stored as the ordered tuple of schools she
finds acceptable; everything after the last listed school is below staying
unassigned, and the order among unacceptable schools is never represented.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Any, Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import (
    DuplicateId,
    IncompletePriority,
    InconsistentAssignment,
    MechanismSpecError,
    InvalidPeriod,
    MissingEntry,
    NonPositiveCapacity,
    UnknownId,
    UnknownSchoolInPreference,
    ValidationError,
)

#: Seat value for a student assigned to herself (unassigned).
SELF = None

_DIGITS = re.compile(r"(\d+)")


def id_key(ident: str):
    """Natural sort key, so that ``i2`` sorts before ``i10``."""
    return [int(tok) if tok.isdigit() else tok for tok in _DIGITS.split(ident)]


def _sorted_ids(ids: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(ids, key=id_key))


class Dense(NamedTuple):
    """Integer view of a problem used by the kernels."""

    pref: tuple[tuple[int, ...], ...]
    rank: tuple[tuple[int, ...], ...]
    cap: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Problem:
    students: tuple[str, ...]
    schools: tuple[str, ...]
    prefs: Mapping[str, tuple[str, ...]]
    priorities: Mapping[str, tuple[str, ...]]
    capacities: Mapping[str, int]

    def __post_init__(self):
        students = tuple(self.students)
        schools = tuple(self.schools)
        _check_unique(students, "student")
        _check_unique(schools, "school")
        overlap = set(students) & set(schools)
        if overlap:
            raise DuplicateId(f"identifiers used for both students and schools: {sorted(overlap)}")
        student_set, school_set = set(students), set(schools)

        prefs = _keyed(self.prefs, student_set, "preferences")
        priorities = _keyed(self.priorities, school_set, "priorities")
        capacities = _keyed(self.capacities, school_set, "capacities")

        clean_prefs = {}
        for i in students:
            lst = tuple(prefs[i])
            if len(set(lst)) != len(lst):
                raise DuplicateId(f"school listed twice in the preferences of {i}")
            for s in lst:
                if s not in school_set:
                    raise UnknownSchoolInPreference(f"{i} lists unknown school {s!r}")
            clean_prefs[i] = lst
        clean_prio = {}
        for s in schools:
            order = tuple(priorities[s])
            if len(set(order)) != len(order):
                raise DuplicateId(f"student ranked twice at {s}")
            if set(order) != student_set:
                missing = student_set - set(order)
                extra = set(order) - student_set
                raise IncompletePriority(
                    f"priority order of {s} is not a permutation of the students "
                    f"(missing {sorted(missing)}, unknown {sorted(extra)})"
                )
            clean_prio[s] = order
        clean_cap = {}
        for s in schools:
            q = capacities[s]
            if isinstance(q, bool) or not isinstance(q, int) or q < 1:
                raise NonPositiveCapacity(f"capacity of {s} must be a positive integer, got {q!r}")
            clean_cap[s] = q

        set_ = object.__setattr__
        set_(self, "students", _sorted_ids(students))
        set_(self, "schools", _sorted_ids(schools))
        set_(self, "prefs", MappingProxyType({i: clean_prefs[i] for i in self.students}))
        set_(self, "priorities", MappingProxyType({s: clean_prio[s] for s in self.schools}))
        set_(self, "capacities", MappingProxyType({s: clean_cap[s] for s in self.schools}))

    # -- identity -----------------------------------------------------------

    @cached_property
    def key(self) -> tuple:
        return (
            self.students,
            self.schools,
            tuple(self.prefs[i] for i in self.students),
            self.frame_key[2],
            self.frame_key[3],
        )

    @cached_property
    def frame_key(self) -> tuple:
        """Everything except preferences: (I, S, r, q)."""
        return (
            self.students,
            self.schools,
            tuple(self.priorities[s] for s in self.schools),
            tuple(self.capacities[s] for s in self.schools),
        )

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Problem(students={list(self.students)}, schools={list(self.schools)})"

    # -- lookups ------------------------------------------------------------

    @cached_property
    def student_index(self) -> Mapping[str, int]:
        return MappingProxyType({i: k for k, i in enumerate(self.students)})

    @cached_property
    def school_index(self) -> Mapping[str, int]:
        return MappingProxyType({s: k for k, s in enumerate(self.schools)})

    @cached_property
    def _ranks(self) -> dict:
        return {s: {i: pos for pos, i in enumerate(order)} for s, order in self.priorities.items()}

    def rank(self, s: str, i: str) -> int:
        """Position of ``i`` in ``s``'s priority order, 0 being the highest priority."""
        self.require_school(s)
        self.require_student(i)
        return self._ranks[s][i]

    def require_student(self, i: str) -> None:
        if i not in self.student_index:
            raise UnknownId(f"unknown student {i!r}")

    def require_school(self, s: str) -> None:
        if s not in self.school_index:
            raise UnknownId(f"unknown school {s!r}")

    def prefers(self, i: str, a: Optional[str], b: Optional[str]) -> bool:
        """True iff ``i`` strictly prefers seat ``a`` to seat ``b`` (None = herself)."""
        return seat_position(self.prefs[i], a) < seat_position(self.prefs[i], b)

    def acceptable(self, i: str, s: str) -> bool:
        return s in self.prefs[i]

    @cached_property
    def dense(self) -> Dense:
        sidx = self.school_index
        pref = tuple(tuple(sidx[s] for s in self.prefs[i]) for i in self.students)
        rank = tuple(
            tuple(self._ranks[s][i] for i in self.students) for s in self.schools
        )
        cap = tuple(self.capacities[s] for s in self.schools)
        return Dense(pref, rank, cap)

    def with_prefs(self, updates: Mapping[str, Sequence[str]]) -> "Problem":
        """Copy of the problem with some students' preferences replaced."""
        prefs = dict(self.prefs)
        for i, lst in updates.items():
            self.require_student(i)
            prefs[i] = tuple(lst)
        return Problem(self.students, self.schools, prefs, self.priorities, self.capacities)

    def with_dense_prefs(self, pref: Sequence[Sequence[int]]) -> "Problem":
        schools = self.schools
        prefs = {i: tuple(schools[k] for k in row) for i, row in zip(self.students, pref)}
        return Problem(self.students, self.schools, prefs, self.priorities, self.capacities)


def _check_unique(ids: Sequence[str], what: str) -> None:
    seen = set()
    for x in ids:
        if not isinstance(x, str) or not x:
            raise ValidationError(f"{what} identifiers must be non-empty strings, got {x!r}")
        if x in seen:
            raise DuplicateId(f"duplicate {what} identifier {x!r}")
        seen.add(x)


def _keyed(mapping: Mapping, expected: set, what: str) -> Mapping:
    keys = set(mapping)
    extra = keys - expected
    if extra:
        raise UnknownId(f"{what} mention unknown identifiers {sorted(extra)}")
    missing = expected - keys
    if missing:
        raise MissingEntry(f"{what} missing for {sorted(missing)}")
    return mapping


def seat_position(pref: Sequence, seat) -> int:
    """Position of a seat in a preference list; herself sits right after the list.

    Unacceptable schools all share the position after herself.
    """
    if seat is None:
        return len(pref)
    try:
        return pref.index(seat)
    except ValueError:
        return len(pref) + 1


# -- parsing and serialisation ---------------------------------------------


def validate_problem(raw: Mapping[str, Any]) -> Problem:
    """Build a :class:`Problem` from the JSON instance format."""
    if not isinstance(raw, Mapping):
        raise ValidationError("instance must be a JSON object")
    for key in ("students", "schools", "capacities", "preferences", "priorities"):
        if key not in raw:
            raise MissingEntry(f"instance has no {key!r} field")
    students = list(raw["students"])
    schools = list(raw["schools"])
    return Problem(
        tuple(students),
        tuple(schools),
        {i: tuple(v) for i, v in dict(raw["preferences"]).items()},
        {s: tuple(v) for s, v in dict(raw["priorities"]).items()},
        dict(raw["capacities"]),
    )


def problem_to_json(p: Problem) -> dict:
    return {
        "students": list(p.students),
        "schools": list(p.schools),
        "capacities": {s: p.capacities[s] for s in p.schools},
        "preferences": {i: list(p.prefs[i]) for i in p.students},
        "priorities": {s: list(p.priorities[s]) for s in p.schools},
    }


def load_problem(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return validate_problem(json.load(fh))


def dump_json(obj, fh=None) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if fh is not None:
        fh.write(text)
    return text


# -- assignments -------------------------------------------------------------


class Assignment:
    """Map from each student to a school or to herself (``None``)."""

    __slots__ = ("_seats", "_rosters", "_hash")

    def __init__(self, seats: Mapping[str, Optional[str]]):
        self._seats = dict(seats)
        self._rosters = None
        self._hash = None

    @classmethod
    def from_dense(cls, p: Problem, seat: Sequence[int]) -> "Assignment":
        schools = p.schools
        return cls({i: (schools[s] if s >= 0 else SELF) for i, s in zip(p.students, seat)})

    @classmethod
    def empty(cls, p: Problem) -> "Assignment":
        return cls({i: SELF for i in p.students})

    def to_dense(self, p: Problem) -> tuple[int, ...]:
        sidx = p.school_index
        return tuple(-1 if self._seats.get(i) is None else sidx[self._seats[i]] for i in p.students)

    def seat(self, i: str) -> Optional[str]:
        try:
            return self._seats[i]
        except KeyError:
            raise UnknownId(f"student {i!r} has no seat entry") from None

    @property
    def seats(self) -> Mapping[str, Optional[str]]:
        return MappingProxyType(self._seats)

    def roster(self, s: str) -> frozenset:
        if self._rosters is None:
            rosters: dict = {}
            for i, t in self._seats.items():
                if t is not None:
                    rosters.setdefault(t, set()).add(i)
            self._rosters = {t: frozenset(v) for t, v in rosters.items()}
        return self._rosters.get(s, frozenset())

    def fill(self, s: str) -> int:
        return len(self.roster(s))

    def students(self):
        return self._seats.keys()

    def replace(self, **changes: Optional[str]) -> "Assignment":
        seats = dict(self._seats)
        seats.update(changes)
        return Assignment(seats)

    def updated(self, changes: Mapping[str, Optional[str]]) -> "Assignment":
        seats = dict(self._seats)
        seats.update(changes)
        return Assignment(seats)

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self._seats == other._seats

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._seats.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{i}->{s if s is not None else 'self'}" for i, s in sorted(
            self._seats.items(), key=lambda kv: id_key(kv[0])))
        return f"Assignment({body})"

    def to_json(self) -> dict:
        return {"seats": {i: self._seats[i] for i in sorted(self._seats, key=id_key)}}


def assignment_from_json(raw: Mapping[str, Any], p: Problem) -> Assignment:
    """Parse ``{"seats": {...}}``; students left out are unassigned."""
    if not isinstance(raw, Mapping) or "seats" not in raw:
        raise InconsistentAssignment("assignment must be an object with a 'seats' field")
    seats = dict(raw["seats"])
    for i in seats:
        if i not in p.student_index:
            raise InconsistentAssignment(f"assignment mentions unknown student {i!r}")
    full = {i: seats.get(i, SELF) for i in p.students}
    a = Assignment(full)
    check_assignment(p, a)
    return a


def check_assignment(p: Problem, a: Assignment) -> None:
    """Raise :class:`InconsistentAssignment` unless ``a`` is feasible for ``p``."""
    seats = a.seats
    if set(seats) != set(p.students):
        missing = set(p.students) - set(seats)
        extra = set(seats) - set(p.students)
        raise InconsistentAssignment(
            f"assignment students do not match the problem (missing {sorted(missing)}, "
            f"unknown {sorted(extra)})"
        )
    counts: dict = {}
    for i, s in seats.items():
        if s is None:
            continue
        if s not in p.school_index:
            raise InconsistentAssignment(f"{i} is seated at unknown school {s!r}")
        counts[s] = counts.get(s, 0) + 1
    for s, c in counts.items():
        if c > p.capacities[s]:
            raise InconsistentAssignment(f"{s} holds {c} students but has {p.capacities[s]} seats")


# -- structural transforms ---------------------------------------------------


def upper_contour(p: Problem, i: str, s: str) -> frozenset:
    """Students with strictly higher priority than ``i`` at ``s``."""
    p.require_student(i)
    p.require_school(s)
    order = p.priorities[s]
    return frozenset(order[: order.index(i)])


def reduce_problem(p: Problem, i: str, s: str) -> Problem:
    """Remove student ``i`` and one seat of ``s``; drop ``s`` when it runs out of seats."""
    p.require_student(i)
    p.require_school(s)
    students = tuple(j for j in p.students if j != i)
    caps = dict(p.capacities)
    if caps[s] > 1:
        caps[s] -= 1
        schools = p.schools
    else:
        del caps[s]
        schools = tuple(t for t in p.schools if t != s)
    prefs = {j: tuple(t for t in p.prefs[j] if t in caps) for j in students}
    prio = {t: tuple(j for j in p.priorities[t] if j != i) for t in schools}
    return Problem(students, schools, prefs, prio, caps)


def truncate(pref: Sequence[str], k: int) -> tuple:
    """Keep the ``k`` most preferred acceptable schools."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return tuple(pref[:k])


# -- information sets ---------------------------------------------------------


@dataclass(frozen=True)
class InterimInfo:
    """What a student knows before the assignment: (I, S, r, q) and her own list."""

    problem: Problem
    student: str
    pref: tuple

    def __post_init__(self):
        self.problem.require_student(self.student)
        object.__setattr__(self, "pref", tuple(self.pref))
        for s in self.pref:
            self.problem.require_school(s)


@dataclass(frozen=True)
class ExPostInfo:
    """Interim information plus her own seat and every school's enrollment."""

    interim: InterimInfo
    own_seat: Optional[str]
    fill: Mapping[str, int] = field(hash=False)

    def __post_init__(self):
        p = self.interim.problem
        fill = {s: int(self.fill.get(s, 0)) for s in p.schools}
        for s, f in fill.items():
            if f < 0 or f > p.capacities[s]:
                raise ValidationError(f"fill of {s} must lie in [0, {p.capacities[s]}]")
        if self.own_seat is not None:
            p.require_school(self.own_seat)
            if fill[self.own_seat] < 1:
                raise ValidationError("own seat's school must have at least one student")
        object.__setattr__(self, "fill", MappingProxyType(fill))

    @property
    def student(self) -> str:
        return self.interim.student

    @property
    def key(self) -> tuple:
        p = self.interim.problem
        return (
            p.frame_key,
            self.interim.student,
            self.interim.pref,
            self.own_seat,
            tuple(self.fill[s] for s in p.schools),
        )


def interim_info(p: Problem, i: str) -> InterimInfo:
    return InterimInfo(p, i, p.prefs[i])


def ex_post_info(p: Problem, a: Assignment, i: str) -> ExPostInfo:
    return ExPostInfo(interim_info(p, i), a.seat(i), {s: a.fill(s) for s in p.schools})


# -- mechanism specification -------------------------------------------------

MECHANISM_KINDS = ("sosm", "boston", "ttc", "seadam", "ct", "fct", "ettc", "ar")

_SPEC_RE = re.compile(r"^(?P<kind>[a-z]+)(?::(?P<e>-?\d+))?(?:@k=(?P<k>-?\d+))?$")


@dataclass(frozen=True)
class MechanismSpec:
    kind: str
    period: Optional[int] = None
    list_cap: Optional[int] = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in MECHANISM_KINDS:
            raise MechanismSpecError(f"unknown mechanism {self.kind!r}")
        if kind == "ar":
            if self.period is None:
                raise InvalidPeriod("the application-rejection mechanism needs a period e")
            if self.period < 1:
                raise InvalidPeriod(f"period must be at least 1, got {self.period}")
        elif self.period is not None:
            raise MechanismSpecError(f"{kind} takes no period")
        if self.list_cap is not None and self.list_cap < 1:
            raise MechanismSpecError(f"list cap must be at least 1, got {self.list_cap}")

    @classmethod
    def parse(cls, text: str) -> "MechanismSpec":
        """Parse ``sosm | boston | ttc | seadam | ct | fct | ettc | ar:<e>`` with optional ``@k=<K>``."""
        m = _SPEC_RE.match(text.strip().lower())
        if not m:
            raise MechanismSpecError(f"cannot parse mechanism spec {text!r}")
        e = int(m["e"]) if m["e"] is not None else None
        k = int(m["k"]) if m["k"] is not None else None
        return cls(m["kind"], e, k)

    def unconstrained(self) -> "MechanismSpec":
        return MechanismSpec(self.kind, self.period, None)

    def __str__(self):
        out = self.kind if self.period is None else f"{self.kind}:{self.period}"
        if self.list_cap is not None:
            out += f"@k={self.list_cap}"
        return out
