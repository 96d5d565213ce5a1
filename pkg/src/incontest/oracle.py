"""Brute-force oracles over counterpart preference profiles.

A *frame* is a :class:`~incontest.model.Problem` whose preferences are
ignored: only students, schools, priorities and capacities matter.  The
oracles enumerate every message the other students could send (every
ordered list of distinct schools, optionally capped in length) and run a
mechanism on each profile.

Outcome tables are cached per (mechanism, frame, cap) and shared by all
queries on that frame.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import BudgetExceeded, ListCapExceeded
from .mechanisms import mechanism_code, runner, top_top_pairs
from .model import (
    SELF,
    Assignment,
    ExPostInfo,
    InterimInfo,
    MechanismSpec,
    Problem,
    id_key,
    reduce_problem,
    seat_position,
    truncate,
)
from .priority_sets import (
    construct_saturating_comprehensive,
    is_high_priority_set,
    smallest_top_priority_set,
)
from .properties import enumerate_assignments, is_stable

DEFAULT_BUDGET = 10**7

MechLike = Union[MechanismSpec, str]


def budget_limit(budget: Optional[int] = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("INCONTEST_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _spec(mech: MechLike) -> MechanismSpec:
    return mech if isinstance(mech, MechanismSpec) else MechanismSpec.parse(mech)


# -- strategy spaces and profile streams --------------------------------------


@dataclass(frozen=True)
class StrategySpace:
    """Every ordered list of distinct schools up to ``cap`` long, shortest first."""

    schools: tuple
    cap: Optional[int] = None

    @property
    def length_limit(self) -> int:
        n = len(self.schools)
        return n if self.cap is None else min(self.cap, n)

    @property
    def strategies(self) -> tuple:
        return _strategies(tuple(self.schools), self.length_limit)

    def __len__(self) -> int:
        return len(self.strategies)

    def __iter__(self):
        return iter(self.strategies)

    def index(self, pref: Sequence[str]) -> int:
        try:
            return _strategy_index(tuple(self.schools), self.length_limit)[tuple(pref)]
        except KeyError:
            raise ListCapExceeded(
                f"list {list(pref)} is not a message in this strategy space"
            ) from None


@lru_cache(maxsize=None)
def _strategies(schools: tuple, limit: int) -> tuple:
    out = []
    for k in range(limit + 1):
        out.extend(permutations(schools, k))
    return tuple(out)


@lru_cache(maxsize=None)
def _strategy_index(schools: tuple, limit: int) -> dict:
    return {s: k for k, s in enumerate(_strategies(schools, limit))}


def space_for(frame: Problem, cap: Optional[int] = None) -> StrategySpace:
    return StrategySpace(frame.schools, cap)


def enumerate_profiles(
    frame: Problem,
    fixed: Optional[Mapping[str, Sequence[str]]] = None,
    cap: Optional[int] = None,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: int = 0,
) -> Iterator[Problem]:
    """Complete ``fixed`` with every combination of strategies for the other students.

    With ``sample`` set, draw that many profiles uniformly at random instead.
    """
    fixed = dict(fixed or {})
    for i in fixed:
        frame.require_student(i)
    free = [i for i in frame.students if i not in fixed]
    strategies = space_for(frame, cap).strategies
    if sample is not None:
        rng = random.Random(seed)
        for _ in range(sample):
            prefs = dict(fixed)
            for j in free:
                prefs[j] = rng.choice(strategies)
            yield frame.with_prefs(prefs)
        return
    total = len(strategies) ** len(free)
    limit = budget_limit(budget)
    if total > limit:
        raise BudgetExceeded(f"{total} profiles exceed the budget of {limit}")
    for combo in product(strategies, repeat=len(free)):
        prefs = dict(fixed)
        prefs.update(zip(free, combo))
        yield frame.with_prefs(prefs)


# -- outcome tables -------------------------------------------------------------


_TABLES: dict = {}


def _full_table(spec: MechanismSpec, frame: Problem, cap: Optional[int], budget: Optional[int]):
    """Outcome array shaped ``(K,) * n + (n,)`` over the capped strategy space."""
    key = (spec.kind, spec.period, frame.frame_key, cap)
    hit = _TABLES.get(key)
    if hit is not None:
        return hit
    space = space_for(frame, cap)
    n = len(frame.students)
    K = len(space)
    total = K**n
    limit = budget_limit(budget)
    if total > limit:
        raise BudgetExceeded(f"{total} profiles exceed the budget of {limit}")
    pool = _dense_pool(frame, space)
    code, period = mechanism_code(spec)
    d = frame.dense
    table = kernels.outcome_table(code, period, pool, [range(K)] * n, d.rank, d.cap)
    table = np.asarray(table).reshape((K,) * n + (n,))
    if len(_TABLES) > 64:
        _TABLES.clear()
    _TABLES[key] = table
    return table


def _dense_pool(frame: Problem, space: StrategySpace):
    sidx = frame.school_index
    return [tuple(sidx[s] for s in strat) for strat in space.strategies]


def _slice_for(spec, frame, i, pref, cap, budget):
    """Outcomes for every counterpart profile, with ``i`` fixed to ``pref``.

    The result has shape ``(profiles, n)``; rows follow the counterpart
    enumeration order.
    """
    space = space_for(frame, cap)
    n = len(frame.students)
    K = len(space)
    ii = frame.student_index[i]
    limit = budget_limit(budget)
    pref = tuple(pref)
    try:
        k = space.index(pref)
    except ListCapExceeded:
        if cap is not None:
            raise
        k = None
    if k is not None and K**n <= limit:
        table = _full_table(spec, frame, cap, budget)
        sl = np.take(table, k, axis=ii)
        return sl.reshape(-1, n)
    total = K ** (n - 1)
    if total > limit:
        raise BudgetExceeded(f"{total} profiles exceed the budget of {limit}")
    pool = _dense_pool(frame, space)
    sidx = frame.school_index
    pool = pool + [tuple(sidx[s] for s in pref)]
    choices = [[len(pool) - 1] if j == ii else list(range(K)) for j in range(n)]
    code, period = mechanism_code(spec)
    d = frame.dense
    return np.asarray(kernels.outcome_table(code, period, pool, choices, d.rank, d.cap))


def _counterpart_profile(frame, i, row_index, cap) -> dict:
    """Decode the ``row_index``-th counterpart profile in enumeration order."""
    strategies = space_for(frame, cap).strategies
    K = len(strategies)
    others = [j for j in frame.students if j != i]
    digits = []
    r = row_index
    for _ in others:
        digits.append(r % K)
        r //= K
    digits.reverse()
    return {j: list(strategies[d]) for j, d in zip(others, digits)}


def _seat_name(frame: Problem, s: int) -> Optional[str]:
    return frame.schools[s] if s >= 0 else SELF


# -- attainable outcomes ----------------------------------------------------------


@dataclass(frozen=True)
class AttainableSet:
    student: str
    outcomes: frozenset
    witness: Mapping = field(compare=False, default_factory=dict)

    def to_json(self) -> dict:
        def name(s):
            return "self" if s is None else s

        return {
            "student": self.student,
            "outcomes": sorted((name(s) for s in self.outcomes), key=lambda x: (x == "self", id_key(x))),
            "witness": {name(s): prof for s, prof in sorted(
                self.witness.items(), key=lambda kv: (kv[0] is None, id_key(kv[0] or "")))},
        }


def attainable_set(
    mech: MechLike,
    info: InterimInfo,
    cap: Optional[int] = None,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: int = 0,
) -> AttainableSet:
    """Outcomes ``info.student`` can get as the others' messages range over the strategy space."""
    spec = _spec(mech)
    frame, i, pref = info.problem, info.student, tuple(info.pref)
    ii = frame.student_index[i]
    if cap is not None and len(pref) > cap:
        raise ListCapExceeded(f"{i}'s list is longer than the cap {cap}")
    if sample is not None:
        run = runner(spec)
        witness: dict = {}
        for prob in enumerate_profiles(frame, {i: pref}, cap, budget, sample, seed):
            s = run(prob).seat(i)
            if s not in witness:
                witness[s] = {j: list(prob.prefs[j]) for j in frame.students if j != i}
        return AttainableSet(i, frozenset(witness), witness)
    rows = _slice_for(spec, frame, i, pref, cap, budget)
    col = rows[:, ii]
    vals, first = np.unique(col, return_index=True)
    witness = {
        _seat_name(frame, int(v)): _counterpart_profile(frame, i, int(r), cap)
        for v, r in zip(vals, first)
    }
    return AttainableSet(i, frozenset(witness), witness)


def outcome_set(mech: MechLike, frame: Problem, i: str, pref: Sequence[str],
                cap: Optional[int] = None, budget: Optional[int] = None) -> frozenset:
    rows = _slice_for(_spec(mech), frame, i, tuple(pref), cap, budget)
    ii = frame.student_index[i]
    return frozenset(_seat_name(frame, int(v)) for v in np.unique(rows[:, ii]))


def predicted_outcomes(frame: Problem, i: str, pref: Sequence[str]) -> frozenset:
    return smallest_top_priority_set(frame, i, tuple(pref)).outcomes


@dataclass(frozen=True)
class OutcomeSetAudit:
    passed: bool
    attainable: frozenset
    predicted: frozenset


def audit_theorem2(mech: MechLike, frame: Problem, i: str, pref_i: Sequence[str],
                   budget: Optional[int] = None) -> OutcomeSetAudit:
    """Compare the enumerated outcome set with the top-priority-set prediction."""
    got = outcome_set(mech, frame, i, pref_i, None, budget)
    want = predicted_outcomes(frame, i, pref_i)
    return OutcomeSetAudit(got == want, got, want)


# -- definitional complaints --------------------------------------------------------


_COMPLAINT_CACHE: dict = {}


def definitional_complaint(info: ExPostInfo, budget: Optional[int] = None) -> bool:
    """True iff no counterpart profile admits a stable assignment consistent with ``info``.

    Consistent means: the student keeps her seat and every school keeps its
    enrollment size.
    """
    key = info.key
    if key in _COMPLAINT_CACHE:
        return _COMPLAINT_CACHE[key]
    p = info.interim.problem
    i = info.student
    n, m = len(p.students), len(p.schools)
    ii = p.student_index[i]
    sidx = p.school_index
    own = -1 if info.own_seat is None else sidx[info.own_seat]
    fill = [info.fill[s] for s in p.schools]
    d = p.dense
    pref_i = tuple(sidx[s] for s in info.interim.pref)

    candidates = []
    others = [j for j in range(n) if j != ii]
    for combo in product(range(-1, m), repeat=n - 1):
        seat = [0] * n
        seat[ii] = own
        for j, s in zip(others, combo):
            seat[j] = s
        cnt = [0] * m
        for s in seat:
            if s >= 0:
                cnt[s] += 1
        if cnt == fill:
            candidates.append(seat)

    strategies = _dense_pool(p, space_for(p, None))
    total = len(strategies) ** (n - 1)
    limit = budget_limit(budget)
    if total > limit:
        raise BudgetExceeded(f"{total} profiles exceed the budget of {limit}")
    found = False
    if candidates:
        for combo in product(strategies, repeat=n - 1):
            prefs = [None] * n
            prefs[ii] = pref_i
            for j, row in zip(others, combo):
                prefs[j] = row
            if any(kernels.is_stable(prefs, d.rank, d.cap, seat) for seat in candidates):
                found = True
                break
    result = not found
    if len(_COMPLAINT_CACHE) > 500_000:
        _COMPLAINT_CACHE.clear()
    _COMPLAINT_CACHE[key] = result
    return result


def enumerate_stable(p: Problem) -> list[Assignment]:
    return [a for a in enumerate_assignments(p) if is_stable(p, a)]


# -- adversarial profiles -----------------------------------------------------------


def adversarial_profile(
    frame: Problem, i: str, pref_i: Sequence[str], schools: Sequence[str]
) -> dict[str, list]:
    """Counterpart messages that keep ``i`` out of ``schools`` under any
    incontestable, top-top consistent mechanism.

    A comprehensive saturating fill from above ``i`` is turned into a
    matching in which each of those schools receives its highest-priority
    remaining claimants; those students each list only their matched school,
    and everyone else lists nothing.
    """
    frame.require_student(i)
    target = sorted(set(schools), key=id_key)
    for s in target:
        frame.require_school(s)
    mu0 = construct_saturating_comprehensive(frame.priorities, frame.capacities, i, target)
    holders = [j for j in frame.students if mu0.seat(j) in target]
    remaining = {s: frame.capacities[s] for s in target}
    left = set(holders)
    mu1: dict = {}
    while left:
        # Each school with seats points to its best remaining holder; each
        # holder points to her seat under the saturating fill.
        point = {}
        for s in target:
            if remaining[s] > 0:
                point[s] = min(left, key=lambda j: frame.rank(s, j))
        succ = {j: point[mu0.seat(j)] for j in left}
        state: dict = {}
        cleared = []
        for start in sorted(left, key=id_key):
            if start in state:
                continue
            path = []
            v = start
            while v not in state:
                state[v] = start
                path.append(v)
                v = succ[v]
            if state[v] == start:
                loop = path[path.index(v):]
                # A student gets the seat of the school that pointed at her,
                # which is her predecessor's school in the cycle.
                for prev, nxt in zip(loop, loop[1:] + loop[:1]):
                    mu1[nxt] = mu0.seat(prev)
                    remaining[mu0.seat(prev)] -= 1
                cleared.extend(loop)
        left -= set(cleared)
    profile = {}
    for j in frame.students:
        if j == i:
            continue
        profile[j] = [mu1[j]] if j in mu1 else []
    return profile


# -- top-top consistency -----------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyViolation:
    problem: Problem
    pair: tuple
    student: str
    full: Optional[str]
    reduced: Optional[str]


def audit_top_top_consistency(mech: MechLike, corpus) -> list[ConsistencyViolation]:
    """Seated top-top pairs whose removal changes some other student's outcome."""
    run = runner(_spec(mech))
    out = []
    for p in corpus:
        full = run(p)
        for i, s in top_top_pairs(p):
            if full.seat(i) != s:
                continue
            reduced = run(reduce_problem(p, i, s))
            for j in p.students:
                if j != i and full.seat(j) != reduced.seat(j):
                    out.append(ConsistencyViolation(p, (i, s), j, full.seat(j), reduced.seat(j)))
    return out


# -- incentives -----------------------------------------------------------------------


def _rank_key(true_pref: Sequence[str]):
    true_pref = tuple(true_pref)
    return lambda seat: seat_position(true_pref, seat)


def _rank_vector(frame: Problem, true_pref: Sequence[str]) -> np.ndarray:
    """Map a dense seat (index ``s + 1``, with 0 for unassigned) to a true-preference position."""
    key = _rank_key(true_pref)
    return np.array([key(None)] + [key(s) for s in frame.schools], dtype=np.int64)


def maxmin_worst(mech: MechLike, frame: Problem, i: str, submitted: Sequence[str],
                 true_pref: Sequence[str], cap: Optional[int] = None,
                 budget: Optional[int] = None) -> Optional[str]:
    """Worst outcome, by the true preference, over all counterpart profiles."""
    outcomes = outcome_set(mech, frame, i, submitted, cap, budget)
    key = _rank_key(true_pref)
    return max(sorted(outcomes, key=lambda s: (s is None, id_key(s or ""))), key=key)


@dataclass(frozen=True)
class MaxminResult:
    passed: bool
    truthful: tuple
    truthful_worst: Optional[str]
    violations: tuple = ()


def check_maxmin_optimal(mech: MechLike, frame: Problem, i: str, true_pref: Sequence[str],
                         cap: Optional[int] = None, budget: Optional[int] = None) -> MaxminResult:
    """Truthful reporting (truncated to the cap) maximizes the worst-case outcome."""
    spec = _spec(mech)
    truthful = tuple(true_pref) if cap is None else truncate(true_pref, cap)
    key = _rank_key(true_pref)
    base = maxmin_worst(spec, frame, i, truthful, true_pref, cap, budget)
    bad = []
    for alt in space_for(frame, cap):
        w = maxmin_worst(spec, frame, i, alt, true_pref, cap, budget)
        if key(w) < key(base):
            bad.append((alt, w))
    return MaxminResult(not bad, truthful, base, tuple(bad))


@dataclass(frozen=True)
class StrategyVerdict:
    exists: bool
    strategy: Optional[tuple] = None


def has_safe_strategy(frame: Problem, i: str, k: int, mech: Optional[MechLike] = None,
                      method: str = "characterization",
                      budget: Optional[int] = None) -> StrategyVerdict:
    """Whether some list of at most ``k`` schools guarantees ``i`` a seat.

    The characterization looks for a high-priority set of size at most ``k``.
    The brute-force method needs ``mech`` and checks every capped list.
    """
    frame.require_student(i)
    if k < 1:
        raise ValueError("k must be at least 1")
    if method == "characterization":
        for size in range(1, min(k, len(frame.schools)) + 1):
            for combo in combinations(frame.schools, size):
                if is_high_priority_set(frame.priorities, frame.capacities, i, combo):
                    return StrategyVerdict(True, tuple(combo))
        return StrategyVerdict(False)
    if method != "brute":
        raise ValueError(f"unknown method {method!r}")
    if mech is None:
        raise ValueError("the brute-force method needs a mechanism")
    spec = _spec(mech)
    table = _full_table(spec, frame, k, budget)
    ii = frame.student_index[i]
    space = space_for(frame, k)
    for idx, strat in enumerate(space):
        col = np.take(table, idx, axis=ii)[..., ii]
        if (col >= 0).all():
            return StrategyVerdict(True, strat)
    return StrategyVerdict(False)


def has_dominant_strategy(mech: MechLike, frame: Problem, i: str, true_pref: Sequence[str],
                          k: int, method: str = "characterization",
                          budget: Optional[int] = None) -> StrategyVerdict:
    """Whether ``i`` has a dominant message when lists are capped at ``k``.

    Characterization: her true list fits under the cap, or its first ``k``
    schools already contain a top-priority set.  The canonical dominant
    message is then the truncated true list.
    """
    frame.require_student(i)
    if k < 1:
        raise ValueError("k must be at least 1")
    true_pref = tuple(true_pref)
    if method == "characterization":
        if len(true_pref) <= k:
            return StrategyVerdict(True, true_pref)
        prefix = truncate(true_pref, k)
        if is_high_priority_set(frame.priorities, frame.capacities, i, prefix):
            return StrategyVerdict(True, prefix)
        return StrategyVerdict(False)
    if method != "brute":
        raise ValueError(f"unknown method {method!r}")
    spec = _spec(mech)
    table = _full_table(spec, frame, k, budget)
    ii = frame.student_index[i]
    ranks = _rank_vector(frame, true_pref)
    mine = np.moveaxis(table[..., ii], ii, 0)
    R = ranks[mine.reshape(mine.shape[0], -1) + 1]
    best = R.min(axis=0)
    space = space_for(frame, k)
    dominant = np.flatnonzero((R == best).all(axis=1))
    if dominant.size == 0:
        return StrategyVerdict(False)
    canonical = truncate(true_pref, k)
    picks = [space.strategies[d] for d in dominant]
    return StrategyVerdict(True, canonical if canonical in picks else picks[0])


def clear_caches() -> None:
    _TABLES.clear()
    _COMPLAINT_CACHE.clear()


__all__ = [
    "AttainableSet",
    "ConsistencyViolation",
    "MaxminResult",
    "StrategySpace",
    "StrategyVerdict",
    "OutcomeSetAudit",
    "adversarial_profile",
    "attainable_set",
    "audit_theorem2",
    "audit_top_top_consistency",
    "check_maxmin_optimal",
    "definitional_complaint",
    "enumerate_profiles",
    "enumerate_stable",
    "has_dominant_strategy",
    "has_safe_strategy",
    "maxmin_worst",
    "outcome_set",
    "predicted_outcomes",
]
