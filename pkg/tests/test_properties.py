import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incontest.corpus import random_problem
from incontest.errors import InconsistentAssignment, InstanceTooLarge, PreconditionViolated
from incontest.mechanisms import run_sosm
from incontest.model import Assignment, Problem
from incontest.properties import (
    check_generalized_rht,
    enumerate_assignments,
    is_efficient,
    is_individually_rational,
    is_non_wasteful,
    is_stable,
    justified_envy_triples,
    pareto_dominates,
    stability_report,
    wasteful_witnesses,
)

DA_T2 = Assignment({"i1": "s1", "i2": "s2", "i3": "s3"})


def nobody(p):
    return Assignment.empty(p)


def test_individual_rationality(t2, t4):
    assert is_individually_rational(t2, DA_T2)
    assert is_individually_rational(t2, nobody(t2))
    bad = Assignment({"i1": "s2", "i2": None, "i3": None, "i4": None})
    assert not is_individually_rational(t4, bad)


def test_wastefulness(t2, t4):
    assert is_non_wasteful(t2, DA_T2)
    assert ("i1", "s1") in wasteful_witnesses(t2, nobody(t2))
    a = Assignment({"i1": None, "i2": None, "i3": "s3", "i4": None})
    assert ("i4", "s1") in wasteful_witnesses(t4, a)


def test_envy(t2, t3, boston_t2, ar2_t3):
    assert ("i2", "i3", "s2") in justified_envy_triples(t2, boston_t2)
    assert ("i3", "i4", "s3") in justified_envy_triples(t3, ar2_t3)
    firsts = Assignment({"i1": "s1", "i2": "s2", "i3": "s3"})
    p = t2.with_prefs({"i2": ("s2",), "i3": ("s3",)})
    assert justified_envy_triples(p, firsts) == []


def test_stability(t2, boston_t2):
    assert is_stable(t2, DA_T2)
    rep = stability_report(t2, boston_t2)
    assert not rep.stable and rep.individually_rational and not rep.wasteful_witnesses
    single = Problem(("i",), ("s",), {"i": ("s",)}, {"s": ("i",)}, {"s": 1})
    assert is_stable(single, Assignment({"i": "s"}))


def test_inconsistent_inputs_raise(t2):
    with pytest.raises(InconsistentAssignment):
        is_stable(t2, Assignment({"i1": "s1", "i2": "s1", "i3": None}))


def test_pareto(t1, mu_star):
    assert not pareto_dominates(t1, mu_star, mu_star)
    worse = mu_star.replace(i1=None)
    assert pareto_dominates(t1, mu_star, worse)
    p = Problem(("a", "b"), ("x", "y"), {"a": ("x", "y"), "b": ("y", "x")},
                {"x": ("a", "b"), "y": ("a", "b")}, {"x": 1, "y": 1})
    one = Assignment({"a": "x", "b": "y"})
    other = Assignment({"a": "y", "b": "x"})
    q = p.with_prefs({"b": ("x", "y")})
    assert not pareto_dominates(q, one, other) and not pareto_dominates(q, other, one)


def test_efficiency(t2):
    assert is_efficient(t2, DA_T2)
    assert not is_efficient(t2, nobody(t2))
    with pytest.raises(InstanceTooLarge):
        is_efficient(t2, DA_T2, max_students=2)


def test_enumeration_counts(t2):
    # 3 unit schools: injective partial maps of 3 students into 3 schools.
    assert sum(1 for _ in enumerate_assignments(t2)) == 34


def test_rht_trivial_and_precondition(t1):
    base = run_sosm(t1)
    assert check_generalized_rht(t1, base, base).passed
    with pytest.raises(PreconditionViolated):
        check_generalized_rht(t1, base, Assignment.empty(t1))
    unmatched = base.replace(**{j: None for j in t1.students if base.seat(j) is not None})
    with pytest.raises(PreconditionViolated):
        check_generalized_rht(t1, unmatched, base)


def naive_envy(p, a):
    out = []
    for i in p.students:
        for j in p.students:
            s = a.seat(j)
            if s is None or i == j:
                continue
            if p.prefers(i, s, a.seat(i)) and p.rank(s, i) < p.rank(s, j):
                out.append((i, j, s))
    return sorted(out)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_envy_matches_naive_loop(seed):
    rng = random.Random(seed)
    p = random_problem(rng, rng.randint(1, 4), rng.randint(1, 3))
    assignments = list(enumerate_assignments(p))
    a = rng.choice(assignments)
    assert sorted(justified_envy_triples(p, a)) == naive_envy(p, a)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_rht_on_improvements(seed):
    rng = random.Random(seed)
    p = random_problem(rng, rng.randint(2, 4), rng.randint(1, 3))
    base = run_sosm(p)
    for a in enumerate_assignments(p):
        if pareto_dominates(p, a, base):
            assert check_generalized_rht(p, a, base).passed
