import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incontest.corpus import fixture, random_problem
from incontest.errors import (
    DuplicateId,
    IncompletePriority,
    InconsistentAssignment,
    InvalidPeriod,
    MechanismSpecError,
    NonPositiveCapacity,
    UnknownId,
    UnknownSchoolInPreference,
    ValidationError,
)
from incontest.model import (
    Assignment,
    ExPostInfo,
    MechanismSpec,
    Problem,
    assignment_from_json,
    check_assignment,
    ex_post_info,
    id_key,
    interim_info,
    problem_to_json,
    reduce_problem,
    truncate,
    upper_contour,
    validate_problem,
)


def raw_t2():
    return problem_to_json(fixture("t2"))


def test_fixture_t2_validates(t2):
    assert t2.students == ("i1", "i2", "i3")
    assert t2.prefs["i3"] == ("s2", "s1", "s3")
    assert all(q == 1 for q in t2.capacities.values())


def test_t4_capacity_two(t4):
    assert t4.capacities["s3"] == 2


def test_empty_preferences_are_legal():
    raw = raw_t2()
    raw["preferences"] = {i: [] for i in raw["students"]}
    p = validate_problem(raw)
    assert all(p.prefs[i] == () for i in p.students)


@pytest.mark.parametrize(
    "mutate, error",
    [
        (lambda r: r["students"].append("i1"), DuplicateId),
        (lambda r: r["preferences"].__setitem__("i1", ["s9"]), UnknownSchoolInPreference),
        (lambda r: r["priorities"].__setitem__("s1", ["i1", "i2"]), IncompletePriority),
        (lambda r: r["capacities"].__setitem__("s1", 0), NonPositiveCapacity),
        (lambda r: r["preferences"].__setitem__("i1", ["s1", "s1"]), DuplicateId),
        (lambda r: r["schools"].append("i1"), DuplicateId),
        (lambda r: r.pop("priorities"), ValidationError),
    ],
)
def test_validation_errors(mutate, error):
    raw = raw_t2()
    mutate(raw)
    with pytest.raises(error):
        validate_problem(raw)


def test_natural_order():
    assert sorted(["i10", "i2", "i1"], key=id_key) == ["i1", "i2", "i10"]


def test_upper_contour(t2, t3):
    assert upper_contour(t2, "i2", "s1") == {"i1"}
    assert upper_contour(t2, "i1", "s2") == set()
    assert upper_contour(t3, "i3", "s3") == {"i1", "i2"}
    with pytest.raises(UnknownId):
        upper_contour(t2, "i9", "s1")


def test_reduce_removes_unit_school(t2):
    r = reduce_problem(t2, "i1", "s1")
    assert r.students == ("i2", "i3")
    assert r.schools == ("s2", "s3")
    assert r.prefs["i3"] == ("s2", "s3")
    assert r.priorities["s2"] == ("i2", "i3")


def test_reduce_decrements(t4):
    r = reduce_problem(t4, "i3", "s3")
    assert r.schools == ("s1", "s2", "s3")
    assert r.capacities["s3"] == 1
    assert "i3" not in r.students


def test_truncate():
    assert truncate(("s1", "s2", "s3"), 2) == ("s1", "s2")
    assert truncate(("s1",), 3) == ("s1",)
    assert truncate(("s3", "s1", "s2"), 2) == ("s3", "s1")


def test_assignment_json_round_trip(t2):
    a = assignment_from_json({"seats": {"i1": "s1"}}, t2)
    assert a.seat("i2") is None
    assert a.to_json() == {"seats": {"i1": "s1", "i2": None, "i3": None}}
    assert a.roster("s1") == {"i1"}
    assert a.to_dense(t2) == (0, -1, -1)
    assert Assignment.from_dense(t2, (0, -1, -1)) == a


def test_inconsistent_assignment(t2):
    with pytest.raises(InconsistentAssignment):
        assignment_from_json({"seats": {"i1": "s1", "i2": "s1"}}, t2)
    with pytest.raises(InconsistentAssignment):
        assignment_from_json({"seats": {"i7": "s1"}}, t2)
    with pytest.raises(InconsistentAssignment):
        check_assignment(t2, Assignment({"i1": "s1"}))


def test_info_sets(t2, boston_t2):
    info = ex_post_info(t2, boston_t2, "i2")
    assert info.own_seat == "s3"
    assert dict(info.fill) == {"s1": 1, "s2": 1, "s3": 1}
    with pytest.raises(ValidationError):
        ExPostInfo(interim_info(t2, "i2"), "s1", {"s1": 0})
    with pytest.raises(ValidationError):
        ExPostInfo(interim_info(t2, "i2"), None, {"s1": 2})


@pytest.mark.parametrize(
    "text, kind, period, cap",
    [
        ("sosm", "sosm", None, None),
        ("ar:2", "ar", 2, None),
        ("TTC@k=2", "ttc", None, 2),
        ("ar:3@k=1", "ar", 3, 1),
    ],
)
def test_spec_parse(text, kind, period, cap):
    spec = MechanismSpec.parse(text)
    assert (spec.kind, spec.period, spec.list_cap) == (kind, period, cap)
    assert MechanismSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["dance", "sosm:2", "ar", "ttc@k=0", "ar:2@k"])
def test_spec_errors(text):
    with pytest.raises(MechanismSpecError):
        MechanismSpec.parse(text)


def test_invalid_period():
    with pytest.raises(InvalidPeriod):
        MechanismSpec.parse("ar:0")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 4))
def test_round_trip_and_partition(seed, n, m):
    import random

    p = random_problem(random.Random(seed), n, m)
    again = validate_problem(json.loads(json.dumps(problem_to_json(p))))
    assert again == p and hash(again) == hash(p)
    for s in p.schools:
        for i in p.students:
            above = upper_contour(p, i, s)
            below = set(p.priorities[s][p.rank(s, i) + 1:])
            assert above | {i} | below == set(p.students)
            assert not above & below


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_reduce_preserves_order(seed):
    import random

    rng = random.Random(seed)
    p = random_problem(rng, rng.randint(2, 5), rng.randint(1, 3))
    i = rng.choice(p.students)
    s = rng.choice(p.schools)
    r = reduce_problem(p, i, s)
    for j in r.students:
        kept = [t for t in p.prefs[j] if t in r.schools]
        assert list(r.prefs[j]) == kept
    for t in r.schools:
        assert list(r.priorities[t]) == [j for j in p.priorities[t] if j != i]


def test_problem_equality_ignores_input_order():
    a = Problem(("i2", "i1"), ("s1",), {"i1": ("s1",), "i2": ()}, {"s1": ("i1", "i2")}, {"s1": 1})
    b = Problem(("i1", "i2"), ("s1",), {"i2": (), "i1": ("s1",)}, {"s1": ("i1", "i2")}, {"s1": 1})
    assert a == b
    assert a.students == ("i1", "i2")
