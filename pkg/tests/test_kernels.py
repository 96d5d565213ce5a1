import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incontest import _pykernels as py
from incontest import kernels

ck = pytest.importorskip("incontest._ckernels")

CODES = [py.SOSM, py.BOSTON, py.TTC, py.SEADAM, py.CT, py.FCT, py.AR]


def dense(rng, n, m):
    pref = [tuple(rng.sample(range(m), rng.randint(0, m))) for _ in range(n)]
    rank = []
    for _ in range(m):
        order = list(range(n))
        rng.shuffle(order)
        r = [0] * n
        for pos, i in enumerate(order):
            r[i] = pos
        rank.append(r)
    cap = [rng.randint(1, 3) for _ in range(m)]
    return pref, rank, cap


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_single_runs_agree(seed):
    rng = random.Random(seed)
    pref, rank, cap = dense(rng, rng.randint(1, 8), rng.randint(1, 5))
    period = rng.randint(1, 3)
    for code in CODES:
        assert py.run_code(code, pref, rank, cap, period) == ck.run_code(code, pref, rank, cap, period)


@pytest.mark.parametrize("code", CODES)
def test_tables_agree(code):
    rng = random.Random(code)
    _, rank, cap = dense(rng, 3, 3)
    pool = [(), (0,), (1, 2), (2, 0, 1), (1,)]
    choices = [list(range(5))] * 3
    a = py.outcome_table(code, 2, pool, choices, rank, cap)
    b = ck.outcome_table(code, 2, pool, choices, rank, cap)
    assert a.shape == (125, 3)
    assert np.array_equal(a, b)


def test_table_with_fixed_student():
    rank = [[0, 1], [1, 0]]
    pool = [(), (0,), (1,), (0, 1), (1, 0)]
    choices = [[3], list(range(5))]
    a = py.outcome_table(py.SOSM, 0, pool, choices, rank, [1, 1])
    b = ck.outcome_table(py.SOSM, 0, pool, choices, rank, [1, 1])
    assert np.array_equal(a, b)
    assert (a[:, 0] == 0).all()


def test_oversized_problem_falls_back():
    n = ck.LIMIT_STUDENTS + 1
    pref = [(0,)] * n
    rank = [list(range(n))]
    assert kernels.run_code(py.SOSM, pref, rank, [1]) == [0] + [-1] * (n - 1)


def test_ettc_is_python_only():
    with pytest.raises(ValueError):
        ck.run_code(py.ETTC, [(0,)], [[0]], [1])
    assert kernels.run_code(py.ETTC, [(0,)], [[0]], [1]) == [0]
