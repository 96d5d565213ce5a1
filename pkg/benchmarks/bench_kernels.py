"""Compare the compiled and pure-Python kernels on full outcome tables.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

from incontest import _pykernels
from incontest.corpus import all_lists, fixture
from incontest.mechanisms import mechanism_code
from incontest.model import MechanismSpec

try:
    from incontest import _ckernels
except ImportError:  # extension not built
    _ckernels = None

MECHS = ("sosm", "boston", "ttc", "seadam", "ct", "fct", "ar:2")


def table_args(frame):
    lists = all_lists(frame.schools)
    sidx = frame.school_index
    pool = [tuple(sidx[s] for s in row) for row in lists]
    choices = [list(range(len(pool)))] * len(frame.students)
    d = frame.dense
    return pool, choices, d.rank, d.cap


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--fixture", default="t4")
    args = ap.parse_args(argv)
    frame = fixture(args.fixture)
    pool, choices, rank, cap = table_args(frame)
    profiles = len(pool) ** len(choices)
    print(f"frame {args.fixture}: {profiles} profiles per table")
    print(f"{'mechanism':<10} {'python s':>10} {'cython s':>10} {'speedup':>9}")
    for name in MECHS:
        code, period = mechanism_code(MechanismSpec.parse(name))
        tp = best_of(lambda: _pykernels.outcome_table(code, period, pool, choices, rank, cap), args.repeat)
        if _ckernels is None:
            print(f"{name:<10} {tp:>10.3f} {'n/a':>10} {'n/a':>9}")
            continue
        py_out = _pykernels.outcome_table(code, period, pool, choices, rank, cap)
        c_out = _ckernels.outcome_table(code, period, pool, choices, rank, cap)
        if not (py_out == c_out).all():
            raise SystemExit(f"backends disagree on {name}")
        tc = best_of(lambda: _ckernels.outcome_table(code, period, pool, choices, rank, cap), args.repeat)
        print(f"{name:<10} {tp:>10.3f} {tc:>10.4f} {tp / tc:>8.0f}x")


if __name__ == "__main__":
    main()
