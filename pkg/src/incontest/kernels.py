"""Backend selection for the dense kernels.

The compiled extension is used when it imports and the problem fits its
static limits; otherwise the pure-Python reference runs. Setting
``INCONTEST_PURE_PYTHON=1`` forces the reference implementation.
"""

from __future__ import annotations

import os

from . import _pykernels as py
from ._pykernels import AR, BOSTON, CT, ETTC, FCT, SEADAM, SOSM, TTC, replay  # noqa: F401

_c = None
if os.environ.get("INCONTEST_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _c
    except ImportError:  # extension not built
        _c = None

BACKEND = "cython" if _c is not None else "python"


def _compiled_ok(code: int, n: int, m: int) -> bool:
    return (
        _c is not None
        and code != ETTC
        and n <= _c.LIMIT_STUDENTS
        and m <= _c.LIMIT_SCHOOLS
    )


def run_code(code: int, pref, rank, cap, period: int = 0, trace=None) -> list[int]:
    """Run mechanism ``code`` on a dense problem; tracing always uses the reference path."""
    if trace is None and _compiled_ok(code, len(pref), len(cap)):
        return _c.run_code(code, pref, rank, cap, period)
    return py.run_code(code, pref, rank, cap, period, trace)


def outcome_table(code: int, period: int, pool, choices, rank, cap):
    if _compiled_ok(code, len(choices), len(cap)):
        return _c.outcome_table(code, period, pool, choices, rank, cap)
    return py.outcome_table(code, period, pool, choices, rank, cap)


def is_stable(pref, rank, cap, seat) -> bool:
    return py.is_stable(pref, rank, cap, seat)
