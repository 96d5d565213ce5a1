"""The assignment mechanisms, the list-capped wrapper and top-top pair detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import kernels
from .errors import InvalidPeriod, ListCapExceeded
from .model import Assignment, MechanismSpec, Problem

_CODES = {
    "sosm": kernels.SOSM,
    "boston": kernels.BOSTON,
    "ttc": kernels.TTC,
    "seadam": kernels.SEADAM,
    "ct": kernels.CT,
    "fct": kernels.FCT,
    "ar": kernels.AR,
    "ettc": kernels.ETTC,
}

#: Mechanisms that are incontestable and top-top consistent.
INCONTESTABLE_KINDS = ("sosm", "seadam", "ttc", "ct", "fct")


def mechanism_code(spec: MechanismSpec) -> tuple[int, int]:
    return _CODES[spec.kind], spec.period or 0


def _run(p: Problem, code: int, period: int = 0, trace: Optional[list] = None) -> Assignment:
    d = p.dense
    seat = kernels.run_code(code, d.pref, d.rank, d.cap, period, trace)
    return Assignment.from_dense(p, seat)


def run_sosm(p: Problem) -> Assignment:
    """Student-proposing deferred acceptance."""
    return _run(p, kernels.SOSM)


def run_boston(p: Problem) -> Assignment:
    return _run(p, kernels.BOSTON)


def run_ttc(p: Problem) -> Assignment:
    return _run(p, kernels.TTC)


def run_seadam(p: Problem) -> Assignment:
    return _run(p, kernels.SEADAM)


def run_ct(p: Problem) -> Assignment:
    return _run(p, kernels.CT)


def run_fct(p: Problem) -> Assignment:
    return _run(p, kernels.FCT)


def run_ettc(p: Problem) -> Assignment:
    return _run(p, kernels.ETTC)


def run_ar(p: Problem, e: int) -> Assignment:
    if e < 1:
        raise InvalidPeriod(f"period must be at least 1, got {e}")
    return _run(p, kernels.AR, e)


def run_constrained(spec: MechanismSpec, p: Problem) -> Assignment:
    """Run ``spec`` on ``p`` after checking every list respects the cap.

    Lists longer than the cap are rejected, never truncated.
    """
    k = spec.list_cap
    if k is not None:
        for i in p.students:
            if len(p.prefs[i]) > k:
                raise ListCapExceeded(f"{i} submitted {len(p.prefs[i])} schools, cap is {k}")
    code, period = mechanism_code(spec)
    return _run(p, code, period)


@dataclass(frozen=True)
class MechanismRun:
    spec: MechanismSpec
    outcome: Assignment
    trace: tuple = ()

    def replay(self, p: Problem) -> Assignment:
        """Rebuild the outcome from the trace."""
        seat = kernels.replay(len(p.students), self.trace)
        return Assignment.from_dense(p, seat)

    def to_json(self, p: Problem) -> dict:
        out = {"mechanism": str(self.spec), **self.outcome.to_json()}
        if self.trace:
            out["trace"] = [
                {
                    "event": tag,
                    "round": rnd,
                    "student": p.students[i],
                    "school": p.schools[s] if s >= 0 else None,
                }
                for tag, rnd, i, s in self.trace
            ]
        return out


def run(spec: MechanismSpec, p: Problem, trace: bool = False) -> MechanismRun:
    if spec.list_cap is not None:
        run_constrained(spec, p)
    code, period = mechanism_code(spec)
    events: Optional[list] = [] if trace else None
    outcome = _run(p, code, period, events)
    return MechanismRun(spec, outcome, tuple(events or ()))


def runner(spec: MechanismSpec) -> Callable[[Problem], Assignment]:
    code, period = mechanism_code(spec)
    return lambda p: _run(p, code, period)


def top_top_pairs(p: Problem) -> list[tuple[str, str]]:
    """Pairs (i, s) where s is i's first choice and i is first in s's priority order."""
    out = []
    for i in p.students:
        if p.prefs[i]:
            s = p.prefs[i][0]
            if p.priorities[s][0] == i:
                out.append((i, s))
    return out
