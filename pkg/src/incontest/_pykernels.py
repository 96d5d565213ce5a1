"""Reference kernels over dense integer problems.

Conventions shared with the compiled twin:

* students are ``0..n-1`` and schools ``0..m-1``;
* ``pref[i]`` lists the schools student ``i`` finds acceptable, best first;
* ``rank[s][i]`` is ``i``'s position in ``s``'s priority order (0 is best);
* ``cap[s]`` is the number of seats at ``s``;
* a returned seat of ``-1`` means the student is unassigned.

Every kernel optionally appends events to ``trace``.  Events are tuples
``(tag, round, i, s)`` where ``tag`` ends in ``assign`` or ``release``
when the event changes a seat, so a trace can be replayed with
:func:`replay`.
"""

from __future__ import annotations

from itertools import product

import numpy as np

SOSM, BOSTON, TTC, SEADAM, CT, FCT, AR, ETTC = range(8)


def replay(n, trace):
    seat = [-1] * n
    for tag, _rnd, i, s in trace:
        if tag.endswith("assign"):
            seat[i] = s
        elif tag.endswith("release"):
            seat[i] = -1
    return seat


def deferred_acceptance(pref, rank, cap, trace=None, active=None, _round=0):
    """Student-proposing deferred acceptance.

    ``active`` restricts proposing to a subset of students; the others stay
    unassigned. Capacities are taken as given, so callers may pass residual
    capacities.
    """
    n, m = len(pref), len(cap)
    seat = [-1] * n
    nxt = [0] * n
    held = [[] for _ in range(m)]
    free = [i for i in (range(n) if active is None else active)]
    free.reverse()
    while free:
        i = free.pop()
        row = pref[i]
        while nxt[i] < len(row):
            s = row[nxt[i]]
            nxt[i] += 1
            if cap[s] <= 0:
                continue
            h = held[s]
            if len(h) < cap[s]:
                h.append(i)
                seat[i] = s
                if trace is not None:
                    trace.append(("da-assign", _round, i, s))
                break
            rs = rank[s]
            worst = max(h, key=rs.__getitem__)
            if rs[i] < rs[worst]:
                h[h.index(worst)] = i
                seat[i] = s
                seat[worst] = -1
                if trace is not None:
                    trace.append(("da-release", _round, worst, s))
                    trace.append(("da-assign", _round, i, s))
                free.append(worst)
                break
    return seat


def application_rejection(pref, rank, cap, period, trace=None):
    """Rounds of deferred acceptance over consecutive blocks of ``period`` choices.

    Students seated at the end of a round keep their seats for good.
    """
    n = len(pref)
    remaining = list(cap)
    seat = [-1] * n
    start = 0
    longest = max((len(r) for r in pref), default=0)
    rnd = 0
    while start < longest:
        block = [tuple(r[start:start + period]) for r in pref]
        active = [i for i in range(n) if seat[i] < 0 and block[i]]
        if active:
            part = deferred_acceptance(block, rank, remaining, None, active)
            for i in active:
                s = part[i]
                if s >= 0:
                    seat[i] = s
                    remaining[s] -= 1
                    if trace is not None:
                        trace.append(("ar-assign", rnd, i, s))
        start += period
        rnd += 1
    return seat


def boston(pref, rank, cap, trace=None):
    """Immediate acceptance: round ``t`` considers each unassigned student's ``t``-th choice."""
    n, m = len(pref), len(cap)
    remaining = list(cap)
    seat = [-1] * n
    longest = max((len(r) for r in pref), default=0)
    for t in range(longest):
        applicants = [[] for _ in range(m)]
        for i in range(n):
            if seat[i] < 0 and t < len(pref[i]):
                applicants[pref[i][t]].append(i)
        for s in range(m):
            if not applicants[s] or remaining[s] <= 0:
                continue
            chosen = sorted(applicants[s], key=rank[s].__getitem__)[: remaining[s]]
            for i in chosen:
                seat[i] = s
                if trace is not None:
                    trace.append(("boston-assign", t, i, s))
            remaining[s] -= len(chosen)
    return seat


def _top_available(row, remaining, start=0):
    for s in row[start:]:
        if remaining[s] > 0:
            return s
    return -1


def _ttc_pass(pref, rank, remaining, alive, seat, trace, rnd, tag):
    """One simultaneous cycle-removal pass; returns True if anything changed."""
    target = {}
    for i in sorted(alive):
        s = _top_available(pref[i], remaining)
        if s < 0:
            alive.discard(i)
            if trace is not None:
                trace.append((tag + "-exit", rnd, i, -1))
        else:
            target[i] = s
    if not target:
        return False
    holder = {}
    for s in set(target.values()):
        rs = rank[s]
        holder[s] = min(alive, key=rs.__getitem__)
    succ = {i: holder[target[i]] for i in target}
    # Cycles of the student-to-student map.
    state = {}
    in_cycle = []
    for start in sorted(succ):
        if start in state:
            continue
        path = []
        v = start
        while v not in state:
            state[v] = start
            path.append(v)
            v = succ[v]
        if state[v] == start:
            in_cycle.extend(path[path.index(v):])
    for i in sorted(in_cycle):
        s = target[i]
        seat[i] = s
        remaining[s] -= 1
        alive.discard(i)
        if trace is not None:
            trace.append((tag + "-assign", rnd, i, s))
    return True


def top_trading_cycles(pref, rank, cap, trace=None):
    n = len(pref)
    remaining = list(cap)
    seat = [-1] * n
    alive = set(range(n))
    rnd = 0
    while alive:
        _ttc_pass(pref, rank, remaining, alive, seat, trace, rnd, "ttc")
        rnd += 1
    return seat


def clinch_and_trade(pref, rank, cap, first_only=False, trace=None):
    """Clinch-and-trade; ``first_only`` gives the single-sweep clinching variant."""
    n = len(pref)
    remaining = list(cap)
    seat = [-1] * n
    alive = set(range(n))
    rnd = 0
    while alive:
        changed = True
        while changed:
            changed = False
            standing = sorted(alive)
            clinched = []
            for i in standing:
                s = _top_available(pref[i], remaining)
                if s < 0:
                    continue
                rs = rank[s]
                ahead = sum(1 for j in alive if rs[j] < rs[i])
                if ahead < remaining[s]:
                    clinched.append((i, s))
                    if not first_only:
                        seat[i] = s
                        remaining[s] -= 1
                        alive.discard(i)
                        changed = True
                        if trace is not None:
                            trace.append(("clinch-assign", rnd, i, s))
            if first_only:
                for i, s in clinched:
                    seat[i] = s
                    remaining[s] -= 1
                    alive.discard(i)
                    if trace is not None:
                        trace.append(("clinch-assign", rnd, i, s))
                break
        if alive:
            _ttc_pass(pref, rank, remaining, alive, seat, trace, rnd, "trade")
        rnd += 1
    return seat


def seadam(pref, rank, cap, trace=None):
    """Simplified efficiency-adjusted deferred acceptance.

    Each round runs deferred acceptance on the residual problem. Students
    seated at under-demanded schools are settled, and so are unassigned
    students (they hold an under-demanded null seat). Settled students and
    under-demanded schools leave the problem.
    """
    n, m = len(pref), len(cap)
    seat = [-1] * n
    alive_s = set(range(n))
    alive_c = set(range(m))
    rnd = 0
    while alive_s:
        residual_cap = [cap[s] if s in alive_c else 0 for s in range(m)]
        rows = [tuple(s for s in pref[i] if s in alive_c) for i in range(n)]
        mu = deferred_acceptance(rows, rank, residual_cap, None, sorted(alive_s))
        demanded = set()
        for i in alive_s:
            for s in rows[i]:
                if s == mu[i]:
                    break
                demanded.add(s)
        under = alive_c - demanded
        settle = [i for i in sorted(alive_s) if mu[i] < 0 or mu[i] in under]
        if not settle and not under:
            for i in sorted(alive_s):
                seat[i] = mu[i]
                if trace is not None:
                    trace.append(("seadam-assign", rnd, i, mu[i]))
            break
        for i in settle:
            seat[i] = mu[i]
            alive_s.discard(i)
            if trace is not None and mu[i] >= 0:
                trace.append(("seadam-assign", rnd, i, mu[i]))
        alive_c -= under
        rnd += 1
    return seat


def ettc(pref, rank, cap, trace=None):
    """Equitable top trading cycles over (student, school) seat claims.

    Each step pre-assigns every school's remaining seats to its highest
    priority remaining students. A claim (i, s) points to a claim on i's
    favourite remaining school t, held by the holder of t with the highest
    priority at s; distinct claims of i point to distinct holders when
    possible. All cycles of a step clear together.
    """
    n, m = len(pref), len(cap)
    remaining = list(cap)
    seat = [-1] * n
    alive = set(range(n))
    rnd = 0
    while alive:
        target = {}
        for i in sorted(alive):
            t = _top_available(pref[i], remaining)
            if t < 0:
                alive.discard(i)
            else:
                target[i] = t
        if not alive:
            break
        holders = {}
        claims = {i: [] for i in alive}
        for s in range(m):
            if remaining[s] <= 0:
                continue
            hs = sorted(alive, key=rank[s].__getitem__)[: remaining[s]]
            holders[s] = hs
            for j in hs:
                claims[j].append(s)
        succ = {}
        for i in sorted(alive):
            t = target[i]
            used = set()
            for s in claims[i]:
                by_s = sorted(holders[t], key=rank[s].__getitem__)
                pick = next((j for j in by_s if j not in used), by_s[0])
                used.add(pick)
                succ[(i, s)] = (pick, t)
        state = {}
        cyc_students = set()
        for start in sorted(succ):
            if start in state:
                continue
            path = []
            v = start
            while v not in state:
                state[v] = start
                path.append(v)
                v = succ[v]
            if state[v] == start:
                cyc_students.update(c[0] for c in path[path.index(v):])
        for i in sorted(cyc_students):
            t = target[i]
            seat[i] = t
            remaining[t] -= 1
            alive.discard(i)
            if trace is not None:
                trace.append(("ettc-assign", rnd, i, t))
        rnd += 1
    return seat


def run_code(code, pref, rank, cap, period=0, trace=None):
    if code == SOSM:
        return deferred_acceptance(pref, rank, cap, trace)
    if code == BOSTON:
        return boston(pref, rank, cap, trace)
    if code == TTC:
        return top_trading_cycles(pref, rank, cap, trace)
    if code == SEADAM:
        return seadam(pref, rank, cap, trace)
    if code == CT:
        return clinch_and_trade(pref, rank, cap, False, trace)
    if code == FCT:
        return clinch_and_trade(pref, rank, cap, True, trace)
    if code == AR:
        return application_rejection(pref, rank, cap, period, trace)
    if code == ETTC:
        return ettc(pref, rank, cap, trace)
    raise ValueError(f"unknown mechanism code {code}")


def is_stable(pref, rank, cap, seat):
    n, m = len(pref), len(cap)
    fill = [0] * m
    for s in seat:
        if s >= 0:
            fill[s] += 1
    worst = [-1] * m
    for i, s in enumerate(seat):
        if s >= 0:
            if s not in pref[i]:
                return False
            if worst[s] < 0 or rank[s][i] > rank[s][worst[s]]:
                worst[s] = i
    for i in range(n):
        for s in pref[i]:
            if s == seat[i]:
                break
            if fill[s] < cap[s]:
                return False
            if rank[s][i] < rank[s][worst[s]]:
                return False
    return True


def outcome_table(code, period, pool, choices, rank, cap):
    """Outcomes for every profile in the product of per-student choice lists.

    ``pool`` is a sequence of strategy rows and ``choices[i]`` lists indices
    into ``pool`` available to student ``i``. Profiles follow
    :func:`itertools.product` order, so the last student varies fastest.
    Returns an ``int32`` array of shape ``(profiles, n)``.
    """
    n = len(choices)
    total = 1
    for c in choices:
        total *= len(c)
    out = np.empty((total, n), dtype=np.int32)
    rows = [[pool[k] for k in c] for c in choices]
    for r, prof in enumerate(product(*rows)):
        out[r] = run_code(code, prof, rank, cap, period)
    return out
