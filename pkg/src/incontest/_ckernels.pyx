# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels mirroring ``_pykernels`` for the mechanisms used in bulk enumeration.

Problems are capped at ``MAXN`` students and ``MAXM`` schools so that all
scratch space lives on the stack.
"""

import numpy as np

cdef enum:
    MAXN = 64
    MAXM = 64

LIMIT_STUDENTS = MAXN
LIMIT_SCHOOLS = MAXM

cdef enum:
    SOSM = 0
    BOSTON = 1
    TTC = 2
    SEADAM = 3
    CT = 4
    FCT = 5
    AR = 6


cdef void c_da(int n, int m, const int* pref, const int* plen, const int* rank,
               const int* cap, const char* active, int* seat) noexcept nogil:
    cdef int nxt[MAXN]
    cdef int stack[MAXN]
    cdef int held[MAXM * MAXN]
    cdef int hc[MAXM]
    cdef int i, j, s, k, w, top = 0
    for s in range(m):
        hc[s] = 0
    for i in range(n):
        seat[i] = -1
        nxt[i] = 0
    for i in range(n - 1, -1, -1):
        if active == NULL or active[i]:
            stack[top] = i
            top += 1
    while top > 0:
        top -= 1
        i = stack[top]
        while nxt[i] < plen[i]:
            s = pref[i * m + nxt[i]]
            nxt[i] += 1
            if cap[s] <= 0:
                continue
            if hc[s] < cap[s]:
                held[s * MAXN + hc[s]] = i
                hc[s] += 1
                seat[i] = s
                break
            w = 0
            for k in range(1, hc[s]):
                if rank[s * n + held[s * MAXN + k]] > rank[s * n + held[s * MAXN + w]]:
                    w = k
            j = held[s * MAXN + w]
            if rank[s * n + i] < rank[s * n + j]:
                held[s * MAXN + w] = i
                seat[i] = s
                seat[j] = -1
                stack[top] = j
                top += 1
                break


cdef void c_boston(int n, int m, const int* pref, const int* plen, const int* rank,
                   const int* cap, int* seat) noexcept nogil:
    cdef int remaining[MAXM]
    cdef int i, s, t, best, longest = 0
    for s in range(m):
        remaining[s] = cap[s]
    for i in range(n):
        seat[i] = -1
        if plen[i] > longest:
            longest = plen[i]
    for t in range(longest):
        for s in range(m):
            while remaining[s] > 0:
                best = -1
                for i in range(n):
                    if seat[i] < 0 and t < plen[i] and pref[i * m + t] == s:
                        if best < 0 or rank[s * n + i] < rank[s * n + best]:
                            best = i
                if best < 0:
                    break
                seat[best] = s
                remaining[s] -= 1


cdef void c_ar(int n, int m, const int* pref, const int* plen, const int* rank,
               const int* cap, int period, int* seat) noexcept nogil:
    cdef int remaining[MAXM]
    cdef int blk[MAXN * MAXM]
    cdef int blen[MAXN]
    cdef int part[MAXN]
    cdef char active[MAXN]
    cdef int i, s, k, start = 0, longest = 0, any_active
    for s in range(m):
        remaining[s] = cap[s]
    for i in range(n):
        seat[i] = -1
        if plen[i] > longest:
            longest = plen[i]
    while start < longest:
        any_active = 0
        for i in range(n):
            blen[i] = 0
            for k in range(period):
                if start + k >= plen[i]:
                    break
                blk[i * m + k] = pref[i * m + start + k]
                blen[i] += 1
            active[i] = 1 if (seat[i] < 0 and blen[i] > 0) else 0
            any_active |= active[i]
        if any_active:
            c_da(n, m, blk, blen, rank, remaining, active, part)
            for i in range(n):
                if active[i] and part[i] >= 0:
                    seat[i] = part[i]
                    remaining[part[i]] -= 1
        start += period


cdef int c_top_available(int i, int m, const int* pref, const int* plen,
                         const int* remaining) noexcept nogil:
    cdef int k, s
    for k in range(plen[i]):
        s = pref[i * m + k]
        if remaining[s] > 0:
            return s
    return -1


cdef void c_ttc_pass(int n, int m, const int* pref, const int* plen, const int* rank,
                     int* remaining, char* alive, int* seat) noexcept nogil:
    cdef int target[MAXN]
    cdef int succ[MAXN]
    cdef int state[MAXN]
    cdef char incyc[MAXN]
    cdef int holder[MAXM]
    cdef int i, s, v, start, any_target = 0
    for i in range(n):
        target[i] = -1
        incyc[i] = 0
        state[i] = -1
        if alive[i]:
            target[i] = c_top_available(i, m, pref, plen, remaining)
            if target[i] < 0:
                alive[i] = 0
            else:
                any_target = 1
    if not any_target:
        return
    for s in range(m):
        holder[s] = -1
        for i in range(n):
            if alive[i] and (holder[s] < 0 or rank[s * n + i] < rank[s * n + holder[s]]):
                holder[s] = i
    for i in range(n):
        if alive[i]:
            succ[i] = holder[target[i]]
    for start in range(n):
        if not alive[start] or state[start] >= 0:
            continue
        v = start
        while state[v] < 0:
            state[v] = start
            v = succ[v]
        if state[v] == start:
            while not incyc[v]:
                incyc[v] = 1
                v = succ[v]
    for i in range(n):
        if incyc[i]:
            seat[i] = target[i]
            remaining[target[i]] -= 1
            alive[i] = 0


cdef void c_ttc(int n, int m, const int* pref, const int* plen, const int* rank,
                const int* cap, int* seat) noexcept nogil:
    cdef int remaining[MAXM]
    cdef char alive[MAXN]
    cdef int i, s, left
    for s in range(m):
        remaining[s] = cap[s]
    for i in range(n):
        seat[i] = -1
        alive[i] = 1
    left = n
    while left > 0:
        c_ttc_pass(n, m, pref, plen, rank, remaining, alive, seat)
        left = 0
        for i in range(n):
            left += alive[i]


cdef void c_ct(int n, int m, const int* pref, const int* plen, const int* rank,
               const int* cap, int first_only, int* seat) noexcept nogil:
    cdef int remaining[MAXM]
    cdef char alive[MAXN]
    cdef int clinch[MAXN]
    cdef int i, j, s, ahead, left, changed
    for s in range(m):
        remaining[s] = cap[s]
    for i in range(n):
        seat[i] = -1
        alive[i] = 1
    left = n
    while left > 0:
        changed = 1
        while changed:
            changed = 0
            for i in range(n):
                clinch[i] = -1
                if not alive[i]:
                    continue
                s = c_top_available(i, m, pref, plen, remaining)
                if s < 0:
                    continue
                ahead = 0
                for j in range(n):
                    if alive[j] and rank[s * n + j] < rank[s * n + i]:
                        ahead += 1
                if ahead < remaining[s]:
                    if first_only:
                        clinch[i] = s
                    else:
                        seat[i] = s
                        remaining[s] -= 1
                        alive[i] = 0
                        changed = 1
            if first_only:
                for i in range(n):
                    if clinch[i] >= 0:
                        seat[i] = clinch[i]
                        remaining[clinch[i]] -= 1
                        alive[i] = 0
                break
        left = 0
        for i in range(n):
            left += alive[i]
        if left > 0:
            c_ttc_pass(n, m, pref, plen, rank, remaining, alive, seat)
            left = 0
            for i in range(n):
                left += alive[i]


cdef void c_seadam(int n, int m, const int* pref, const int* plen, const int* rank,
                   const int* cap, int* seat) noexcept nogil:
    cdef char alive_s[MAXN]
    cdef char alive_c[MAXM]
    cdef char demanded[MAXM]
    cdef int rows[MAXN * MAXM]
    cdef int rlen[MAXN]
    cdef int mu[MAXN]
    cdef int i, s, k, left, settled, under
    for i in range(n):
        seat[i] = -1
        alive_s[i] = 1
    for s in range(m):
        alive_c[s] = 1
    left = n
    while left > 0:
        for i in range(n):
            rlen[i] = 0
            for k in range(plen[i]):
                s = pref[i * m + k]
                if alive_c[s]:
                    rows[i * m + rlen[i]] = s
                    rlen[i] += 1
        c_da(n, m, rows, rlen, rank, cap, alive_s, mu)
        for s in range(m):
            demanded[s] = 0
        for i in range(n):
            if not alive_s[i]:
                continue
            for k in range(rlen[i]):
                s = rows[i * m + k]
                if s == mu[i]:
                    break
                demanded[s] = 1
        under = 0
        for s in range(m):
            if alive_c[s] and not demanded[s]:
                under = 1
        settled = 0
        for i in range(n):
            if alive_s[i] and (mu[i] < 0 or not demanded[mu[i]]):
                seat[i] = mu[i]
                alive_s[i] = 0
                settled = 1
        if not settled and not under:
            for i in range(n):
                if alive_s[i]:
                    seat[i] = mu[i]
            break
        for s in range(m):
            if not demanded[s]:
                alive_c[s] = 0
        left = 0
        for i in range(n):
            left += alive_s[i]


cdef int c_run(int code, int period, int n, int m, const int* pref, const int* plen,
               const int* rank, const int* cap, int* seat) noexcept nogil:
    if code == SOSM:
        c_da(n, m, pref, plen, rank, cap, NULL, seat)
    elif code == BOSTON:
        c_boston(n, m, pref, plen, rank, cap, seat)
    elif code == TTC:
        c_ttc(n, m, pref, plen, rank, cap, seat)
    elif code == SEADAM:
        c_seadam(n, m, pref, plen, rank, cap, seat)
    elif code == CT:
        c_ct(n, m, pref, plen, rank, cap, 0, seat)
    elif code == FCT:
        c_ct(n, m, pref, plen, rank, cap, 1, seat)
    elif code == AR:
        c_ar(n, m, pref, plen, rank, cap, period, seat)
    else:
        return -1
    return 0


def _pack(pref, rank, cap):
    n, m = len(pref), len(cap)
    if n > MAXN or m > MAXM:
        raise ValueError("problem exceeds the compiled kernel limits")
    flat = np.zeros(max(n * m, 1), dtype=np.intc)
    lens = np.zeros(max(n, 1), dtype=np.intc)
    for i, row in enumerate(pref):
        lens[i] = len(row)
        flat[i * m:i * m + len(row)] = row
    rk = np.ascontiguousarray(np.asarray(rank, dtype=np.intc).reshape(-1))
    cp = np.ascontiguousarray(np.asarray(cap, dtype=np.intc))
    return n, m, flat, lens, rk, cp


def run_code(int code, pref, rank, cap, int period=0):
    """Run one mechanism; returns a list of seats (-1 = unassigned)."""
    n, m, flat, lens, rk, cp = _pack(pref, rank, cap)
    cdef int[::1] f = flat
    cdef int[::1] l = lens
    cdef int[::1] r = rk
    cdef int[::1] c = cp
    out = np.full(max(n, 1), -1, dtype=np.intc)
    cdef int[::1] o = out
    cdef int rc
    if n == 0:
        return []
    rc = c_run(code, period, n, m, &f[0], &l[0], &r[0], &c[0], &o[0])
    if rc != 0:
        raise ValueError(f"mechanism code {code} has no compiled kernel")
    return out[:n].tolist()


def is_stable(pref, rank, cap, seat):
    n, m = len(pref), len(cap)
    fill = [0] * m
    worst = [-1] * m
    for i, s in enumerate(seat):
        if s >= 0:
            fill[s] += 1
            if s not in pref[i]:
                return False
            if worst[s] < 0 or rank[s][i] > rank[s][worst[s]]:
                worst[s] = i
    for i in range(n):
        for s in pref[i]:
            if s == seat[i]:
                break
            if fill[s] < cap[s] or rank[s][i] < rank[s][worst[s]]:
                return False
    return True


def outcome_table(int code, int period, pool, choices, rank, cap):
    """Outcomes over the product of per-student choice lists (last student fastest)."""
    cdef int n = len(choices)
    cdef int m = len(cap)
    if n > MAXN or m > MAXM:
        raise ValueError("problem exceeds the compiled kernel limits")
    if code < 0 or code > AR:
        raise ValueError(f"mechanism code {code} has no compiled kernel")
    npool = len(pool)
    pool_arr = np.zeros((max(npool, 1), max(m, 1)), dtype=np.intc)
    pool_len = np.zeros(max(npool, 1), dtype=np.intc)
    for pk, row in enumerate(pool):
        pool_len[pk] = len(row)
        pool_arr[pk, :len(row)] = row
    maxc = max((len(c) for c in choices), default=1)
    ch = np.zeros((max(n, 1), max(maxc, 1)), dtype=np.intc)
    cnt = np.zeros(max(n, 1), dtype=np.intc)
    total = 1
    for si, sc in enumerate(choices):
        cnt[si] = len(sc)
        ch[si, :len(sc)] = sc
        total *= len(sc)
    out = np.empty((total, n), dtype=np.int32)
    if total == 0 or n == 0:
        return out
    rk = np.ascontiguousarray(np.asarray(rank, dtype=np.intc).reshape(-1))
    cp = np.ascontiguousarray(np.asarray(cap, dtype=np.intc))

    cdef int[:, ::1] P = pool_arr
    cdef int[::1] PL = pool_len
    cdef int[:, ::1] CH = ch
    cdef int[::1] CN = cnt
    cdef int[::1] R = rk
    cdef int[::1] C = cp
    cdef int[:, ::1] O = out
    cdef int pref[MAXN * MAXM]
    cdef int plen[MAXN]
    cdef int seat[MAXN]
    cdef int odo[MAXN]
    cdef int i, k, idx
    cdef long long t, T = total
    with nogil:
        for i in range(n):
            odo[i] = 0
        for t in range(T):
            for i in range(n):
                idx = CH[i, odo[i]]
                plen[i] = PL[idx]
                for k in range(PL[idx]):
                    pref[i * m + k] = P[idx, k]
            c_run(code, period, n, m, pref, plen, &R[0], &C[0], seat)
            for i in range(n):
                O[t, i] = seat[i]
            i = n - 1
            while i >= 0:
                odo[i] += 1
                if odo[i] < CN[i]:
                    break
                odo[i] = 0
                i -= 1
    return out
