"""CDCL search kernel.

One self-contained function over flat numpy arrays: two watched literals,
first-UIP clause learning, geometric restarts, and an activity-driven
decision heuristic with phase fixed to false.  The same source runs either
jitted or interpreted (see accel), so both backends agree bit-for-bit on
verdicts and conflict counts.

Literal encoding: variable v (0-based) has literals 2v (positive) and
2v + 1 (negative); negation is ``lit ^ 1``.  The clause database is a flat
literal array with per-clause start/size tables; learned clauses append to
it.  Watch lists are intrusive linked lists with two nodes per clause
(node = 2 * clause + slot).
"""

from __future__ import annotations

import numpy as np

from .accel import BACKEND, jit_compile

SAT = 10
UNSAT = 20
BUDGET = 30
GROW = 40

RESTART_FIRST = 100
ACT_DECAY = 0.95
ACT_RESCALE = 1e100


def _search(db, cstart, csize, n_clauses, lits_used, n_vars, budget, assigns):
    """Run CDCL to completion; returns (status, conflicts).

    ``assigns`` must be zeroed on entry; on SAT it holds +1/-1 per variable.
    Returns GROW when the preallocated clause arrays run out of room.
    """
    cap_clauses = cstart.shape[0]
    cap_lits = db.shape[0]

    level = np.zeros(n_vars, dtype=np.int32)
    reason = np.full(n_vars, -1, dtype=np.int32)
    trail = np.zeros(n_vars + 1, dtype=np.int32)
    trail_lim = np.zeros(n_vars + 2, dtype=np.int32)
    whead = np.full(2 * n_vars, -1, dtype=np.int32)
    wnext = np.full(2 * cap_clauses, -1, dtype=np.int32)
    wpos = np.zeros(2 * cap_clauses, dtype=np.int32)
    act = np.zeros(n_vars, dtype=np.float64)
    seen = np.zeros(n_vars, dtype=np.uint8)
    learnt = np.zeros(n_vars + 1, dtype=np.int32)

    trail_len = 0
    qhead = 0
    dl = 0
    n_conflicts = 0
    var_inc = 1.0
    restart_limit = RESTART_FIRST
    since_restart = 0

    # Load original clauses: set up watches, enqueue units, spot emptiness.
    for ci in range(n_clauses):
        sz = csize[ci]
        if sz == 0:
            return UNSAT, 0
        if sz == 1:
            lit = db[cstart[ci]]
            v = lit >> 1
            want = np.int8(-1) if lit & 1 else np.int8(1)
            if assigns[v] == 0:
                assigns[v] = want
                trail[trail_len] = lit
                trail_len += 1
            elif assigns[v] != want:
                return UNSAT, 0
        else:
            wpos[2 * ci] = 0
            wpos[2 * ci + 1] = 1
            for slot in range(2):
                node = 2 * ci + slot
                lit = db[cstart[ci] + slot]
                wnext[node] = whead[lit]
                whead[lit] = node

    while True:
        # --- propagate ---
        confl = -1
        while qhead < trail_len:
            p = trail[qhead]
            qhead += 1
            fl = p ^ 1  # literal that just became false
            node = whead[fl]
            prev = -1
            while node != -1:
                nn = wnext[node]
                ci = node >> 1
                mypos = wpos[node]
                otherpos = wpos[node ^ 1]
                start = cstart[ci]
                other = db[start + otherpos]
                ov = assigns[other >> 1]
                oval = -ov if other & 1 else ov
                if oval == 1:
                    prev = node
                    node = nn
                    continue
                repl = -1
                sz = csize[ci]
                for j in range(sz):
                    if j == mypos or j == otherpos:
                        continue
                    l2 = db[start + j]
                    v2 = assigns[l2 >> 1]
                    lv2 = -v2 if l2 & 1 else v2
                    if lv2 != -1:
                        repl = j
                        break
                if repl >= 0:
                    # Move this watch to the replacement literal.
                    wpos[node] = repl
                    if prev == -1:
                        whead[fl] = nn
                    else:
                        wnext[prev] = nn
                    lw = db[start + repl]
                    wnext[node] = whead[lw]
                    whead[lw] = node
                    node = nn
                    continue
                if oval == -1:
                    confl = ci
                    qhead = trail_len
                    break
                # Unit: the other watched literal is forced.
                v = other >> 1
                assigns[v] = np.int8(-1) if other & 1 else np.int8(1)
                level[v] = dl
                reason[v] = ci
                trail[trail_len] = other
                trail_len += 1
                prev = node
                node = nn
            if confl != -1:
                break

        if confl != -1:
            n_conflicts += 1
            since_restart += 1
            if dl == 0:
                return UNSAT, n_conflicts
            if n_conflicts >= budget:
                return BUDGET, n_conflicts

            # --- analyze: first UIP ---
            learnt_len = 1
            path_c = 0
            p = -1
            index = trail_len - 1
            while True:
                start = cstart[confl]
                sz = csize[confl]
                for j in range(sz):
                    q = db[start + j]
                    if q == p:
                        continue
                    v = q >> 1
                    if seen[v] == 0 and level[v] > 0:
                        seen[v] = 1
                        act[v] += var_inc
                        if act[v] > ACT_RESCALE:
                            for u in range(n_vars):
                                act[u] *= 1e-100
                            var_inc *= 1e-100
                        if level[v] >= dl:
                            path_c += 1
                        else:
                            learnt[learnt_len] = q
                            learnt_len += 1
                while seen[trail[index] >> 1] == 0:
                    index -= 1
                p = trail[index]
                pv = p >> 1
                confl = reason[pv]
                seen[pv] = 0
                path_c -= 1
                index -= 1
                if path_c <= 0:
                    break
            learnt[0] = p ^ 1
            for j in range(1, learnt_len):
                seen[learnt[j] >> 1] = 0

            # Backtrack level: highest level among the other literals.
            if learnt_len == 1:
                back = 0
            else:
                max_i = 1
                for j in range(2, learnt_len):
                    if level[learnt[j] >> 1] > level[learnt[max_i] >> 1]:
                        max_i = j
                tmp = learnt[1]
                learnt[1] = learnt[max_i]
                learnt[max_i] = tmp
                back = level[learnt[1] >> 1]

            # --- backtrack ---
            lim = trail_lim[back + 1]
            for i in range(trail_len - 1, lim - 1, -1):
                v = trail[i] >> 1
                assigns[v] = 0
                reason[v] = -1
            trail_len = lim
            qhead = lim
            dl = back

            # --- record learned clause and assert its first literal ---
            if learnt_len == 1:
                lit = learnt[0]
                v = lit >> 1
                assigns[v] = np.int8(-1) if lit & 1 else np.int8(1)
                level[v] = 0
                reason[v] = -1
                trail[trail_len] = lit
                trail_len += 1
            else:
                if n_clauses + 1 > cap_clauses or lits_used + learnt_len > cap_lits:
                    return GROW, n_conflicts
                ci = n_clauses
                cstart[ci] = lits_used
                csize[ci] = learnt_len
                for j in range(learnt_len):
                    db[lits_used + j] = learnt[j]
                lits_used += learnt_len
                n_clauses += 1
                for slot in range(2):
                    node = 2 * ci + slot
                    wpos[node] = slot
                    lw = db[cstart[ci] + slot]
                    wnext[node] = whead[lw]
                    whead[lw] = node
                lit = learnt[0]
                v = lit >> 1
                assigns[v] = np.int8(-1) if lit & 1 else np.int8(1)
                level[v] = dl
                reason[v] = ci
                trail[trail_len] = lit
                trail_len += 1

            var_inc /= ACT_DECAY
            continue

        # --- no conflict ---
        if since_restart >= restart_limit and dl > 0:
            since_restart = 0
            restart_limit = (restart_limit * 3) // 2
            lim = trail_lim[1]
            for i in range(trail_len - 1, lim - 1, -1):
                v = trail[i] >> 1
                assigns[v] = 0
                reason[v] = -1
            trail_len = lim
            qhead = lim
            dl = 0
            continue

        if trail_len == n_vars:
            return SAT, n_conflicts

        # --- decide: max activity, ties to the lowest index, phase false ---
        best = -1
        best_act = -1.0
        for v in range(n_vars):
            if assigns[v] == 0 and act[v] > best_act:
                best = v
                best_act = act[v]
        dl += 1
        trail_lim[dl] = trail_len
        assigns[best] = -1
        level[best] = dl
        reason[best] = -1
        trail[trail_len] = 2 * best + 1
        trail_len += 1


search_python = _search
_search_jitted = None


def search_jitted():
    """The numba-compiled kernel, compiling on first use."""
    global _search_jitted
    if _search_jitted is None:
        _search_jitted = jit_compile(_search)
    return _search_jitted


def active_search():
    """Kernel for the configured backend."""
    if BACKEND == "numba":
        return search_jitted()
    return search_python
