"""Exhaustive explicit-state ground truth.

Breadth-first reachability over the full state space gives the reference
answer every engine is measured against: safety, the reachable set, and a
shortest counterexample.  Loop-free path enumeration provides the separate
ground truth for the loop-free reduction, and trace validation is the
acceptance check for every Unsafe verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import truthtab as tt
from .errors import WidthTooLarge
from .system import StateSeq, TransitionSystem

REACH_WIDTH_CAP = 24
LOOPFREE_WIDTH_CAP = 12


@dataclass(frozen=True)
class ReachReport:
    reachable: frozenset[int]
    safe: bool
    shortest_cex: StateSeq | None
    depth: int


def reach(sys: TransitionSystem) -> ReachReport:
    """BFS from the initial states; safe iff every reached state satisfies prop.

    Deterministic: layers expand in ascending state order, so the shortest
    counterexample (when one exists) is the same on every run.
    """
    if sys.width > REACH_WIDTH_CAP:
        raise WidthTooLarge(f"width {sys.width} exceeds cap {REACH_WIDTH_CAP}")
    n = sys.n_states
    init_set = tt.eval_state_space(sys.init, sys.width)
    prop_set = tt.eval_state_space(sys.prop, sys.width)

    visited = init_set.copy()
    pred = np.full(n, -1, dtype=np.int64)
    frontier = np.nonzero(init_set)[0]
    depth = 0
    bad_state = -1
    for s in frontier:
        if not prop_set[s]:
            bad_state = int(s)
            break

    while bad_state < 0 and frontier.size:
        new_mask = np.zeros(n, dtype=bool)
        for s in frontier:
            row = tt.eval_successor_row(sys.trans, int(s), sys.width)
            fresh = row & ~visited & ~new_mask
            if fresh.any():
                idx = np.nonzero(fresh)[0]
                new_mask[idx] = True
                pred[idx] = int(s)
        if not new_mask.any():
            break
        visited |= new_mask
        frontier = np.nonzero(new_mask)[0]
        depth += 1
        for s in frontier:
            if not prop_set[s]:
                bad_state = int(s)
                break

    reachable = frozenset(int(s) for s in np.nonzero(visited)[0])
    if bad_state < 0:
        return ReachReport(reachable, True, None, depth)
    trace = [bad_state]
    while pred[trace[0]] >= 0:
        trace.insert(0, int(pred[trace[0]]))
    return ReachReport(reachable, False, StateSeq(tuple(trace)), depth)


def validate_trace(sys: TransitionSystem, ss: StateSeq) -> bool:
    """A genuine counterexample: starts in init, steps by trans, ends unsafe."""
    states = ss.states
    if not sys.eval_init(states[0]):
        return False
    if any(s >= sys.n_states for s in states):
        return False
    for a, b in zip(states, states[1:]):
        if not sys.eval_trans(a, b):
            return False
    return not sys.eval_prop(states[-1])


def loopfree_safety(sys: TransitionSystem, max_len: int | None = None) -> bool:
    """Every loop-free initial path ends in a safe state.

    Depth-first enumeration with an on-path set; path length is capped by
    ``max_len`` edges (default: the longest loop-free path possible).
    """
    if sys.width > LOOPFREE_WIDTH_CAP:
        raise WidthTooLarge(
            f"width {sys.width} exceeds cap {LOOPFREE_WIDTH_CAP}")
    if max_len is None:
        max_len = sys.n_states - 1
    init_states = np.nonzero(tt.eval_state_space(sys.init, sys.width))[0]
    prop_set = tt.eval_state_space(sys.prop, sys.width)
    succ_cache: dict[int, np.ndarray] = {}

    def successors(s: int) -> np.ndarray:
        row = succ_cache.get(s)
        if row is None:
            row = np.nonzero(tt.eval_successor_row(sys.trans, s, sys.width))[0]
            succ_cache[s] = row
        return row

    on_path = np.zeros(sys.n_states, dtype=bool)
    for s0 in init_states:
        s0 = int(s0)
        if not prop_set[s0]:
            return False
        # Iterative DFS: stack of (state, next successor position).
        stack = [(s0, 0)]
        on_path[s0] = True
        while stack:
            s, i = stack[-1]
            succ = successors(s)
            advanced = False
            while i < succ.size:
                t = int(succ[i])
                i += 1
                if on_path[t] or len(stack) > max_len:
                    continue
                if not prop_set[t]:
                    return False
                stack[-1] = (s, i)
                stack.append((t, 0))
                on_path[t] = True
                advanced = True
                break
            if not advanced:
                stack.pop()
                on_path[s] = False
    return True
