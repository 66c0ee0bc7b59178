"""Exhaustive truth-table evaluation, vectorized with numpy.

These are the independent oracles the test suite and the explicit-state
engine lean on: satisfiability of small formulas and CNFs by enumeration,
and whole-state-space evaluation of system predicates.  Everything here is
deliberately separate from the CDCL solver and the Tseitin converter so the
two sides of every differential check share no code.
"""

from __future__ import annotations

import numpy as np

from . import formula as fm
from .errors import WidthTooLarge

MAX_TABLE_VARS = 24

# Within-word patterns for assignment bits 0..5 of a packed 64-row word.
_WORD_PATTERNS = np.array(
    [sum(1 << r for r in range(64) if (r >> b) & 1) for b in range(6)],
    dtype=np.uint64)


def _var_columns(n: int) -> np.ndarray:
    """Boolean matrix (n, 2**n): column r holds the bits of assignment r."""
    if n > MAX_TABLE_VARS:
        raise WidthTooLarge(f"{n} variables exceed the enumeration cap")
    rows = np.arange(1 << n, dtype=np.uint32)
    return ((rows[None, :] >> np.arange(n, dtype=np.uint32)[:, None]) & 1).astype(bool)


def eval_over_assignments(f: fm.Formula, order: list[tuple[int, int]]) -> np.ndarray:
    """Truth table of a timed formula over the given (bit, step) variables.

    Returns a boolean vector indexed by assignments, where variable i of
    ``order`` is bit i of the assignment index.  Every free variable of the
    formula must be listed.
    """
    cols = _var_columns(len(order))
    pos = {key: i for i, key in enumerate(order)}
    n_rows = cols.shape[1] if order else 1
    memo: dict[fm.Formula, np.ndarray] = {}

    def go(g: fm.Formula) -> np.ndarray:
        got = memo.get(g)
        if got is not None:
            return got
        k = g.kind
        if k == fm.TRUE_K:
            out = np.ones(n_rows, dtype=bool)
        elif k == fm.FALSE_K:
            out = np.zeros(n_rows, dtype=bool)
        elif k == fm.TVAR_K:
            out = cols[pos[(g.bit, g.idx)]]
        elif k == fm.NOT_K:
            out = ~go(g.children[0])
        elif k == fm.AND_K:
            out = go(g.children[0]).copy()
            for c in g.children[1:]:
                out &= go(c)
        elif k == fm.OR_K:
            out = go(g.children[0]).copy()
            for c in g.children[1:]:
                out |= go(c)
        elif k == fm.IMPLIES_K:
            out = ~go(g.children[0]) | go(g.children[1])
        elif k == fm.IFF_K:
            out = go(g.children[0]) == go(g.children[1])
        else:
            raise ValueError("stage formula; instantiate before tabulating")
        memo[g] = out
        return out

    return go(f)


def formula_is_sat(f: fm.Formula) -> bool:
    """Brute-force satisfiability of a timed formula."""
    order = sorted(fm.free_vars(f), key=lambda key: (key[1], key[0]))
    return bool(eval_over_assignments(f, order).any())


def cnf_is_sat(clauses, num_vars: int) -> bool:
    """Brute-force CNF satisfiability over packed 64-assignment words."""
    if num_vars > MAX_TABLE_VARS:
        raise WidthTooLarge(f"{num_vars} variables exceed the enumeration cap")
    if num_vars <= 6:
        rows = np.uint64((1 << (1 << num_vars)) - 1) if num_vars < 6 \
            else np.uint64(0xFFFFFFFFFFFFFFFF)
        acc = np.array([rows], dtype=np.uint64)
        n_words = 1
    else:
        n_words = 1 << (num_vars - 6)
        acc = np.full(n_words, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)

    word_ids = np.arange(n_words, dtype=np.uint64)
    zeros = np.zeros(n_words, dtype=np.uint64)
    ones = np.full(n_words, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)

    def pattern(var: int) -> np.ndarray:
        b = var - 1
        if b < 6:
            return np.full(n_words, _WORD_PATTERNS[b], dtype=np.uint64)
        block = (word_ids >> np.uint64(b - 6)) & np.uint64(1)
        return np.where(block.astype(bool), ones, zeros)

    for clause in clauses:
        if not clause:
            return False
        cw = zeros.copy()
        for lit in clause:
            pat = pattern(abs(lit))
            cw |= pat if lit > 0 else ~pat
        acc &= cw
        if not acc.any():
            return False
    return True


def eval_state_space(f: fm.Formula, width: int) -> np.ndarray:
    """Evaluate a current-state predicate over every state, ascending."""
    timed = fm.instantiate(f, 0)
    order = [(b, 0) for b in range(width)]
    return eval_over_assignments(timed, order)


def eval_successor_row(trans: fm.Formula, state: int, width: int) -> np.ndarray:
    """Evaluate a transition formula with the current state fixed.

    Returns a boolean vector over all candidate successors, ascending.
    """
    timed = fm.instantiate(trans, 0)
    cols = _var_columns(width)
    n_rows = cols.shape[1]
    memo: dict[fm.Formula, np.ndarray] = {}
    true_row = np.ones(n_rows, dtype=bool)
    false_row = np.zeros(n_rows, dtype=bool)

    def go(g: fm.Formula) -> np.ndarray:
        got = memo.get(g)
        if got is not None:
            return got
        k = g.kind
        if k == fm.TRUE_K:
            out = true_row
        elif k == fm.FALSE_K:
            out = false_row
        elif k == fm.TVAR_K:
            if g.idx == 0:
                out = true_row if (state >> g.bit) & 1 else false_row
            else:
                out = cols[g.bit]
        elif k == fm.NOT_K:
            out = ~go(g.children[0])
        elif k == fm.AND_K:
            out = go(g.children[0]).copy()
            for c in g.children[1:]:
                out &= go(c)
        elif k == fm.OR_K:
            out = go(g.children[0]).copy()
            for c in g.children[1:]:
                out |= go(c)
        elif k == fm.IMPLIES_K:
            out = ~go(g.children[0]) | go(g.children[1])
        else:
            out = go(g.children[0]) == go(g.children[1])
        memo[g] = out
        return out

    return go(timed)
