"""Boolean formulas over bit-vector states.

A formula is an immutable expression tree whose leaves are either constants
or state bits.  Bits come in two flavours: *stage* variables (``cur``/``nxt``)
used to write transition systems, and *timed* variables (``at``) produced by
unrolling a stage formula onto an absolute step of an execution window.
Timed formulas are what the CNF converter and the SAT layer consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BitOutOfRange, MissingNextState, IndexOutOfWindow

# Node kinds.
TRUE_K = "true"
FALSE_K = "false"
VAR_K = "var"  # stage variable: idx 0 = current, 1 = next
TVAR_K = "tvar"  # timed variable: idx = absolute step
NOT_K = "not"
AND_K = "and"
OR_K = "or"
IMPLIES_K = "implies"
IFF_K = "iff"

CURRENT = 0
NEXT = 1


class Formula:
    """Immutable formula node; structural equality, precomputed hash."""

    __slots__ = ("kind", "bit", "idx", "children", "_hash")

    def __init__(self, kind: str, bit: int = -1, idx: int = -1,
                 children: tuple["Formula", ...] = ()):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "bit", bit)
        object.__setattr__(self, "idx", idx)
        object.__setattr__(self, "children", children)
        object.__setattr__(
            self, "_hash",
            hash((kind, bit, idx) + tuple(hash(c) for c in children)))

    def __setattr__(self, name, value):
        raise AttributeError("Formula nodes are immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        if self._hash != other._hash:
            return False
        return (self.kind == other.kind and self.bit == other.bit
                and self.idx == other.idx and self.children == other.children)

    def __repr__(self) -> str:
        return f"Formula({to_text(self)!r})"


TRUE = Formula(TRUE_K)
FALSE = Formula(FALSE_K)


def cur(bit: int) -> Formula:
    """Current-state bit."""
    if bit < 0:
        raise BitOutOfRange(f"negative bit index {bit}")
    return Formula(VAR_K, bit=bit, idx=CURRENT)


def nxt(bit: int) -> Formula:
    """Next-state bit."""
    if bit < 0:
        raise BitOutOfRange(f"negative bit index {bit}")
    return Formula(VAR_K, bit=bit, idx=NEXT)


def at(bit: int, step: int) -> Formula:
    """Bit of the state at an absolute step of an execution window."""
    if bit < 0:
        raise BitOutOfRange(f"negative bit index {bit}")
    if step < 0:
        raise IndexOutOfWindow(f"negative step {step}")
    return Formula(TVAR_K, bit=bit, idx=step)


def Not(f: Formula) -> Formula:
    return Formula(NOT_K, children=(f,))


def And(*fs: Formula) -> Formula:
    if not fs:
        raise ValueError("And requires at least one operand")
    return Formula(AND_K, children=tuple(fs))


def Or(*fs: Formula) -> Formula:
    if not fs:
        raise ValueError("Or requires at least one operand")
    return Formula(OR_K, children=tuple(fs))


def Implies(a: Formula, b: Formula) -> Formula:
    return Formula(IMPLIES_K, children=(a, b))


def Iff(a: Formula, b: Formula) -> Formula:
    return Formula(IFF_K, children=(a, b))


def conj(fs: list[Formula]) -> Formula:
    """And over a list, collapsing the empty and singleton cases."""
    if not fs:
        return TRUE
    if len(fs) == 1:
        return fs[0]
    return And(*fs)


def to_text(f: Formula) -> str:
    """Render in the input-DSL syntax (timed bits print as b<bit>@<step>)."""
    k = f.kind
    if k == TRUE_K:
        return "true"
    if k == FALSE_K:
        return "false"
    if k == VAR_K:
        return f"b{f.bit}'" if f.idx == NEXT else f"b{f.bit}"
    if k == TVAR_K:
        return f"b{f.bit}@{f.idx}"
    if k == NOT_K:
        return f"!{_paren(f.children[0], 4)}"
    if k == AND_K:
        return " & ".join(_paren(c, 3) for c in f.children)
    if k == OR_K:
        return " | ".join(_paren(c, 2) for c in f.children)
    if k == IMPLIES_K:
        return f"{_paren(f.children[0], 1)} -> {_paren(f.children[1], 0)}"
    return f"{_paren(f.children[0], 0)} <-> {_paren(f.children[1], 0)}"


_PREC = {TRUE_K: 5, FALSE_K: 5, VAR_K: 5, TVAR_K: 5, NOT_K: 4,
         AND_K: 3, OR_K: 2, IMPLIES_K: 1, IFF_K: 0}


def _paren(f: Formula, need: int) -> str:
    text = to_text(f)
    return f"({text})" if _PREC[f.kind] < need else text


def eval_formula(f: Formula, current: int, next_state: int | None = None,
                 *, width: int) -> bool:
    """Evaluate a stage formula at a concrete state (pair).

    Raises MissingNextState when a next-state bit occurs and no successor was
    supplied, and BitOutOfRange when a bit index falls outside the width.
    """
    k = f.kind
    if k == TRUE_K:
        return True
    if k == FALSE_K:
        return False
    if k == VAR_K:
        if f.bit >= width:
            raise BitOutOfRange(f"bit {f.bit} out of range for width {width}")
        if f.idx == NEXT:
            if next_state is None:
                raise MissingNextState(f"b{f.bit}' evaluated without a successor")
            return bool((next_state >> f.bit) & 1)
        return bool((current >> f.bit) & 1)
    if k == TVAR_K:
        raise ValueError("timed formula passed to eval_formula; use eval_timed")
    if k == NOT_K:
        return not eval_formula(f.children[0], current, next_state, width=width)
    if k == AND_K:
        return all(eval_formula(c, current, next_state, width=width)
                   for c in f.children)
    if k == OR_K:
        return any(eval_formula(c, current, next_state, width=width)
                   for c in f.children)
    if k == IMPLIES_K:
        a, b = f.children
        return (not eval_formula(a, current, next_state, width=width)
                or eval_formula(b, current, next_state, width=width))
    a, b = f.children
    return (eval_formula(a, current, next_state, width=width)
            == eval_formula(b, current, next_state, width=width))


def eval_timed(f: Formula, states, *, width: int, base: int = 0) -> bool:
    """Evaluate a timed formula against a window of states.

    ``states[t - base]`` supplies the state for absolute step ``t``.
    """
    k = f.kind
    if k == TRUE_K:
        return True
    if k == FALSE_K:
        return False
    if k == TVAR_K:
        if f.bit >= width:
            raise BitOutOfRange(f"bit {f.bit} out of range for width {width}")
        pos = f.idx - base
        if pos < 0 or pos >= len(states):
            raise IndexOutOfWindow(f"step {f.idx} outside window")
        return bool((states[pos] >> f.bit) & 1)
    if k == VAR_K:
        raise ValueError("stage formula passed to eval_timed; use eval_formula")
    if k == NOT_K:
        return not eval_timed(f.children[0], states, width=width, base=base)
    if k == AND_K:
        return all(eval_timed(c, states, width=width, base=base)
                   for c in f.children)
    if k == OR_K:
        return any(eval_timed(c, states, width=width, base=base)
                   for c in f.children)
    if k == IMPLIES_K:
        a, b = f.children
        return (not eval_timed(a, states, width=width, base=base)
                or eval_timed(b, states, width=width, base=base))
    a, b = f.children
    return (eval_timed(a, states, width=width, base=base)
            == eval_timed(b, states, width=width, base=base))


def instantiate(f: Formula, t: int) -> Formula:
    """Unroll a stage formula onto absolute steps: cur -> t, nxt -> t + 1.

    Distributes over every connective; shared subtrees stay shared.
    """
    if t < 0:
        raise IndexOutOfWindow(f"negative step {t}")
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        got = memo.get(g)
        if got is not None:
            return got
        k = g.kind
        if k in (TRUE_K, FALSE_K, TVAR_K):
            out = g
        elif k == VAR_K:
            out = at(g.bit, t + 1 if g.idx == NEXT else t)
        else:
            out = Formula(k, children=tuple(go(c) for c in g.children))
        memo[g] = out
        return out

    return go(f)


def free_vars(f: Formula) -> set[tuple[int, int]]:
    """Timed variables of a formula as (bit, step) pairs."""
    out: set[tuple[int, int]] = set()
    seen: set[int] = set()

    def go(g: Formula) -> None:
        if id(g) in seen:
            return
        seen.add(id(g))
        if g.kind == TVAR_K:
            out.add((g.bit, g.idx))
        for c in g.children:
            go(c)

    go(f)
    return out


def fold_constants(f: Formula) -> Formula:
    """Propagate constants; the result is constant-free or a constant."""
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        got = memo.get(g)
        if got is not None:
            return got
        k = g.kind
        if k in (TRUE_K, FALSE_K, VAR_K, TVAR_K):
            out = g
        elif k == NOT_K:
            c = go(g.children[0])
            if c is TRUE:
                out = FALSE
            elif c is FALSE:
                out = TRUE
            else:
                out = Formula(NOT_K, children=(c,))
        elif k in (AND_K, OR_K):
            absorb, neutral = (FALSE, TRUE) if k == AND_K else (TRUE, FALSE)
            kept: list[Formula] = []
            short = False
            for raw in g.children:
                c = go(raw)
                if c is absorb:
                    short = True
                    break
                if c is not neutral:
                    kept.append(c)
            if short:
                out = absorb
            elif not kept:
                out = neutral
            elif len(kept) == 1:
                out = kept[0]
            else:
                out = Formula(k, children=tuple(kept))
        elif k == IMPLIES_K:
            a, b = (go(c) for c in g.children)
            if a is FALSE or b is TRUE:
                out = TRUE
            elif a is TRUE:
                out = b
            elif b is FALSE:
                out = Formula(NOT_K, children=(a,))
            else:
                out = Formula(IMPLIES_K, children=(a, b))
        else:
            a, b = (go(c) for c in g.children)
            if a is TRUE:
                out = b
            elif b is TRUE:
                out = a
            elif a is FALSE:
                out = TRUE if b is FALSE else Formula(NOT_K, children=(b,))
            elif b is FALSE:
                out = Formula(NOT_K, children=(a,))
            else:
                out = Formula(IFF_K, children=(a, b))
        memo[g] = out
        return out

    return go(f)


@dataclass(frozen=True, eq=False)
class CnfFormula:
    """Clause set in DIMACS conventions plus the timed-bit variable map.

    ``var_map`` sends (bit, step) to a positive DIMACS variable; auxiliary
    Tseitin variables occupy the indices above the mapped ones.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    var_map: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        for clause in self.clauses:
            lits = set(clause)
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")
                if -lit in lits:
                    raise ValueError(f"clause {clause} contains {lit} and {-lit}")
        if len(set(self.var_map.values())) != len(self.var_map):
            raise ValueError("var_map is not injective")


def state_var_map(width: int, steps: int) -> dict[tuple[int, int], int]:
    """Deterministic DIMACS numbering for every (bit, step) of a window."""
    return {(b, t): t * width + b + 1
            for t in range(steps + 1) for b in range(width)}


def to_cnf(f: Formula, *, width: int, steps: int) -> CnfFormula:
    """Tseitin conversion of a timed formula; equisatisfiable by construction.

    Plain both-polarity encoding: every connective gets its defining clauses
    regardless of polarity.  Negations reuse the child literal.  The variable
    map always covers the whole (bit, step) grid so that witness decoding can
    default unconstrained bits to false.
    """
    var_map = state_var_map(width, steps)
    for bit, step in free_vars(f):
        if bit >= width:
            raise BitOutOfRange(f"bit {bit} out of range for width {width}")
        if step > steps:
            raise IndexOutOfWindow(f"step {step} beyond window {steps}")

    folded = fold_constants(f)
    num_state = width * (steps + 1)
    if folded is TRUE:
        return CnfFormula(num_state, (), var_map)
    if folded is FALSE:
        # One excluded assignment per clause is impossible without literals;
        # encode falsity with a fresh variable forced both ways.
        v = num_state + 1
        return CnfFormula(v, ((v,), (-v,)), var_map)

    clauses: list[tuple[int, ...]] = []
    lit_of: dict[Formula, int] = {}
    counter = [num_state]

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    def emit(*lits: int) -> None:
        # Drop tautological clauses and duplicate literals.
        out: list[int] = []
        seen: set[int] = set()
        for lit in lits:
            if -lit in seen:
                return
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        clauses.append(tuple(out))

    def encode(g: Formula) -> int:
        got = lit_of.get(g)
        if got is not None:
            return got
        k = g.kind
        if k == TVAR_K:
            lit = var_map[(g.bit, g.idx)]
        elif k == VAR_K:
            raise ValueError("stage formula passed to to_cnf; instantiate first")
        elif k == NOT_K:
            lit = -encode(g.children[0])
        elif k == AND_K:
            lit = fresh()
            kids = [encode(c) for c in g.children]
            for c in kids:
                emit(-lit, c)
            emit(lit, *(-c for c in kids))
        elif k == OR_K:
            lit = fresh()
            kids = [encode(c) for c in g.children]
            for c in kids:
                emit(lit, -c)
            emit(-lit, *kids)
        elif k == IMPLIES_K:
            lit = fresh()
            a, b = (encode(c) for c in g.children)
            emit(-lit, -a, b)
            emit(lit, a)
            emit(lit, -b)
        elif k == IFF_K:
            lit = fresh()
            a, b = (encode(c) for c in g.children)
            emit(-lit, -a, b)
            emit(-lit, a, -b)
            emit(lit, a, b)
            emit(lit, -a, -b)
        else:  # pragma: no cover - constants removed by fold_constants
            raise AssertionError(k)
        lit_of[g] = lit
        return lit

    root = encode(folded)
    emit(root)
    return CnfFormula(counter[0], tuple(clauses), var_map)


def decode_window(model, var_map: dict[tuple[int, int], int],
                  width: int, steps: int) -> list[int]:
    """Read a state window out of a SAT model; unassigned bits become false."""
    states = []
    for t in range(steps + 1):
        value = 0
        for b in range(width):
            v = var_map[(b, t)]
            if v <= len(model) and model[v - 1]:
                value |= 1 << b
        states.append(value)
    return states
