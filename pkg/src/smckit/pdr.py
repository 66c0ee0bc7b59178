"""Simplified property-directed reachability with checkable post-conditions.

The engine keeps a monotone sequence of clause-set frames over-approximating
the states reachable within i steps, with frame 0 pinned to the initial
condition itself.  It repeatedly finds a frontier state with an unsafe
successor, blocks it with a generalized relatively-inductive clause, and
extends/propagates until two adjacent frames coincide.  Every Safe verdict
is re-validated against the five-part true-case post-condition before it is
returned, and every Unsafe trace is replayed against the oracle.

The post-condition checkers exist in two independent flavours: validity
queries through the SAT layer, and plain enumeration of the state space.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from . import formula as fm
from . import oracle
from . import truthtab as tt
from .encoders import Verdict, bounded_query
from .errors import (CertificateParseError, NonClausalProperty, ResourceLimit,
                     SmcError, WidthTooLarge)
from .sat import DEFAULT_BUDGET, ValidityQuery, check_validity, solve
from .system import StateSeq, TransitionSystem

ENUM_WIDTH_CAP = 16
CLAUSAL_ENUM_CAP = 12


@dataclass(frozen=True, order=True)
class Cube:
    """Conjunction of bit literals; a full cube pins one concrete state."""

    literals: tuple[tuple[int, bool], ...]  # (bit, value), sorted by bit

    def __post_init__(self):
        bits = [b for b, _ in self.literals]
        if sorted(set(bits)) != bits:
            raise ValueError("cube literals must be sorted and contradiction-free")

    @classmethod
    def from_state(cls, state: int, width: int) -> "Cube":
        return cls(tuple((b, bool((state >> b) & 1)) for b in range(width)))

    def state(self) -> int:
        return sum(1 << b for b, v in self.literals if v)

    def to_formula(self) -> fm.Formula:
        lits = [fm.cur(b) if v else fm.Not(fm.cur(b)) for b, v in self.literals]
        return fm.conj(lits)


@dataclass(frozen=True, order=True)
class Clause:
    """Disjunction of bit literals; (bit, True) is the positive literal."""

    literals: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        bits = [b for b, _ in self.literals]
        if not bits:
            raise ValueError("empty clause")
        if sorted(set(bits)) != bits:
            raise ValueError("clause literals must be sorted and contradiction-free")

    @classmethod
    def blocking(cls, cube: Cube) -> "Clause":
        return cls(tuple((b, not v) for b, v in cube.literals))

    def to_formula(self) -> fm.Formula:
        lits = [fm.cur(b) if v else fm.Not(fm.cur(b)) for b, v in self.literals]
        return lits[0] if len(lits) == 1 else fm.Or(*lits)

    def negation_formula(self) -> fm.Formula:
        lits = [fm.Not(fm.cur(b)) if v else fm.cur(b) for b, v in self.literals]
        return fm.conj(lits)

    def holds(self, state: int) -> bool:
        return any(bool((state >> b) & 1) == v for b, v in self.literals)


@dataclass(frozen=True)
class FrameSeq:
    """Frames R_0..R_N; index 0 is the init marker, the rest clause sets.

    Clause sets shrink as the index grows (syntactic monotonicity), which
    makes the frame-inclusion part of the post-condition structural.
    """

    frames: tuple[frozenset[Clause], ...]  # frames[0] is ignored (init marker)

    def __post_init__(self):
        if len(self.frames) < 2:
            raise ValueError("need at least frames R_0 and R_1")
        for i in range(1, len(self.frames) - 1):
            if not self.frames[i + 1] <= self.frames[i]:
                raise ValueError(f"frames not monotone at index {i}")

    @property
    def top(self) -> int:
        return len(self.frames) - 1

    def clauses_at(self, i: int) -> frozenset[Clause]:
        if i == 0:
            raise ValueError("frame 0 denotes the initial condition, not clauses")
        return self.frames[i]

    def frame_formula(self, i: int, sys: TransitionSystem) -> fm.Formula:
        if i == 0:
            return sys.init
        clauses = sorted(self.frames[min(i, self.top)])
        return fm.conj([c.to_formula() for c in clauses])

    def with_clause(self, i: int, clause: Clause) -> "FrameSeq":
        """Add a clause to frames 1..i+1 (refinement after blocking at i)."""
        if i + 1 > self.top:
            raise ValueError(f"frame {i + 1} not represented")
        new = list(self.frames)
        for j in range(1, i + 2):
            new[j] = new[j] | {clause}
        return FrameSeq(tuple(new))

    def with_new_top(self, clauses: frozenset[Clause]) -> "FrameSeq":
        return FrameSeq(self.frames + (clauses,))


# --- clausal rendering of the property --------------------------------------

def prop_clauses(sys: TransitionSystem) -> frozenset[Clause]:
    """Render prop as a set of clauses without auxiliary variables.

    Structural extraction handles formulas that already are conjunctions of
    disjunctions of literals; anything else falls back to an exact maxterm
    expansion when the width permits, and is rejected otherwise.
    """
    folded = fm.fold_constants(sys.prop)
    if folded is fm.TRUE:
        return frozenset()
    structural = _structural_clauses(folded)
    if structural is not None:
        return structural
    if sys.width > CLAUSAL_ENUM_CAP:
        raise NonClausalProperty(
            f"property of {sys.name} is not a conjunction of clauses")
    table = tt.eval_state_space(sys.prop, sys.width)
    out = set()
    for s in np.nonzero(~table)[0]:
        s = int(s)
        out.add(Clause(tuple((b, not bool((s >> b) & 1))
                             for b in range(sys.width))))
    if not out and folded is fm.FALSE:
        raise NonClausalProperty("property is identically false over width 0")
    return frozenset(out)


def _literal_of(f: fm.Formula) -> tuple[int, bool] | None:
    if f.kind == fm.VAR_K and f.idx == fm.CURRENT:
        return (f.bit, True)
    if (f.kind == fm.NOT_K and f.children[0].kind == fm.VAR_K
            and f.children[0].idx == fm.CURRENT):
        return (f.children[0].bit, False)
    return None


def _disjunction_clause(f: fm.Formula) -> Clause | None:
    lits = []
    stack = [f]
    while stack:
        g = stack.pop()
        if g.kind == fm.OR_K:
            stack.extend(reversed(g.children))
            continue
        lit = _literal_of(g)
        if lit is None:
            return None
        lits.append(lit)
    by_bit: dict[int, bool] = {}
    for b, v in sorted(lits):
        if b in by_bit and by_bit[b] != v:
            return None  # tautological clause; caller falls back
        by_bit[b] = v
    return Clause(tuple(sorted(by_bit.items())))


def _structural_clauses(f: fm.Formula) -> frozenset[Clause] | None:
    conjuncts = []
    stack = [f]
    while stack:
        g = stack.pop()
        if g.kind == fm.AND_K:
            stack.extend(reversed(g.children))
            continue
        conjuncts.append(g)
    out = set()
    for g in conjuncts:
        clause = _disjunction_clause(g)
        if clause is None:
            return None
        out.add(clause)
    return frozenset(out)


# --- engine steps ------------------------------------------------------------

def init_frames(sys: TransitionSystem) -> FrameSeq:
    """R_0 = init marker, R_1 = the property's clauses."""
    return FrameSeq((frozenset(), prop_clauses(sys)))


def _solve_sat(parts: list[fm.Formula], width: int, steps: int, budget: int):
    cnf = fm.to_cnf(fm.conj(parts), width=width, steps=steps)
    result = solve(cnf, conflict_budget=budget)
    if not result.sat:
        return None
    return fm.decode_window(result.model, cnf.var_map, width, steps)


def find_bad_cube(frames: FrameSeq, k: int, sys: TransitionSystem, *,
                  conflict_budget: int = DEFAULT_BUDGET) -> Cube | None:
    """A frontier state in R_k with an unsafe successor, if any."""
    found = _find_bad_with_successor(frames, k, sys, conflict_budget)
    return None if found is None else found[0]


def _find_bad_with_successor(frames: FrameSeq, k: int, sys: TransitionSystem,
                             budget: int):
    parts = [fm.instantiate(frames.frame_formula(k, sys), 0),
             fm.instantiate(sys.trans, 0),
             fm.Not(fm.instantiate(sys.prop, 1))]
    window = _solve_sat(parts, sys.width, 1, budget)
    if window is None:
        return None
    return Cube.from_state(window[0], sys.width), window[1]


def generalize(frames: FrameSeq, i: int, cube: Cube, sys: TransitionSystem, *,
               conflict_budget: int = DEFAULT_BUDGET) -> Clause:
    """Shrink the blocking clause while it stays relatively inductive.

    Literals are dropped greedily in ascending bit order; each drop must
    preserve both the consecution query relative to R_i and initiation
    (every initial state satisfies the clause).  Initiation is not part of
    the textbook step but without it a refined frame could exclude initial
    states.
    """
    lits = list(Clause.blocking(cube).literals)
    kept: list[tuple[int, bool]] = list(lits)
    for lit in lits:
        if len(kept) == 1:
            break
        candidate = [l for l in kept if l != lit]
        clause = Clause(tuple(candidate))
        if _initiation_violated(clause, sys, conflict_budget):
            continue
        if _consecution_violated(frames, i, clause, sys, conflict_budget):
            continue
        kept = candidate
    return Clause(tuple(kept))


def _initiation_violated(clause: Clause, sys: TransitionSystem,
                         budget: int) -> bool:
    parts = [fm.instantiate(sys.init, 0),
             fm.instantiate(clause.negation_formula(), 0)]
    return _solve_sat(parts, sys.width, 0, budget) is not None


def _consecution_violated(frames: FrameSeq, i: int, clause: Clause,
                          sys: TransitionSystem, budget: int) -> bool:
    parts = [fm.instantiate(frames.frame_formula(i, sys), 0),
             fm.instantiate(clause.to_formula(), 0),
             fm.instantiate(sys.trans, 0),
             fm.instantiate(clause.negation_formula(), 1)]
    return _solve_sat(parts, sys.width, 1, budget) is not None


def refine(frames: FrameSeq, i: int, clause: Clause) -> FrameSeq:
    """Add the clause through frame i+1; frame 0 is never touched."""
    return frames.with_clause(i, clause)


def converged(frames: FrameSeq, k: int, sys: TransitionSystem, *,
              conflict_budget: int = DEFAULT_BUDGET) -> bool:
    """Adjacent frames k and k+1 denote the same states.

    Decided semantically by two validity queries; for k >= 1 the syntactic
    subset test is evaluated too and cross-checked (subset implies
    equivalence under the monotone representation).
    """
    if k + 1 > frames.top:
        raise ValueError(f"frame {k + 1} not represented")
    semantic = (_implies(frames, k, k + 1, sys, conflict_budget)
                and _implies(frames, k + 1, k, sys, conflict_budget))
    if k >= 1:
        syntactic = frames.clauses_at(k) <= frames.clauses_at(k + 1)
        if syntactic and not semantic:
            raise SmcError("internal error: syntactic convergence without "
                           "semantic equivalence")
    return semantic


def _implies(frames: FrameSeq, i: int, j: int, sys: TransitionSystem,
             budget: int) -> bool:
    parts = [fm.instantiate(frames.frame_formula(i, sys), 0),
             fm.Not(fm.instantiate(frames.frame_formula(j, sys), 0))]
    return _solve_sat(parts, sys.width, 0, budget) is None


# --- post-condition checkers -------------------------------------------------

@dataclass
class ItemResult:
    passed: bool
    witnesses: list = field(default_factory=list)


@dataclass
class PostReport:
    items: dict[str, ItemResult]
    e_exists: bool | None = None  # does any adjacent pair up to k coincide?

    @property
    def all_passed(self) -> bool:
        return all(item.passed for item in self.items.values())


def check_true_postcondition(frames: FrameSeq, k: int, sys: TransitionSystem, *,
                             conflict_budget: int = DEFAULT_BUDGET,
                             method: str = "solver") -> PostReport:
    """The five-part certificate check for a Safe verdict.

    Frames beyond the represented range count as copies of R_{k+1}; the
    represented range must cover 0..k+1.  ``method`` selects the validity
    backend: "solver" discharges queries through the SAT layer, "enum"
    enumerates states directly.
    """
    if k + 1 > frames.top:
        raise ValueError(f"frames must cover 0..{k + 1}")
    if method == "enum":
        return _check_true_enum(frames, k, sys)

    def valid(parts, steps) -> tuple[bool, list[int] | None]:
        window = _solve_sat(parts, sys.width, steps, conflict_budget)
        return (window is None), window

    items = {name: ItemResult(True) for name in "abcde"}
    rng = range(k + 2)
    for i in rng:
        fi = fm.instantiate(frames.frame_formula(i, sys), 0)
        ok, w = valid([fm.instantiate(sys.init, 0), fm.Not(fi)], 0)
        if not ok:
            items["a"].passed = False
            items["a"].witnesses.append((i, w[0]))
        ok, w = valid([fi, fm.Not(fm.instantiate(sys.prop, 0))], 0)
        if not ok:
            items["b"].passed = False
            items["b"].witnesses.append((i, w[0]))
    for i in range(k + 1):
        fi = fm.instantiate(frames.frame_formula(i, sys), 0)
        fj = fm.instantiate(frames.frame_formula(i + 1, sys), 0)
        ok, w = valid([fi, fm.Not(fj)], 0)
        if not ok:
            items["c"].passed = False
            items["c"].witnesses.append((i, w[0]))
        fj_next = fm.instantiate(frames.frame_formula(i + 1, sys), 1)
        ok, w = valid([fi, fm.instantiate(sys.trans, 0), fm.Not(fj_next)], 1)
        if not ok:
            items["d"].passed = False
            items["d"].witnesses.append((i, w[0], w[1]))
    fk = fm.instantiate(frames.frame_formula(k, sys), 0)
    fk1 = fm.instantiate(frames.frame_formula(k + 1, sys), 0)
    for parts in ([fk, fm.Not(fk1)], [fk1, fm.Not(fk)]):
        ok, w = valid(parts, 0)
        if not ok:
            items["e"].passed = False
            items["e"].witnesses.append((k, w[0]))

    e_exists = any(
        converged(frames, i, sys, conflict_budget=conflict_budget)
        for i in range(min(k, frames.top - 1) + 1))
    return PostReport(items, e_exists)


def _frame_sets(frames: FrameSeq, upto: int, sys: TransitionSystem):
    return [tt.eval_state_space(frames.frame_formula(i, sys), sys.width)
            for i in range(upto + 1)]


def _check_true_enum(frames: FrameSeq, k: int, sys: TransitionSystem) -> PostReport:
    if sys.width > ENUM_WIDTH_CAP:
        raise WidthTooLarge(f"width {sys.width} too large for enumeration")
    init_set = tt.eval_state_space(sys.init, sys.width)
    prop_set = tt.eval_state_space(sys.prop, sys.width)
    sets = _frame_sets(frames, k + 1, sys)
    items = {name: ItemResult(True) for name in "abcde"}
    for i, ri in enumerate(sets):
        bad = init_set & ~ri
        if bad.any():
            items["a"].passed = False
            items["a"].witnesses.append((i, int(np.nonzero(bad)[0][0])))
        bad = ri & ~prop_set
        if bad.any():
            items["b"].passed = False
            items["b"].witnesses.append((i, int(np.nonzero(bad)[0][0])))
    for i in range(k + 1):
        bad = sets[i] & ~sets[i + 1]
        if bad.any():
            items["c"].passed = False
            items["c"].witnesses.append((i, int(np.nonzero(bad)[0][0])))
        for s in np.nonzero(sets[i])[0]:
            row = tt.eval_successor_row(sys.trans, int(s), sys.width)
            out = row & ~sets[i + 1]
            if out.any():
                items["d"].passed = False
                items["d"].witnesses.append(
                    (i, int(s), int(np.nonzero(out)[0][0])))
                break
    diff = sets[k] != sets[k + 1]
    if diff.any():
        items["e"].passed = False
        items["e"].witnesses.append((k, int(np.nonzero(diff)[0][0])))
    e_exists = any((sets[i] == sets[i + 1]).all() for i in range(k + 1))
    return PostReport(items, e_exists)


def check_false_postcondition(sys: TransitionSystem, k: int, *,
                              conflict_budget: int = DEFAULT_BUDGET,
                              method: str = "solver") -> PostReport:
    """Necessary conditions for safety: depth 0, depth 1, and depth k paths."""
    items = {name: ItemResult(True) for name in "abc"}
    if method == "enum":
        if sys.width > ENUM_WIDTH_CAP:
            raise WidthTooLarge(f"width {sys.width} too large for enumeration")
        init_set = tt.eval_state_space(sys.init, sys.width)
        prop_set = tt.eval_state_space(sys.prop, sys.width)
        bad = init_set & ~prop_set
        if bad.any():
            items["a"].passed = False
            items["a"].witnesses.append(int(np.nonzero(bad)[0][0]))
        for s in np.nonzero(init_set)[0]:
            row = tt.eval_successor_row(sys.trans, int(s), sys.width)
            out = row & ~prop_set
            if out.any():
                items["b"].passed = False
                items["b"].witnesses.append((int(s), int(np.nonzero(out)[0][0])))
                break
        layer = init_set.copy()
        for _ in range(k):
            nxt_layer = np.zeros_like(layer)
            for s in np.nonzero(layer)[0]:
                nxt_layer |= tt.eval_successor_row(sys.trans, int(s), sys.width)
            layer = nxt_layer
        bad = layer & ~prop_set
        if bad.any():
            items["c"].passed = False
            items["c"].witnesses.append(int(np.nonzero(bad)[0][0]))
        return PostReport(items)

    w = _solve_sat([fm.instantiate(sys.init, 0),
                    fm.Not(fm.instantiate(sys.prop, 0))],
                   sys.width, 0, conflict_budget)
    if w is not None:
        items["a"].passed = False
        items["a"].witnesses.append(w[0])
    w = _solve_sat([fm.instantiate(sys.init, 0), fm.instantiate(sys.trans, 0),
                    fm.Not(fm.instantiate(sys.prop, 1))],
                   sys.width, 1, conflict_budget)
    if w is not None:
        items["b"].passed = False
        items["b"].witnesses.append((w[0], w[1]))
    outcome = check_validity(bounded_query(sys, k), sys.width,
                             conflict_budget=conflict_budget)
    if not outcome.valid:
        items["c"].passed = False
        items["c"].witnesses.append(outcome.witness.states[-1])
    return PostReport(items)


# --- the main loop ------------------------------------------------------------

@dataclass(order=True)
class _Obligation:
    level: int
    seq: int
    cube: Cube = field(compare=False)
    parent: "_Obligation | None" = field(compare=False, default=None)
    succ: int | None = field(compare=False, default=None)


def run_pdr(sys: TransitionSystem, *, k_max: int = 64,
            conflict_budget: int = DEFAULT_BUDGET) -> Verdict:
    """Frame refinement until convergence or a counterexample chain.

    Safe verdicts carry the frames and have already passed the true-case
    post-condition at the returned k; Unsafe traces have been replayed
    against the oracle.
    """
    try:
        return _run_pdr(sys, k_max, conflict_budget)
    except ResourceLimit:
        return Verdict.unknown("budget")


def _run_pdr(sys: TransitionSystem, k_max: int, budget: int) -> Verdict:
    # Depth 0 and depth 1 counterexamples, before any frame work.
    w = _solve_sat([fm.instantiate(sys.init, 0),
                    fm.Not(fm.instantiate(sys.prop, 0))], sys.width, 0, budget)
    if w is not None:
        return _unsafe(sys, [w[0]])
    w = _solve_sat([fm.instantiate(sys.init, 0), fm.instantiate(sys.trans, 0),
                    fm.Not(fm.instantiate(sys.prop, 1))], sys.width, 1, budget)
    if w is not None:
        return _unsafe(sys, [w[0], w[1]])

    frames = init_frames(sys)
    while True:
        top = frames.top
        while True:
            found = _find_bad_with_successor(frames, top, sys, budget)
            if found is None:
                break
            cube, succ = found
            frames, cex = _block(frames, cube, succ, top, sys, budget)
            if cex is not None:
                return _unsafe(sys, cex)

        k = top - 1
        if converged(frames, k, sys, conflict_budget=budget):
            report = check_true_postcondition(frames, k, sys,
                                              conflict_budget=budget)
            if not report.all_passed:
                raise SmcError("internal error: certificate rejected at "
                               f"k={k}: {report.items}")
            return Verdict.safe(k, certificate=frames)
        if k >= k_max:
            return Verdict.unknown("k-max exhausted")

        frames = frames.with_new_top(prop_clauses(sys))
        frames = _propagate(frames, sys, budget)


def _block(frames: FrameSeq, cube: Cube, succ: int, level: int,
           sys: TransitionSystem, budget: int):
    """Discharge one bad cube; returns (frames, cex-states-or-None)."""
    heap: list[_Obligation] = []
    seq = 0
    heapq.heappush(heap, _Obligation(level, seq, cube, None, succ))
    while heap:
        ob = heapq.heappop(heap)
        window = _solve_sat(
            [fm.instantiate(frames.frame_formula(ob.level - 1, sys), 0),
             fm.instantiate(Clause.blocking(ob.cube).to_formula(), 0),
             fm.instantiate(sys.trans, 0),
             fm.instantiate(ob.cube.to_formula(), 1)],
            sys.width, 1, budget)
        if window is None:
            clause = generalize(frames, ob.level - 1, ob.cube, sys,
                                conflict_budget=budget)
            frames = refine(frames, ob.level - 1, clause)
            continue
        pred = window[0]
        if sys.eval_init(pred):
            states = [pred]
            walk: _Obligation | None = ob
            while walk is not None:
                states.append(walk.cube.state())
                if walk.parent is None and walk.succ is not None:
                    states.append(walk.succ)
                walk = walk.parent
            return frames, states
        seq += 1
        heapq.heappush(heap, _Obligation(ob.level - 1, seq,
                                         Cube.from_state(pred, sys.width), ob))
        seq += 1
        heapq.heappush(heap, _Obligation(ob.level, seq, ob.cube, ob.parent,
                                         ob.succ))
    return frames, None


def _propagate(frames: FrameSeq, sys: TransitionSystem, budget: int) -> FrameSeq:
    """Push clauses forward where consecution already holds."""
    for i in range(1, frames.top):
        for clause in sorted(frames.clauses_at(i) - frames.clauses_at(i + 1)):
            parts = [fm.instantiate(frames.frame_formula(i, sys), 0),
                     fm.instantiate(sys.trans, 0),
                     fm.instantiate(clause.negation_formula(), 1)]
            if _solve_sat(parts, sys.width, 1, budget) is None:
                new = list(frames.frames)
                new[i + 1] = new[i + 1] | {clause}
                frames = FrameSeq(tuple(new))
    return frames


def _unsafe(sys: TransitionSystem, states: list[int]) -> Verdict:
    trace = StateSeq(tuple(states))
    if not oracle.validate_trace(sys, trace):
        raise SmcError("internal error: counterexample trace rejected")
    return Verdict.unsafe(trace)


# --- certificate serialization ------------------------------------------------

def format_frames(frames: FrameSeq) -> str:
    """Serialize frames: ``frame <i>`` headers over DIMACS-style literals."""
    lines = []
    for i in range(frames.top + 1):
        lines.append(f"frame {i}")
        if i == 0:
            continue
        for clause in sorted(frames.clauses_at(i)):
            lits = [(b + 1) if v else -(b + 1) for b, v in clause.literals]
            lines.append(" ".join(str(l) for l in lits) + " 0")
    return "\n".join(lines) + "\n"


def parse_frames(text: str, width: int) -> FrameSeq:
    """Parse the certificate format; frame 0 must stay the init marker."""
    frames: list[set[Clause]] = []
    current: set[Clause] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("frame"):
            fields = line.split()
            if len(fields) != 2 or not fields[1].isdigit():
                raise CertificateParseError("malformed frame header", lineno, 1)
            index = int(fields[1])
            if index != len(frames):
                raise CertificateParseError(
                    f"expected frame {len(frames)}, got {index}", lineno, 1)
            current = set()
            frames.append(current)
            continue
        if current is None:
            raise CertificateParseError("clause before any frame header",
                                        lineno, 1)
        try:
            lits = [int(f) for f in line.split()]
        except ValueError:
            raise CertificateParseError(f"bad literal line {line!r}", lineno, 1)
        if not lits or lits[-1] != 0:
            raise CertificateParseError("clause line must end with 0", lineno, 1)
        pairs = []
        for lit in lits[:-1]:
            bit = abs(lit) - 1
            if lit == 0 or bit >= width:
                raise CertificateParseError(f"literal {lit} out of range",
                                            lineno, 1)
            pairs.append((bit, lit > 0))
        try:
            clause = Clause(tuple(sorted(pairs)))
        except ValueError as exc:
            raise CertificateParseError(str(exc), lineno, 1)
        if len(frames) == 1:
            raise CertificateParseError("frame 0 denotes init and takes no "
                                        "clauses", lineno, 1)
        current.add(clause)
    if len(frames) < 2:
        raise CertificateParseError("certificate needs frames 0 and 1", 0, 0)
    try:
        return FrameSeq(tuple(frozenset(f) for f in frames))
    except ValueError as exc:
        raise CertificateParseError(str(exc), 0, 0)
