"""Random system generation and the differential soundness harness.

The harness is the empirical shadow of the soundness guarantees: every Safe
verdict any engine produces must agree with brute-force reachability, and
every Unsafe verdict must come with a replayable trace.  A violation is a
build-breaking defect, never a statistic.  The sequence-lemma suite checks
the executable path predicates against randomly generated transition
formulas and windows.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import formula as fm
from . import oracle
from . import system as sys_mod
from .encoders import TRUE_ENCODERS, Verdict, bounded_query, run_unbounded
from .errors import ResourceLimit
from .pdr import run_pdr
from .sat import check_validity
from .system import StateSeq, TransitionSystem

ENGINE_NAMES = ("forward", "backward", "sheeran1", "kinduction", "pdr", "bmc")


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 42
    count: int = 500
    width_min: int = 2
    width_max: int = 6
    depth: int = 3  # formula depth bound for init/prop
    slack_guard_bits: int = 3  # literals guarding the one relational bit


# --- random formulas ---------------------------------------------------------

def rand_formula(rng: random.Random, width: int, depth: int, *,
                 allow_next: bool = False, p_leaf: float = 0.35) -> fm.Formula:
    """Random shallow formula over the given bits."""
    if depth == 0 or rng.random() < p_leaf:
        r = rng.random()
        if r < 0.04:
            return fm.TRUE
        if r < 0.08:
            return fm.FALSE
        bit = rng.randrange(width)
        leaf = fm.nxt(bit) if allow_next and rng.random() < 0.5 else fm.cur(bit)
        return fm.Not(leaf) if rng.random() < 0.4 else leaf
    op = rng.choices(("not", "and", "or", "implies", "iff"),
                     weights=(15, 30, 30, 12, 13))[0]
    if op == "not":
        return fm.Not(rand_formula(rng, width, depth - 1,
                                   allow_next=allow_next, p_leaf=p_leaf))
    if op in ("and", "or"):
        n = rng.randint(2, 3)
        kids = tuple(rand_formula(rng, width, depth - 1,
                                  allow_next=allow_next, p_leaf=p_leaf)
                     for _ in range(n))
        return fm.And(*kids) if op == "and" else fm.Or(*kids)
    a = rand_formula(rng, width, depth - 1, allow_next=allow_next, p_leaf=p_leaf)
    b = rand_formula(rng, width, depth - 1, allow_next=allow_next, p_leaf=p_leaf)
    return fm.Implies(a, b) if op == "implies" else fm.Iff(a, b)


def _literal(rng: random.Random, width: int) -> fm.Formula:
    leaf = fm.cur(rng.randrange(width))
    return fm.Not(leaf) if rng.random() < 0.5 else leaf


def gen_system(spec: CorpusSpec, index: int) -> TransitionSystem:
    """Deterministic random system for (seed, index).

    Transitions pin most next-state bits to functions of the current state;
    at most one bit is left relational behind a sparse guard, and a few bits
    may be guarded (partial) so the relation can be non-total.  This keeps
    the loop-free path count enumerable while covering partial and
    branching relations.
    """
    rng = random.Random(spec.seed * 1_000_003 + index * 7919 + 17)
    width = rng.randint(spec.width_min, spec.width_max)

    parts: list[fm.Formula] = []
    slack_bit = rng.randrange(width) if rng.random() < 0.5 else -1
    for j in range(width):
        target = rand_formula(rng, width, rng.randint(1, 2), p_leaf=0.45)
        if j == slack_bit:
            # Free only inside a sparse guard; keeps branching states rare
            # so loop-free path enumeration stays tractable.
            guard = fm.conj([_literal(rng, width)
                             for _ in range(min(spec.slack_guard_bits, width))])
            parts.append(fm.Or(guard, fm.Iff(fm.nxt(j), target)))
        else:
            parts.append(fm.Iff(fm.nxt(j), target))
    if rng.random() < 0.3:
        # A source guard cuts some states off entirely: a partial relation.
        parts.append(fm.Or(_literal(rng, width), _literal(rng, width)))
    trans = fm.conj(parts)

    init = rand_formula(rng, width, rng.randint(1, spec.depth), p_leaf=0.4)
    if rng.random() < 0.4:
        prop = fm.Or(*[_literal(rng, width)
                       for _ in range(rng.randint(1, max(2, width // 2)))])
    else:
        prop = rand_formula(rng, width, rng.randint(1, spec.depth), p_leaf=0.4)
    return TransitionSystem(name=f"gen{spec.seed}_{index}", width=width,
                            init=init, trans=trans, prop=prop)


# --- engines ------------------------------------------------------------------

def run_engine(name: str, sys: TransitionSystem, *, k_max: int,
               conflict_budget: int, cache: dict | None = None) -> Verdict:
    """One engine, one system; ``bmc`` only ever refutes."""
    if name in TRUE_ENCODERS:
        return run_unbounded(sys, name, k_max=k_max,
                             conflict_budget=conflict_budget, cache=cache)
    if name == "pdr":
        return run_pdr(sys, k_max=k_max, conflict_budget=conflict_budget)
    if name == "bmc":
        return run_bounded_refuter(sys, k_max=k_max,
                                   conflict_budget=conflict_budget, cache=cache)
    if name == "liar":
        # Test-only engine for harness self-checks: claims safety blindly.
        return Verdict.safe(0)
    raise ValueError(f"unknown engine {name!r}")


def run_bounded_refuter(sys: TransitionSystem, *, k_max: int,
                        conflict_budget: int,
                        cache: dict | None = None) -> Verdict:
    """Bounded search for a counterexample; cannot conclude safety."""
    if cache is None:
        cache = {}
    budget_hit = False
    for k in range(k_max + 1):
        q = bounded_query(sys, k)
        if q not in cache:
            try:
                cache[q] = check_validity(q, sys.width,
                                          conflict_budget=conflict_budget)
            except ResourceLimit:
                cache[q] = None
        outcome = cache[q]
        if outcome is None:
            budget_hit = True
        elif not outcome.valid:
            return Verdict.unsafe(outcome.witness)
    return Verdict.unknown("budget" if budget_hit else "bounded to k-max")


# --- differential soundness ----------------------------------------------------

@dataclass
class EngineStats:
    safe: int = 0
    unsafe: int = 0
    unknown: int = 0


@dataclass
class DifferentialReport:
    spec: CorpusSpec
    engines: tuple[str, ...]
    per_engine: dict[str, EngineStats] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    oracle_safe: int = 0
    oracle_unsafe: int = 0
    loopfree_mismatches: list[int] = field(default_factory=list)
    cex_length_mismatches: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.violations or self.loopfree_mismatches
                    or self.cex_length_mismatches)

    def to_text(self) -> str:
        lines = [f"systems: {self.spec.count}  seed: {self.spec.seed}  "
                 f"oracle safe/unsafe: {self.oracle_safe}/{self.oracle_unsafe}",
                 f"{'engine':<12} {'safe':>6} {'unsafe':>8} {'unknown':>9}"]
        for name in self.engines:
            st = self.per_engine[name]
            lines.append(f"{name:<12} {st.safe:>6} {st.unsafe:>8} {st.unknown:>9}")
        lines.append(f"soundness violations: {len(self.violations)}")
        lines.extend("  " + v for v in self.violations)
        lines.append(f"loop-free/reachability mismatches: "
                     f"{len(self.loopfree_mismatches)}")
        lines.append(f"counterexample length mismatches: "
                     f"{len(self.cex_length_mismatches)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "schema_version": "1",
            "kind": "differential",
            "count": self.spec.count,
            "seed": self.spec.seed,
            "oracle": {"safe": self.oracle_safe, "unsafe": self.oracle_unsafe},
            "engines": {name: vars(self.per_engine[name])
                        for name in self.engines},
            "violations": self.violations,
            "loopfree_mismatches": self.loopfree_mismatches,
            "cex_length_mismatches": self.cex_length_mismatches,
            "ok": self.ok,
        }, indent=2)


def _check_system(args) -> tuple[int, bool, dict[str, str], list[str], bool, bool]:
    spec, index, engines, k_max, conflict_budget = args
    sys = gen_system(spec, index)
    truth = oracle.reach(sys)
    loopfree_ok = oracle.loopfree_safety(sys) == truth.safe
    violations: list[str] = []
    verdicts: dict[str, str] = {}
    cex_len_ok = True
    cache: dict = {}
    for name in engines:
        v = run_engine(name, sys, k_max=k_max, conflict_budget=conflict_budget,
                       cache=cache)
        verdicts[name] = v.kind
        if v.is_safe and not truth.safe:
            violations.append(f"system {index}: {name} claimed safe, "
                              f"oracle counterexample {truth.shortest_cex.states}")
        elif v.is_unsafe:
            if truth.safe:
                violations.append(f"system {index}: {name} claimed unsafe on a "
                                  "safe system")
            elif not oracle.validate_trace(sys, v.trace):
                violations.append(f"system {index}: {name} returned an invalid "
                                  f"trace {v.trace.states}")
            elif name == "bmc" and len(v.trace) != len(truth.shortest_cex):
                cex_len_ok = False
    return index, truth.safe, verdicts, violations, loopfree_ok, cex_len_ok


def differential_soundness(spec: CorpusSpec, *,
                           engines: tuple[str, ...] = ENGINE_NAMES,
                           k_max: int = 12, conflict_budget: int = 100_000,
                           jobs: int = 1) -> DifferentialReport:
    """Run every engine over the corpus and compare with the oracle."""
    report = DifferentialReport(spec, engines,
                                {name: EngineStats() for name in engines})
    tasks = [(spec, i, engines, k_max, conflict_budget)
             for i in range(spec.count)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_system, tasks, chunksize=8))
    else:
        results = [_check_system(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    for index, truth_safe, verdicts, violations, loopfree_ok, cex_len_ok in results:
        if truth_safe:
            report.oracle_safe += 1
        else:
            report.oracle_unsafe += 1
        for name, kind in verdicts.items():
            stats = report.per_engine[name]
            if kind == "safe":
                stats.safe += 1
            elif kind == "unsafe":
                stats.unsafe += 1
            else:
                stats.unknown += 1
        report.violations.extend(violations)
        if not loopfree_ok:
            report.loopfree_mismatches.append(index)
        if not cex_len_ok:
            report.cex_length_mismatches.append(index)
    return report


# --- sequence and path lemma suite ----------------------------------------------

@dataclass
class LemmaStats:
    trials: int = 0
    failures: int = 0


@dataclass
class SequenceReport:
    lemmas: dict[str, LemmaStats] = field(default_factory=dict)
    split_converse_found_at: int | None = None

    @property
    def ok(self) -> bool:
        return (all(s.failures == 0 for s in self.lemmas.values())
                and self.split_converse_found_at is not None)

    def to_text(self) -> str:
        lines = [f"{'lemma':<14} {'trials':>7} {'failures':>9}"]
        for name in sorted(self.lemmas):
            st = self.lemmas[name]
            lines.append(f"{name:<14} {st.trials:>7} {st.failures:>9}")
        lines.append(f"split-converse counterexample found at trial: "
                     f"{self.split_converse_found_at}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "schema_version": "1",
            "kind": "sequence",
            "lemmas": {k: vars(v) for k, v in sorted(self.lemmas.items())},
            "split_converse_found_at": self.split_converse_found_at,
            "ok": self.ok,
        }, indent=2)


def _rand_window(rng: random.Random, width: int, n: int) -> StateSeq:
    return StateSeq(tuple(rng.randrange(1 << width) for _ in range(n)))


def sequence_suite(seed: int = 42, trials: int = 1000, *,
                   converse_trials: int = 10_000) -> SequenceReport:
    """Property trials for the sequence/path lemmas and the loop deletion law.

    The split lemma for loop-free paths holds in one direction only; the
    suite must also produce a concrete converse counterexample (a window
    whose halves are loop-free but which repeats a state across the split).
    """
    rng = random.Random(seed)
    report = SequenceReport({name: LemmaStats() for name in
                             ("shift_pointwise", "shift_path",
                              "shift_distinct", "split_path",
                              "split_loop_free", "prepend_step",
                              "loop_deletion")})

    def tally(name: str, passed: bool) -> None:
        st = report.lemmas[name]
        st.trials += 1
        if not passed:
            st.failures += 1

    for _ in range(trials):
        width = rng.randint(2, 4)
        trans = rand_formula(rng, width, rng.randint(1, 3), allow_next=True)
        n = rng.randint(2, 8)
        ss = _rand_window(rng, width, n)

        # shift_pointwise: a state predicate is insensitive to window shifting.
        pred = rand_formula(rng, width, rng.randint(0, 2))
        i = rng.randrange(n)
        j = rng.randint(0, i)
        shifted = sys_mod.skipn(i - j, ss)
        tally("shift_pointwise",
              fm.eval_formula(pred, ss[i], width=width)
              == fm.eval_formula(pred, shifted[j], width=width))

        # Path and distinctness survive the suffix shift.
        j = rng.randrange(n)
        k = rng.randint(0, n - 1 - j)
        shifted = sys_mod.skipn(j, ss)
        lhs = sys_mod.path(trans, ss, j, k, width=width)
        rhs = sys_mod.path(trans, shifted, 0, k, width=width)
        tally("shift_path", rhs if lhs else True)
        lhs = sys_mod.no_loop(ss, j, k)
        rhs = sys_mod.no_loop(shifted, 0, k)
        tally("shift_distinct", rhs if lhs else True)

        # split_path: paths split at any interior point, both ways.
        j = rng.randint(0, n - 1)
        k = rng.randint(0, n - 1 - j)
        whole = sys_mod.path(trans, ss, 0, j + k, width=width)
        halves = (sys_mod.path(trans, ss, 0, j, width=width)
                  and sys_mod.path(trans, ss, j, k, width=width))
        tally("split_path", whole == halves)

        # split_loop_free: loop-free splits one way only.
        whole = sys_mod.loop_free(trans, ss, 0, j + k, width=width)
        halves = (sys_mod.loop_free(trans, ss, 0, j, width=width)
                  and sys_mod.loop_free(trans, ss, j, k, width=width))
        tally("split_loop_free", halves if whole else True)

        # prepend_step: one transition prepends to a path.
        if n >= 2:
            i = rng.randrange(n - 1)
            ln = rng.randint(0, n - 2 - i)
            lhs = (fm.eval_formula(trans, ss[i], ss[i + 1], width=width)
                   and sys_mod.path(trans, ss, i + 1, ln, width=width))
            rhs = sys_mod.path(trans, ss, i, ln + 1, width=width)
            tally("prepend_step", lhs == rhs)

        # Loop deletion: a repeated state yields a shortened window
        # reaching the same endpoint.
        if n >= 2:
            m = rng.randrange(n - 1)
            nn = rng.randint(m + 1, n - 1)
            states = list(ss.states)
            states[nn] = states[m]
            looped = StateSeq(tuple(states))
            d = nn - m
            shorter = StateSeq(tuple(states[:m + 1] + states[nn + 1:]))
            i_last = n - 1
            ok = sys_mod.shorter_ss(0, m, d, looped, shorter)
            if i_last >= nn:
                ok = ok and looped[i_last] == shorter[i_last - d]
            tally("loop_deletion", ok)

    for attempt in range(1, converse_trials + 1):
        width = rng.randint(1, 3)
        trans = rand_formula(rng, width, rng.randint(1, 3), allow_next=True)
        n = rng.randint(3, 6)
        ss = _rand_window(rng, width, n)
        j = rng.randint(1, n - 2)
        k = rng.randint(1, n - 1 - j)
        halves = (sys_mod.loop_free(trans, ss, 0, j, width=width)
                  and sys_mod.loop_free(trans, ss, j, k, width=width))
        whole = sys_mod.loop_free(trans, ss, 0, j + k, width=width)
        if halves and not whole:
            report.split_converse_found_at = attempt
            break
    return report
