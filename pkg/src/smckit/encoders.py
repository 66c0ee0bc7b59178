"""Safety encodings and the generic discharge/iterate scheme.

Every encoding builds a small boolean combination tree whose leaves are
universally quantified validity queries over a bounded state window; the
leaves go to the SAT layer one by one and the combination is then decided
exactly over three-valued leaf results, so a budget-limited leaf cannot
poison a verdict the other leaves already determine.

The unbounded loop alternates a safety encoding on the true side with the
plain bounded encoding as refuter, growing the depth until one side fires.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import formula as fm
from . import oracle
from .errors import ResourceLimit, SmcError
from .sat import DEFAULT_BUDGET, QueryOutcome, ValidityQuery, check_validity
from .system import StateSeq, TransitionSystem

DEFAULT_K_MAX = 64


# --- encoded formulas ------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    query: ValidityQuery


@dataclass(frozen=True)
class ENot:
    child: "EncodedFormula"


@dataclass(frozen=True)
class EAnd:
    children: tuple["EncodedFormula", ...]


@dataclass(frozen=True)
class EOr:
    children: tuple["EncodedFormula", ...]


EncodedFormula = Leaf | ENot | EAnd | EOr


def leaves_of(f: EncodedFormula) -> list[ValidityQuery]:
    """Leaf queries in evaluation (depth-first) order."""
    if isinstance(f, Leaf):
        return [f.query]
    if isinstance(f, ENot):
        return leaves_of(f.child)
    return [q for c in f.children for q in leaves_of(c)]


# --- builders ---------------------------------------------------------------

def path_conjuncts(sys: TransitionSystem, upto: int) -> list[fm.Formula]:
    """Unrolled transition constraints for steps 0..upto."""
    return [fm.instantiate(sys.trans, j) for j in range(upto)]


def distinct_pair(width: int, i: int, j: int) -> fm.Formula:
    """States at steps i and j differ in at least one bit."""
    return fm.Or(*(fm.Not(fm.Iff(fm.at(b, i), fm.at(b, j)))
                   for b in range(width)))


def loop_free_conjuncts(sys: TransitionSystem, k: int) -> list[fm.Formula]:
    """Path constraints plus pairwise distinctness over steps 0..k."""
    parts = path_conjuncts(sys, k)
    parts.extend(distinct_pair(sys.width, i, j)
                 for i in range(k) for j in range(i + 1, k + 1))
    return parts


def bounded_query(sys: TransitionSystem, i: int) -> ValidityQuery:
    """No initial path of length i ends unsafe (negated-conjunction form)."""
    parts = [fm.instantiate(sys.init, 0)]
    parts.extend(path_conjuncts(sys, i))
    parts.append(fm.Not(fm.instantiate(sys.prop, i)))
    return ValidityQuery(i, fm.Not(fm.conj(parts)))


def forward_query(sys: TransitionSystem, k: int) -> ValidityQuery:
    """No loop-free initial path spans the whole window 0..k."""
    parts = [fm.instantiate(sys.init, 0)]
    parts.extend(loop_free_conjuncts(sys, k))
    return ValidityQuery(k, fm.Not(fm.conj(parts)))


def backward_query(sys: TransitionSystem, k: int) -> ValidityQuery:
    """No loop-free path of the window's length ends unsafe."""
    parts = list(loop_free_conjuncts(sys, k))
    parts.append(fm.Not(fm.instantiate(sys.prop, k)))
    return ValidityQuery(k, fm.Not(fm.conj(parts)))


def induction_query(sys: TransitionSystem, k: int) -> ValidityQuery:
    """k+1 consecutive safe states force a safe successor."""
    parts = path_conjuncts(sys, k + 1)
    parts.extend(fm.instantiate(sys.prop, i) for i in range(k + 1))
    parts.append(fm.Not(fm.instantiate(sys.prop, k + 1)))
    return ValidityQuery(k + 1, fm.Not(fm.conj(parts)))


def encode_bounded(sys: TransitionSystem, k: int) -> EncodedFormula:
    return EAnd(tuple(Leaf(bounded_query(sys, i)) for i in range(k + 1)))


def encode_forward(sys: TransitionSystem, k: int) -> EncodedFormula:
    return EAnd((encode_bounded(sys, k), Leaf(forward_query(sys, k))))


def encode_backward(sys: TransitionSystem, k: int) -> EncodedFormula:
    return EAnd((encode_bounded(sys, k), Leaf(backward_query(sys, k))))


def encode_sheeran1(sys: TransitionSystem, k: int) -> EncodedFormula:
    """Hybrid: bounded part shared, lasso disjunction decides the rest."""
    return EAnd((encode_bounded(sys, k),
                 EOr((Leaf(forward_query(sys, k)),
                      Leaf(backward_query(sys, k))))))


def encode_kinduction(sys: TransitionSystem, k: int) -> EncodedFormula:
    return EAnd((encode_bounded(sys, k), Leaf(induction_query(sys, k))))


TRUE_ENCODERS = {
    "forward": encode_forward,
    "backward": encode_backward,
    "sheeran1": encode_sheeran1,
    "kinduction": encode_kinduction,
}


# --- discharge --------------------------------------------------------------

@dataclass
class DischargeResult:
    value: bool | None  # None: undetermined because of budget-limited leaves
    witnesses: dict[ValidityQuery, StateSeq] = field(default_factory=dict)
    budget_hit: bool = False


def discharge(f: EncodedFormula, width: int, *,
              conflict_budget: int = DEFAULT_BUDGET,
              cache: dict[ValidityQuery, QueryOutcome | None] | None = None,
              ) -> DischargeResult:
    """Evaluate the combination tree over discharged leaves.

    Leaves evaluate depth-first, left to right, with short-circuiting, so
    the first refuted conjunct of a bounded encoding is the shallowest one.
    A leaf that exhausts its budget counts as undetermined rather than
    poisoning the result.
    """
    if cache is None:
        cache = {}
    result = DischargeResult(None)

    def leaf_value(q: ValidityQuery) -> bool | None:
        if q in cache:
            outcome = cache[q]
        else:
            try:
                outcome = check_validity(q, width, conflict_budget=conflict_budget)
            except ResourceLimit:
                outcome = None
            cache[q] = outcome
        if outcome is None:
            result.budget_hit = True
            return None
        if not outcome.valid:
            result.witnesses[q] = outcome.witness
            return False
        return True

    def go(node: EncodedFormula) -> bool | None:
        if isinstance(node, Leaf):
            return leaf_value(node.query)
        if isinstance(node, ENot):
            v = go(node.child)
            return None if v is None else not v
        if isinstance(node, EAnd):
            out: bool | None = True
            for c in node.children:
                v = go(c)
                if v is False:
                    return False
                if v is None:
                    out = None
            return out
        out = False
        for c in node.children:
            v = go(c)
            if v is True:
                return True
            if v is None:
                out = None
        return out

    result.value = go(f)
    return result


# --- verdicts and the unbounded loop ---------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: str  # "safe" | "unsafe" | "unknown"
    k: int | None = None
    trace: StateSeq | None = None
    certificate: object | None = None
    reason: str | None = None

    @classmethod
    def safe(cls, k: int, certificate=None) -> "Verdict":
        return cls("safe", k=k, certificate=certificate)

    @classmethod
    def unsafe(cls, trace: StateSeq) -> "Verdict":
        return cls("unsafe", trace=trace)

    @classmethod
    def unknown(cls, reason: str) -> "Verdict":
        return cls("unknown", reason=reason)

    @property
    def is_safe(self) -> bool:
        return self.kind == "safe"

    @property
    def is_unsafe(self) -> bool:
        return self.kind == "unsafe"


def run_unbounded(sys: TransitionSystem, true_encoder: str = "forward", *,
                  k_max: int = DEFAULT_K_MAX,
                  conflict_budget: int = DEFAULT_BUDGET,
                  cache: dict | None = None) -> Verdict:
    """Iterative deepening: safety encoding versus bounded refutation.

    At each depth the true side runs first; the false side then re-checks
    only the newly added bounded conjunct, since shallower ones were already
    validated.  Unsafe traces are validated before being returned.
    """
    builder = TRUE_ENCODERS[true_encoder]
    if cache is None:
        cache = {}
    budget_hit = False
    for k in range(k_max + 1):
        res = discharge(builder(sys, k), sys.width,
                        conflict_budget=conflict_budget, cache=cache)
        if res.value is True:
            return Verdict.safe(k)
        budget_hit = budget_hit or res.budget_hit

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
            trace = outcome.witness
            if not oracle.validate_trace(sys, trace):
                raise SmcError("internal error: refutation trace rejected")
            return Verdict.unsafe(trace)
    return Verdict.unknown("budget" if budget_hit else "k-max exhausted")
