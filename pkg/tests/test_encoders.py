"""Encoding builders, three-valued discharge, and the unbounded loop."""

from __future__ import annotations

import itertools
import random

import pytest

from smckit import encoders as enc
from smckit import formula as fm
from smckit import system as sm
from smckit.harness import CorpusSpec, gen_system
from smckit.sat import ValidityQuery, check_validity
from smckit.system import parse_system


def verdicts(builder, sys, ks, cache):
    return [enc.discharge(builder(sys, k), sys.width, cache=cache).value
            for k in ks]


def test_forward_threshold(shift3):
    cache = {}
    got = verdicts(enc.encode_forward, shift3, range(9), cache)
    assert got == [False] * 4 + [True] * 5
    res = enc.discharge(enc.encode_forward(shift3, 4), 3)
    assert res.value is True and res.witnesses == {}


def test_forward_refutation_is_a_loopfree_initial_path(shift3):
    res = enc.discharge(enc.encode_forward(shift3, 3), 3)
    assert res.value is False
    witness = res.witnesses[enc.forward_query(shift3, 3)]
    assert len(witness) == 4
    assert shift3.eval_init(witness[0])
    assert sm.loop_free(shift3.trans, witness, 0, 3, width=3)


def test_backward_threshold(shift3):
    got = verdicts(enc.encode_backward, shift3, range(9), {})
    assert got == [False] + [True] * 8


def test_thresholds_with_vacuous_parts():
    no_init = parse_system(
        "system n\nwidth 2\ninit false\ntrans b0'\nprop b0\n")
    assert enc.discharge(enc.encode_forward(no_init, 0), 2).value is True
    all_good = parse_system(
        "system p\nwidth 2\ninit b0\ntrans b0'\nprop true\n")
    assert enc.discharge(enc.encode_backward(all_good, 0), 2).value is True


def test_sheeran1_is_the_disjunction(shift3):
    cache = {}
    got = verdicts(enc.encode_sheeran1, shift3, range(9), cache)
    fwd = verdicts(enc.encode_forward, shift3, range(9), cache)
    bwd = verdicts(enc.encode_backward, shift3, range(9), cache)
    assert got == [f or b for f, b in zip(fwd, bwd)]
    assert got == [False] + [True] * 8


def test_kinduction_base_case_on_shift3(shift3):
    # Brute-force oracle over all 64 transition pairs: a safe state's
    # successor is always safe, so plain induction closes at k = 0.
    for s, t in itertools.product(range(8), repeat=2):
        if shift3.eval_trans(s, t) and shift3.eval_prop(s):
            assert shift3.eval_prop(t)
    assert enc.discharge(enc.encode_kinduction(shift3, 0), 3).value is True


def test_kinduction_needs_depth_on_non_inductive_system():
    # Safe, but a safe unreachable state steps into the unsafe one, so
    # induction fails at depth 0 and closes at depth 1.
    sys = parse_system(
        "system c\nwidth 2\ninit !b0 & !b1\n"
        "trans (b1' <-> b1) & (b0' <-> b1 | !b0)\nprop !(b0 & b1)\n")
    from smckit.oracle import reach
    assert reach(sys).safe
    assert enc.discharge(enc.encode_kinduction(sys, 0), 2).value is False
    assert enc.discharge(enc.encode_kinduction(sys, 1), 2).value is True
    v = enc.run_unbounded(sys, "kinduction")
    assert v.is_safe and v.k == 1


def test_kinduction_vacuous_when_no_transitions():
    sys = parse_system(
        "system f\nwidth 2\ninit b0\ntrans false\nprop b0\n")
    for k in range(3):
        out = check_validity(enc.induction_query(sys, k), 2)
        assert out.valid


def test_bounded_reduces_to_single_leaf_at_zero(shift3, mutant):
    tree = enc.encode_bounded(shift3, 0)
    assert len(enc.leaves_of(tree)) == 1
    res = enc.discharge(enc.encode_bounded(mutant, 0), 3)
    assert res.value is False
    (witness,) = res.witnesses.values()
    assert witness.states == (0,)


def test_bounded_monotone_prefix():
    spec = CorpusSpec(seed=3, count=25)
    for i in range(spec.count):
        sys = gen_system(spec, i)
        cache = {}
        values = [enc.discharge(enc.encode_bounded(sys, k), sys.width,
                                cache=cache).value for k in range(7)]
        # Once refuted at some depth, every deeper conjunction is refuted.
        if False in values:
            first = values.index(False)
            assert all(v is False for v in values[first:])


def pigeonhole_query() -> ValidityQuery:
    # Valid, but the refutation needs search: 4 pigeons, 3 holes over
    # 12 timed bits.  With a one-conflict budget this leaf is undecided.
    def bit(p, h):
        return fm.at(p * 3 + h, 0)

    per_pigeon = [fm.Or(*(bit(p, h) for h in range(3))) for p in range(4)]
    no_share = [fm.Not(fm.And(bit(p1, h), bit(p2, h)))
                for h in range(3) for p1 in range(4) for p2 in range(p1 + 1, 4)]
    php = fm.And(*(per_pigeon + no_share))
    return ValidityQuery(0, fm.Not(php))


def test_discharge_three_valued_logic(shift3):
    true_leaf = enc.Leaf(ValidityQuery(0, fm.TRUE))
    false_leaf = enc.Leaf(ValidityQuery(0, fm.FALSE))
    hard_leaf = enc.Leaf(pigeonhole_query())

    res = enc.discharge(enc.EAnd((true_leaf, true_leaf)), 12)
    assert res.value is True
    # Budget-limited leaf is absorbed by a true disjunct.
    res = enc.discharge(enc.EOr((hard_leaf, true_leaf)), 12, conflict_budget=1)
    assert res.value is True and res.budget_hit
    # ... and by a false conjunct.
    res = enc.discharge(enc.EAnd((hard_leaf, false_leaf)), 12, conflict_budget=1)
    assert res.value is False
    # Undetermined when the budget-limited leaf is needed.
    res = enc.discharge(enc.EAnd((hard_leaf, true_leaf)), 12, conflict_budget=1)
    assert res.value is None and res.budget_hit
    res = enc.discharge(enc.ENot(hard_leaf), 12, conflict_budget=1)
    assert res.value is None
    # The same leaf with a real budget is simply valid.
    assert enc.discharge(hard_leaf, 12).value is True


def test_fully_quantified_form_equals_solver_verdict():
    # The implication form, decided by enumerating every window, agrees
    # with the solver on the negated-conjunction form.
    rng = random.Random(19)
    spec = CorpusSpec(seed=19, count=30, width_min=2, width_max=3)
    for i in range(spec.count):
        sys = gen_system(spec, i)
        k = rng.randint(0, 3)
        want = all(
            (not sys.eval_init(window[0]))
            or (not sm.path(sys.trans, sm.StateSeq(window), 0, k,
                            width=sys.width))
            or sys.eval_prop(window[k])
            for window in itertools.product(range(sys.n_states), repeat=k + 1))
        got = check_validity(enc.bounded_query(sys, k), sys.width).valid
        assert got == want, (i, k)


def test_run_unbounded_examples(shift3, mutant):
    assert enc.run_unbounded(shift3, "forward").k == 4
    assert enc.run_unbounded(shift3, "backward").k == 1
    for engine in enc.TRUE_ENCODERS:
        v = enc.run_unbounded(mutant, engine)
        assert v.is_unsafe and v.trace.states == (0,)


def test_run_unbounded_exhaustion(shift3):
    v = enc.run_unbounded(shift3, "forward", k_max=2)
    assert v.kind == "unknown" and "k-max" in v.reason
