"""Acceptance suite: one test per criterion, one printed verdict line each.

Exact-match criteria assert equality with no tolerance; the property-based
criteria run the full corpus sizes (500 systems, 1000 trials per lemma,
2000 CNF instances) on fixed seeds.  Run with ``pytest -v -s`` to see the
per-criterion lines.
"""

from __future__ import annotations

import itertools
import random
import time

import pytest

from smckit import encoders as enc
from smckit import formula as fm
from smckit import oracle, pdr
from smckit import truthtab as tt
from smckit.harness import (CorpusSpec, differential_soundness, gen_system,
                            run_bounded_refuter, sequence_suite)
from smckit.sat import model_satisfies, solve
from smckit.system import bundled_system

CORPUS = CorpusSpec(seed=42, count=500, width_min=2, width_max=6)


def report(n: int, text: str) -> None:
    print(f"\nACCEPTANCE {n}: PASS - {text}")


@pytest.fixture(scope="module")
def shift3():
    return bundled_system("shift3")


@pytest.fixture(scope="module")
def mutant():
    return bundled_system("mutant")


@pytest.fixture(scope="module")
def corpus_run():
    start = time.monotonic()
    rep = differential_soundness(CORPUS, k_max=12, conflict_budget=100_000)
    return rep, time.monotonic() - start


def test_criterion_1_forward_threshold(shift3):
    cache = {}
    got = [enc.discharge(enc.encode_forward(shift3, k), 3, cache=cache).value
           for k in range(9)]
    assert got == [False, False, False, False, True, True, True, True, True]
    verdict = enc.run_unbounded(shift3, "forward")
    assert verdict.is_safe and verdict.k == 4
    report(1, "forward encoding false for k<4, true for 4<=k<=8, Safe(4)")


def test_criterion_2_backward_threshold(shift3):
    cache = {}
    got = [enc.discharge(enc.encode_backward(shift3, k), 3, cache=cache).value
           for k in range(9)]
    assert got == [False] + [True] * 8
    verdict = enc.run_unbounded(shift3, "backward")
    assert verdict.is_safe and verdict.k == 1
    report(2, "backward encoding false at k=0, true for 1<=k<=8, Safe(1)")


def test_criterion_3_pdr_postcondition_example(shift3):
    clause = pdr.Clause(((0, True), (1, True), (2, True)))
    frames = pdr.FrameSeq((frozenset(), frozenset({clause}),
                           frozenset({clause})))
    # Through the serialized form, as the criterion states.
    frames = pdr.parse_frames(pdr.format_frames(frames), 3)
    assert pdr.check_true_postcondition(frames, 1, shift3).all_passed
    rep = pdr.check_true_postcondition(frames, 0, shift3)
    failed = sorted(n for n, item in rep.items.items() if not item.passed)
    assert failed == ["e"]
    report(3, "frame example passes all of (a)-(e) at k=1; exactly (e) fails at k=0")


def test_criterion_4_shift3_safety(shift3):
    verdict = run_bounded_refuter(shift3, k_max=16, conflict_budget=10**6)
    assert verdict.kind == "unknown"  # no counterexample at any depth <= 16
    rep = oracle.reach(shift3)
    assert rep.safe and rep.reachable == {1, 3, 4, 5, 6, 7}
    report(4, "no bounded counterexample up to k=16; reachable set "
              "{1,3,4,5,6,7}, safe")


def test_criterion_5_kinduction_base(shift3):
    verdict = enc.run_unbounded(shift3, "kinduction")
    assert verdict.is_safe and verdict.k == 0
    for s, t in itertools.product(range(8), repeat=2):
        if shift3.eval_trans(s, t) and shift3.eval_prop(s):
            assert shift3.eval_prop(t)
    report(5, "induction closes at k=0, verified over all 64 state pairs")


def test_criterion_6_differential_soundness(corpus_run):
    rep, elapsed = corpus_run
    assert rep.violations == []
    assert rep.oracle_safe >= 50 and rep.oracle_unsafe >= 50  # >= 10% each
    assert elapsed < 600
    decided = {name: st.safe + st.unsafe for name, st in rep.per_engine.items()}
    report(6, f"500 systems, zero soundness violations in {elapsed:.1f}s; "
              f"decided per engine: {decided}")


def test_criterion_7_sequence_lemmas():
    rep = sequence_suite(seed=42, trials=1000)
    for name in ("shift_pointwise", "shift_path", "shift_distinct", "split_path", "split_loop_free", "prepend_step"):
        stats = rep.lemmas[name]
        assert stats.trials == 1000 and stats.failures == 0, name
    assert rep.split_converse_found_at is not None
    assert rep.split_converse_found_at <= 10_000
    report(7, "1000 trials per sequence lemma, zero failures; split-converse "
              f"counterexample at trial {rep.split_converse_found_at}")


def test_criterion_8_loop_deletion():
    rep = sequence_suite(seed=42, trials=1000)
    stats = rep.lemmas["loop_deletion"]
    assert stats.trials == 1000 and stats.failures == 0
    report(8, "1000 looped windows: deletion yields a shortened sequence "
              "reaching the same endpoint")


def test_criterion_9_loopfree_equals_reachability(corpus_run):
    rep, _ = corpus_run
    assert rep.loopfree_mismatches == []
    report(9, "loop-free-path safety equals reachability safety on all "
              f"{CORPUS.count} systems")


def test_criterion_10_sat_core():
    rng = random.Random(2024)
    checked_models = 0
    for trial in range(2000):
        n = rng.randint(1, 20)
        m = max(1, int(4.2 * n) + rng.randint(-3, 3))
        clauses = []
        for _ in range(m):
            vs = rng.sample(range(1, n + 1), min(3, n))
            clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
        cnf = fm.CnfFormula(n, tuple(clauses), {})
        result = solve(cnf)
        assert result.sat == tt.cnf_is_sat(clauses, n), trial
        if result.sat:
            assert model_satisfies(result.model, cnf)
            checked_models += 1
    report(10, f"2000 random 3-CNF instances match truth-table verdicts; "
               f"{checked_models} models re-verified")


def test_criterion_11_false_case_reading_equivalence():
    rng = random.Random(7)
    spec = CorpusSpec(seed=7, count=200, width_min=2, width_max=6)
    for i in range(spec.count):
        sys = gen_system(spec, i)
        k = rng.randint(0, 4)
        frames = tuple(
            frozenset(pdr.Clause.blocking(
                pdr.Cube.from_state(rng.randrange(sys.n_states), sys.width))
                for _ in range(rng.randint(0, 2)))
            for _ in range(max(k, 1)))
        true_reading = _exact_depth_safe(sys, k, None)
        framed_reading = _exact_depth_safe(sys, k, frames)
        assert not true_reading or framed_reading, (i, k)
        solver_reading = pdr.check_false_postcondition(sys, k).items["c"].passed
        assert solver_reading == true_reading, (i, k)
    report(11, "universally framed depth-k condition equals the all-true "
               "instance on 200 (system, frames, k) triples")


def _exact_depth_safe(sys, k, frame_sets) -> bool:
    import numpy as np

    prop = tt.eval_state_space(sys.prop, sys.width)
    layer = tt.eval_state_space(sys.init, sys.width)
    for step in range(k):
        if frame_sets is not None:
            for clause in frame_sets[step]:
                layer = layer & np.array(
                    [clause.holds(s) for s in range(sys.n_states)])
        nxt = np.zeros_like(layer)
        for s in np.nonzero(layer)[0]:
            nxt |= tt.eval_successor_row(sys.trans, int(s), sys.width)
        layer = nxt
    return not (layer & ~prop).any()


def test_criterion_12_pdr_certificates():
    certified = 0
    for i in range(CORPUS.count):
        sys = gen_system(CORPUS, i)
        verdict = pdr.run_pdr(sys, k_max=12, conflict_budget=100_000)
        if not verdict.is_safe:
            continue
        rep = pdr.check_true_postcondition(verdict.certificate, verdict.k,
                                           sys, method="enum")
        assert rep.all_passed, i
        certified += 1
    assert certified >= 50
    report(12, f"{certified} Safe verdicts, every frame certificate passes "
               "(a)-(e) under independent enumeration")
