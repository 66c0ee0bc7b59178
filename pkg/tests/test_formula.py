"""Formula evaluation, unrolling, and CNF conversion against enumeration."""

from __future__ import annotations

import itertools
import random

import pytest

from conftest import random_timed_formula
from smckit import formula as fm
from smckit import truthtab as tt
from smckit.errors import BitOutOfRange, MissingNextState
from smckit.sat import solve


def test_eval_bit_of_state():
    f = fm.cur(2)
    assert fm.eval_formula(f, 4, width=3) is True  # 100
    assert fm.eval_formula(f, 3, width=3) is False
    assert fm.eval_formula(fm.TRUE, 0, width=1) is True


def test_eval_shift_register_transition(shift3):
    # t = (2s + 1) mod 8, checked over every pair.
    assert shift3.eval_trans(4, 1)
    assert not shift3.eval_trans(4, 2)
    for s, t in itertools.product(range(8), repeat=2):
        assert shift3.eval_trans(s, t) == (t == (2 * s + 1) % 8)


def test_eval_errors():
    with pytest.raises(MissingNextState):
        fm.eval_formula(fm.nxt(0), 0, width=2)
    with pytest.raises(BitOutOfRange):
        fm.eval_formula(fm.cur(5), 0, width=2)


def test_instantiate_maps_stages_to_steps():
    g = fm.instantiate(fm.nxt(0), 3)
    assert g.kind == fm.TVAR_K and (g.bit, g.idx) == (0, 4)


def test_instantiate_init_is_current_only(shift3):
    g = fm.instantiate(shift3.init, 0)
    assert fm.free_vars(g) == {(2, 0)}


def test_instantiate_agrees_with_pairwise_eval(shift3):
    # Timed evaluation of the unrolled formula equals stage evaluation at
    # the corresponding adjacent pair, over every 3-bit window.
    rng = random.Random(3)
    formulas = [shift3.trans, shift3.init, shift3.prop]
    for _ in range(30):
        f = formulas[rng.randrange(3)]
        t = rng.randrange(3)
        g = fm.instantiate(f, t)
        for window in itertools.product(range(8), repeat=5):
            want = fm.eval_formula(f, window[t], window[t + 1], width=3)
            assert fm.eval_timed(g, list(window), width=3) == want


def test_instantiate_is_a_homomorphism():
    a, b = fm.cur(0), fm.nxt(1)
    for build in (lambda: fm.Not(a), lambda: fm.And(a, b), lambda: fm.Or(a, b),
                  lambda: fm.Implies(a, b), lambda: fm.Iff(a, b)):
        f = build()
        g = fm.instantiate(f, 2)
        assert g.kind == f.kind
        assert [c.kind for c in g.children] == \
            [fm.TVAR_K if c.kind == fm.VAR_K else c.kind for c in f.children]


def test_instantiation_at_distinct_steps_uses_disjoint_variables():
    f = fm.And(fm.cur(0), fm.nxt(1))
    assert fm.free_vars(fm.instantiate(f, 0)) == {(0, 0), (1, 1)}
    assert fm.free_vars(fm.instantiate(f, 2)) == {(0, 2), (1, 3)}
    assert not (fm.free_vars(fm.instantiate(f, 0))
                & fm.free_vars(fm.instantiate(f, 2)))
    grid = fm.state_var_map(2, 3)
    assert len(set(grid.values())) == len(grid)


def test_to_cnf_contradiction_and_disjunction():
    x = fm.at(0, 0)
    assert not solve(fm.to_cnf(fm.And(x, fm.Not(x)), width=1, steps=0)).sat
    r = solve(fm.to_cnf(fm.Or(fm.at(0, 0), fm.at(1, 0)), width=2, steps=0))
    assert r.sat
    assert r.model[0] or r.model[1]


def test_to_cnf_rejects_stage_formulas():
    with pytest.raises(ValueError):
        fm.to_cnf(fm.cur(0), width=1, steps=0)


def test_to_cnf_no_tautological_clauses():
    x = fm.at(0, 0)
    cnf = fm.to_cnf(fm.Iff(x, x), width=1, steps=0)
    for clause in cnf.clauses:
        assert not any(-lit in clause for lit in clause)


def test_fold_constants_truth_table():
    consts = {fm.TRUE: True, fm.FALSE: False}
    for a, b in itertools.product(consts, repeat=2):
        assert fm.fold_constants(fm.And(a, b)) is consts_inv(consts[a] and consts[b])
        assert fm.fold_constants(fm.Or(a, b)) is consts_inv(consts[a] or consts[b])
        assert fm.fold_constants(fm.Implies(a, b)) is consts_inv(
            (not consts[a]) or consts[b])
        assert fm.fold_constants(fm.Iff(a, b)) is consts_inv(consts[a] == consts[b])
        assert fm.fold_constants(fm.Not(a)) is consts_inv(not consts[a])


def consts_inv(value: bool) -> fm.Formula:
    return fm.TRUE if value else fm.FALSE


def test_to_cnf_equisatisfiable_with_truth_table():
    # The stated oracle: satisfiability by enumeration over <= 12 variables.
    rng = random.Random(11)
    for trial in range(1000):
        n = rng.randint(1, 12)
        f = random_timed_formula(rng, n, rng.randint(1, 5))
        cnf = fm.to_cnf(f, width=n, steps=0)
        want = tt.formula_is_sat(f)
        result = solve(cnf)
        assert result.sat == want, (trial, fm.to_text(f))
        if result.sat:
            # Models project onto models of the original formula.
            window = fm.decode_window(result.model, cnf.var_map, n, 0)
            assert fm.eval_timed(f, window, width=n)


def test_cnf_formula_validation():
    with pytest.raises(ValueError):
        fm.CnfFormula(1, ((1, -1),), {})
    with pytest.raises(ValueError):
        fm.CnfFormula(1, ((2,),), {})
    with pytest.raises(ValueError):
        fm.CnfFormula(2, (), {(0, 0): 1, (1, 0): 1})
