"""The CDCL core, validity discharge, and solver interop."""

from __future__ import annotations

import random
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from smckit import formula as fm
from smckit import truthtab as tt
from smckit._cdcl import search_jitted, search_python
from smckit.encoders import bounded_query
from smckit.errors import MalformedSolverOutput, ResourceLimit
from smckit.sat import (ValidityQuery, _arrays_from_cnf, check_validity,
                        export_dimacs, export_smt2, model_satisfies,
                        parse_solver_output, query_cnf, solve, solve_external)

GOLDEN = Path(__file__).parent / "golden"


def random_3cnf(rng: random.Random, max_vars: int = 20) -> fm.CnfFormula:
    n = rng.randint(1, max_vars)
    m = max(1, int(4.2 * n) + rng.randint(-3, 3))
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), min(3, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return fm.CnfFormula(n, tuple(clauses), {})


def test_trivial_cnfs():
    assert not solve(fm.CnfFormula(1, ((1,), (-1,)), {})).sat
    empty = solve(fm.CnfFormula(0, (), {}))
    assert empty.sat and empty.model == ()


def test_random_3cnf_against_truth_table():
    rng = random.Random(17)
    for trial in range(400):
        cnf = random_3cnf(rng)
        want = tt.cnf_is_sat(cnf.clauses, cnf.num_vars)
        result = solve(cnf)
        assert result.sat == want, trial
        if result.sat:
            assert model_satisfies(result.model, cnf)


def test_determinism_verdict_and_conflicts():
    rng = random.Random(23)
    for _ in range(40):
        cnf = random_3cnf(rng, max_vars=16)
        a, b = solve(cnf), solve(cnf)
        assert a.sat == b.sat and a.conflicts == b.conflicts
        assert a.model == b.model


def test_backends_agree_exactly():
    rng = random.Random(29)
    jit = search_jitted()
    for _ in range(60):
        cnf = random_3cnf(rng, max_vars=18)
        outs = []
        for fn in (search_python, jit):
            db, cstart, csize, n_clauses, lits = _arrays_from_cnf(cnf, 2)
            assigns = np.zeros(cnf.num_vars, dtype=np.int8)
            status, conflicts = fn(db, cstart, csize, n_clauses, lits,
                                   cnf.num_vars, 10**6, assigns)
            outs.append((int(status), int(conflicts), assigns.tobytes()))
        assert outs[0] == outs[1]


def test_backend_env_flag_selects_python_path():
    import os

    script = ("import smckit.accel as accel\n"
              "from smckit import formula as fm\n"
              "from smckit.sat import solve\n"
              "assert accel.BACKEND == 'python', accel.BACKEND\n"
              "assert not solve(fm.CnfFormula(1, ((1,), (-1,)), {})).sat\n"
              "print('python-backend-ok')\n")
    env = dict(os.environ, SMCKIT_BACKEND="python")
    proc = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "python-backend-ok" in proc.stdout


def hard_unsat_cnf() -> fm.CnfFormula:
    # Pigeonhole 4 pigeons, 3 holes: small but needs real search.
    nv = 12

    def v(p, h):
        return p * 3 + h + 1

    clauses = [tuple(v(p, h) for h in range(3)) for p in range(4)]
    for h in range(3):
        for p1 in range(4):
            for p2 in range(p1 + 1, 4):
                clauses.append((-v(p1, h), -v(p2, h)))
    return fm.CnfFormula(nv, tuple(clauses), {})


def test_resource_limit_is_distinct_from_unsat():
    cnf = hard_unsat_cnf()
    assert not solve(cnf).sat
    with pytest.raises(ResourceLimit):
        solve(cnf, conflict_budget=1)


def test_check_validity_examples(shift3, mutant):
    # Depth-0 safety of the shift register: all eight states enumerable.
    out = check_validity(bounded_query(shift3, 0), 3)
    assert out.valid
    assert check_validity(ValidityQuery(0, fm.TRUE), 3).valid
    out = check_validity(bounded_query(mutant, 0), 3)
    assert not out.valid
    assert out.witness.states == (0,)


def test_refuted_witness_falsifies_body():
    rng = random.Random(31)
    from conftest import random_timed_formula
    for _ in range(200):
        n = rng.randint(1, 6)
        body = random_timed_formula(rng, n, rng.randint(1, 4))
        out = check_validity(ValidityQuery(0, body), n)
        if not out.valid:
            assert not fm.eval_timed(body, [out.witness[0]], width=n)
        else:
            assert not tt.formula_is_sat(fm.Not(body))


def test_export_dimacs_format():
    assert export_dimacs(fm.CnfFormula(2, ((1, -2),), {})) == "p cnf 2 1\n1 -2 0\n"
    assert export_dimacs(fm.CnfFormula(0, (), {})) == "p cnf 0 0\n"


def test_parse_solver_output():
    r = parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2 3 0\n")
    assert r.sat and r.model == (True, False, True)
    r = parse_solver_output("SAT\n1 -2 0\n")
    assert r.sat and r.model == (True, False)
    assert not parse_solver_output("UNSAT\n").sat
    assert not parse_solver_output("s UNSATISFIABLE").sat
    with pytest.raises(MalformedSolverOutput):
        parse_solver_output("no verdict here\n")
    with pytest.raises(MalformedSolverOutput):
        parse_solver_output("s SATISFIABLE\nv one two\n")


def test_transcript_roundtrip_against_embedded_solver():
    # Recorded transcripts of our own verdicts parse back identically.
    rng = random.Random(37)
    for seed in range(50):
        cnf = random_3cnf(rng, max_vars=12)
        result = solve(cnf)
        if result.sat:
            lits = [i + 1 if v else -(i + 1) for i, v in enumerate(result.model)]
            transcript = "SAT\nv " + " ".join(map(str, lits)) + " 0\n"
        else:
            transcript = "UNSAT\n"
        parsed = parse_solver_output(transcript)
        assert parsed.sat == result.sat
        if parsed.sat:
            assert model_satisfies(parsed.model + (False,) * (
                cnf.num_vars - len(parsed.model)), cnf)


FAKE_SOLVER = r"""
import sys
clauses, nv = [], 0
for line in open(sys.argv[1]):
    line = line.strip()
    if not line or line.startswith(("c", "p")):
        if line.startswith("p"):
            nv = int(line.split()[2])
        continue
    clauses.append([int(x) for x in line.split()[:-1]])
for m in range(1 << nv):
    if all(any((m >> (abs(l) - 1)) & 1 == (l > 0) for l in c) for c in clauses):
        lits = [i + 1 if (m >> i) & 1 else -(i + 1) for i in range(nv)]
        out = "SAT\nv " + " ".join(map(str, lits)) + " 0\n"
        break
else:
    out = "UNSAT\n"
if len(sys.argv) > 2:
    open(sys.argv[2], "w").write(out)
else:
    sys.stdout.write(out)
"""


@pytest.fixture(scope="module")
def fake_solver(tmp_path_factory):
    path = tmp_path_factory.mktemp("solver") / "brute.py"
    path.write_text(FAKE_SOLVER, encoding="utf-8")
    return path


def test_external_solver_adapter(fake_solver):
    rng = random.Random(41)
    for _ in range(10):
        cnf = random_3cnf(rng, max_vars=8)
        want = solve(cnf).sat
        got = solve_external(cnf, f"{sys.executable} {fake_solver} {{cnf}}")
        assert got.sat == want
        got = solve_external(
            cnf, f"{sys.executable} {fake_solver} {{cnf}} {{out}}")
        assert got.sat == want


def test_external_solver_lying_model_rejected(fake_solver, tmp_path):
    liar = tmp_path / "liar.py"
    liar.write_text("print('SAT')\nprint('v 1 0')\n", encoding="utf-8")
    cnf = fm.CnfFormula(1, ((-1,),), {})
    with pytest.raises(MalformedSolverOutput):
        solve_external(cnf, f"{sys.executable} {liar} {{cnf}}")


def test_smt2_golden_files(shift3):
    for k in (0, 1, 2):
        text = export_smt2(bounded_query(shift3, k))
        want = (GOLDEN / f"shift3.bounded.k{k}.smt2").read_text(encoding="utf-8")
        assert text == want


def test_query_cnf_negation_is_conjunction(shift3):
    # The negated body reaching the solver is a plain conjunction: its CNF
    # keeps the state variables first and stays compact.
    cnf = query_cnf(bounded_query(shift3, 2), 3)
    assert cnf.num_vars >= 9 and len(cnf.clauses) > 0
    assert cnf.var_map[(0, 0)] == 1 and cnf.var_map[(2, 2)] == 9
