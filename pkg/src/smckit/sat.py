"""SAT front end: the embedded CDCL solver, validity discharge, and interop.

``solve`` drives the CDCL kernel and never returns an unchecked model: every
Sat result is re-verified against the clause set before it leaves this
module.  ``check_validity`` is the discharge primitive the encoders build
on: a universally quantified body is valid exactly when its negation is
unsatisfiable, and a refutation decodes to a concrete state window.
"""

from __future__ import annotations

import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import formula as fm
from ._cdcl import BUDGET, GROW, SAT, UNSAT, active_search
from .errors import MalformedSolverOutput, ResourceLimit, SmcError
from .system import StateSeq

DEFAULT_BUDGET = 1_000_000

_EXTERNAL_CMD: str | None = None


def set_external_solver(command: str | None) -> None:
    """Route all subsequent solving through an external DIMACS solver.

    Models coming back are still verified against the clause set; pass None
    to return to the embedded CDCL engine.
    """
    global _EXTERNAL_CMD
    _EXTERNAL_CMD = command


@dataclass(frozen=True)
class SatResult:
    sat: bool
    model: tuple[bool, ...] | None
    conflicts: int


@dataclass(frozen=True)
class ValidityQuery:
    """A claim of the shape: for all state windows 0..steps, body holds."""

    steps: int
    body: fm.Formula

    def __post_init__(self):
        for _, step in fm.free_vars(self.body):
            if step > self.steps:
                raise ValueError(f"body mentions step {step} > {self.steps}")


@dataclass(frozen=True)
class QueryOutcome:
    valid: bool
    witness: StateSeq | None


def _arrays_from_cnf(cnf: fm.CnfFormula, cap_factor: int):
    n_clauses = len(cnf.clauses)
    total_lits = sum(len(c) for c in cnf.clauses)
    cap_clauses = cap_factor * n_clauses + 4096
    cap_lits = cap_factor * total_lits + 65536
    db = np.zeros(cap_lits, dtype=np.int32)
    cstart = np.zeros(cap_clauses, dtype=np.int32)
    csize = np.zeros(cap_clauses, dtype=np.int32)
    pos = 0
    for i, clause in enumerate(cnf.clauses):
        cstart[i] = pos
        csize[i] = len(clause)
        for lit in clause:
            v = abs(lit) - 1
            db[pos] = 2 * v + (1 if lit < 0 else 0)
            pos += 1
    return db, cstart, csize, n_clauses, pos


def model_satisfies(model: tuple[bool, ...], cnf: fm.CnfFormula) -> bool:
    for clause in cnf.clauses:
        if not any(model[lit - 1] if lit > 0 else not model[-lit - 1]
                   for lit in clause):
            return False
    return True


def solve(cnf: fm.CnfFormula, *, conflict_budget: int = DEFAULT_BUDGET) -> SatResult:
    """Decide a CNF; raises ResourceLimit when the budget runs out.

    Deterministic: the same clause set always yields the same verdict and,
    for unsat, the same conflict count, on either kernel backend.
    """
    if _EXTERNAL_CMD is not None:
        return solve_external(cnf, _EXTERNAL_CMD)
    search = active_search()
    cap_factor = 2
    while True:
        db, cstart, csize, n_clauses, lits_used = _arrays_from_cnf(cnf, cap_factor)
        assigns = np.zeros(cnf.num_vars, dtype=np.int8)
        status, conflicts = search(db, cstart, csize, n_clauses, lits_used,
                                   cnf.num_vars, conflict_budget, assigns)
        if status == GROW:
            # Ran out of preallocated clause space; retry from scratch bigger.
            cap_factor *= 4
            continue
        if status == BUDGET:
            raise ResourceLimit(int(conflicts))
        if status == UNSAT:
            return SatResult(False, None, int(conflicts))
        assert status == SAT
        model = tuple(bool(v > 0) for v in assigns)
        if not model_satisfies(model, cnf):
            raise SmcError("internal error: model fails verification")
        return SatResult(True, model, int(conflicts))


def check_validity(q: ValidityQuery, sys_width: int, *,
                   conflict_budget: int = DEFAULT_BUDGET) -> QueryOutcome:
    """Discharge a validity query by refuting its negation.

    A Refuted outcome carries the falsifying window, decoded from the SAT
    model with unassigned bits defaulting to false; the witness is checked
    against the body before being returned.
    """
    cnf = query_cnf(q, sys_width)
    result = solve(cnf, conflict_budget=conflict_budget)
    if not result.sat:
        return QueryOutcome(True, None)
    states = fm.decode_window(result.model, cnf.var_map, sys_width, q.steps)
    witness = StateSeq(tuple(states))
    if fm.eval_timed(q.body, states, width=sys_width):
        raise SmcError("internal error: witness does not falsify the body")
    return QueryOutcome(False, witness)


def query_cnf(q: ValidityQuery, sys_width: int) -> fm.CnfFormula:
    """CNF of the negated body, over the query's full state window."""
    return fm.to_cnf(fm.Not(q.body), width=sys_width, steps=q.steps)


# --- DIMACS ---------------------------------------------------------------

def export_dimacs(cnf: fm.CnfFormula) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    for clause in cnf.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0"
                     if clause else "0")
    return "\n".join(lines) + "\n"


def parse_solver_output(text: str) -> SatResult:
    """Interpret a SAT-solver transcript: SAT/UNSAT status plus v-lines."""
    status: bool | None = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line in ("SAT", "s SATISFIABLE"):
            status = True
        elif line in ("UNSAT", "s UNSATISFIABLE"):
            status = False
        elif line.startswith("v ") or line.startswith("v\t"):
            fields = line[1:].split()
            try:
                lits.extend(int(f) for f in fields)
            except ValueError:
                raise MalformedSolverOutput(f"bad model line: {raw!r}")
        elif status is True and re.fullmatch(r"-?\d+(\s+-?\d+)*", line):
            lits.extend(int(f) for f in line.split())
    if status is None:
        raise MalformedSolverOutput("no SAT/UNSAT status in transcript")
    if not status:
        return SatResult(False, None, 0)
    num_vars = max((abs(l) for l in lits if l != 0), default=0)
    model = [False] * num_vars
    for lit in lits:
        if lit > 0:
            model[lit - 1] = True
    return SatResult(True, tuple(model), 0)


def solve_external(cnf: fm.CnfFormula, command: str) -> SatResult:
    """Discharge a CNF with an external solver via DIMACS files.

    The command template may reference ``{cnf}`` and ``{out}``; without an
    ``{out}`` placeholder the transcript is read from standard output.
    The returned model is re-verified against the clause set.
    """
    with tempfile.TemporaryDirectory(prefix="smckit-") as tmp:
        cnf_path = Path(tmp) / "query.cnf"
        out_path = Path(tmp) / "solver.out"
        cnf_path.write_text(export_dimacs(cnf), encoding="utf-8")
        if "{cnf}" in command:
            cmd = command.replace("{cnf}", str(cnf_path))
        else:
            cmd = f"{command} {cnf_path}"
        uses_file = "{out}" in cmd
        cmd = cmd.replace("{out}", str(out_path))
        proc = subprocess.run(shlex.split(cmd), capture_output=True, text=True)
        transcript = (out_path.read_text(encoding="utf-8")
                      if uses_file and out_path.exists() else proc.stdout)
        result = parse_solver_output(transcript)
    if result.sat:
        model = result.model
        if len(model) < cnf.num_vars:
            model = model + (False,) * (cnf.num_vars - len(model))
        else:
            model = model[:cnf.num_vars]
        if not model_satisfies(model, cnf):
            raise MalformedSolverOutput("external model fails verification")
        return SatResult(True, model, 0)
    return result


# --- SMT-LIB2 --------------------------------------------------------------

def export_smt2(q: ValidityQuery) -> str:
    """Emit the query as an SMT-LIB2 refutation script.

    Each timed bit becomes a boolean constant ``s<step>_b<bit>``; the body's
    negation is asserted and followed by check-sat, so unsat means valid.
    """
    names = sorted(fm.free_vars(q.body), key=lambda key: (key[1], key[0]))
    lines = ["(set-logic QF_UF)"]
    for bit, step in names:
        lines.append(f"(declare-const s{step}_b{bit} Bool)")
    lines.append(f"(assert (not {_smt2(q.body)}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def _smt2(f: fm.Formula) -> str:
    k = f.kind
    if k == fm.TRUE_K:
        return "true"
    if k == fm.FALSE_K:
        return "false"
    if k == fm.TVAR_K:
        return f"s{f.idx}_b{f.bit}"
    if k == fm.NOT_K:
        return f"(not {_smt2(f.children[0])})"
    if k == fm.AND_K:
        return "(and " + " ".join(_smt2(c) for c in f.children) + ")"
    if k == fm.OR_K:
        return "(or " + " ".join(_smt2(c) for c in f.children) + ")"
    if k == fm.IMPLIES_K:
        return f"(=> {_smt2(f.children[0])} {_smt2(f.children[1])})"
    if k == fm.IFF_K:
        return f"(= {_smt2(f.children[0])} {_smt2(f.children[1])})"
    raise ValueError(f"stage formula cannot be exported: {k}")
