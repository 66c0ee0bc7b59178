"""Benchmark the CDCL kernel backends: numba-jitted versus pure Python.

Two workloads: random 3-CNF instances near the phase transition, and the
solver queries produced by unrolling corpus transition systems.  Both
backends run the same kernel source, so the script also asserts that
verdicts, conflict counts, and models agree call for call.

Run:  python benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from smckit import formula as fm
from smckit._cdcl import search_jitted, search_python
from smckit.encoders import bounded_query, forward_query
from smckit.harness import CorpusSpec, gen_system
from smckit.sat import _arrays_from_cnf, query_cnf


def random_3cnf(rng: random.Random, n_vars: int) -> fm.CnfFormula:
    n_clauses = int(4.25 * n_vars)
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return fm.CnfFormula(n_vars, tuple(clauses), {})


def unrolled_queries(count: int, k: int) -> list[fm.CnfFormula]:
    spec = CorpusSpec(seed=7, count=count)
    out = []
    for i in range(count):
        sys = gen_system(spec, i)
        out.append(query_cnf(bounded_query(sys, k), sys.width))
        out.append(query_cnf(forward_query(sys, k), sys.width))
    return out


def run_backend(search, cnfs: list[fm.CnfFormula]) -> tuple[float, list]:
    results = []
    t0 = time.perf_counter()
    for cnf in cnfs:
        db, cstart, csize, n_clauses, lits_used = _arrays_from_cnf(cnf, 2)
        assigns = np.zeros(cnf.num_vars, dtype=np.int8)
        status, conflicts = search(db, cstart, csize, n_clauses, lits_used,
                                   cnf.num_vars, 10**6, assigns)
        results.append((int(status), int(conflicts), assigns.tobytes()))
    return time.perf_counter() - t0, results


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()

    rng = random.Random(2024)
    n3, nq, k = (40, 10, 6) if args.quick else (150, 40, 10)
    workloads = {
        f"random 3-CNF (60..120 vars, {n3} instances)":
            [random_3cnf(rng, rng.randint(60, 120)) for _ in range(n3)],
        f"unrolled system queries (k={k}, {2 * nq} instances)":
            unrolled_queries(nq, k),
    }

    jitted = search_jitted()
    # Warm-up: trigger compilation outside the timed region.
    warm = random_3cnf(rng, 10)
    run_backend(jitted, [warm])

    print(f"{'workload':<48} {'python':>10} {'numba':>10} {'speedup':>9}")
    for name, cnfs in workloads.items():
        t_py, r_py = run_backend(search_python, cnfs)
        t_jit, r_jit = run_backend(jitted, cnfs)
        assert r_py == r_jit, f"backend mismatch on {name}"
        print(f"{name:<48} {t_py:>9.3f}s {t_jit:>9.3f}s {t_py / t_jit:>8.1f}x")
    print("backends agree on every verdict, conflict count, and model")


if __name__ == "__main__":
    main()
