from __future__ import annotations

import random

import pytest

from smckit import formula as fm
from smckit.system import bundled_system


@pytest.fixture(scope="session")
def shift3():
    return bundled_system("shift3")


@pytest.fixture(scope="session")
def mutant():
    return bundled_system("mutant")


def random_timed_formula(rng: random.Random, n_vars: int, depth: int,
                         p_const: float = 0.1) -> fm.Formula:
    """Random formula over timed bits (b, 0)..(b, 0) for CNF testing."""
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < p_const / 2:
            return fm.TRUE
        if r < p_const:
            return fm.FALSE
        return fm.at(rng.randrange(n_vars), 0)
    op = rng.choice(("not", "and", "or", "implies", "iff"))
    if op == "not":
        return fm.Not(random_timed_formula(rng, n_vars, depth - 1, p_const))
    if op in ("and", "or"):
        kids = [random_timed_formula(rng, n_vars, depth - 1, p_const)
                for _ in range(rng.randint(2, 3))]
        return fm.And(*kids) if op == "and" else fm.Or(*kids)
    a = random_timed_formula(rng, n_vars, depth - 1, p_const)
    b = random_timed_formula(rng, n_vars, depth - 1, p_const)
    return fm.Implies(a, b) if op == "implies" else fm.Iff(a, b)
