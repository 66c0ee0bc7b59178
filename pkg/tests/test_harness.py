"""Corpus generation, the differential harness, and the lemma suites."""

from __future__ import annotations

import json

from smckit.harness import (CorpusSpec, differential_soundness, gen_system,
                            run_engine, sequence_suite)
from smckit.oracle import reach


def test_generation_is_deterministic():
    spec = CorpusSpec(seed=1, count=1)
    assert gen_system(spec, 0) == gen_system(spec, 0)
    assert gen_system(spec, 0) != gen_system(spec, 1)


def test_generated_widths_respect_range():
    spec = CorpusSpec(seed=5, count=40, width_min=3, width_max=5)
    for i in range(spec.count):
        assert 3 <= gen_system(spec, i).width <= 5


def test_small_corpus_has_both_classes():
    spec = CorpusSpec(seed=42, count=60)
    classes = {reach(gen_system(spec, i)).safe for i in range(spec.count)}
    assert classes == {True, False}


def test_differential_mini_run():
    spec = CorpusSpec(seed=11, count=40)
    report = differential_soundness(spec, k_max=10, conflict_budget=50_000)
    assert report.ok, report.violations
    assert report.oracle_safe + report.oracle_unsafe == 40
    # Engines other than the refuter decide most of this corpus.
    assert report.per_engine["pdr"].unknown == 0
    assert report.per_engine["bmc"].safe == 0
    parsed = json.loads(report.to_json())
    assert parsed["ok"] and parsed["schema_version"] == "1"


def test_differential_parallel_matches_serial():
    spec = CorpusSpec(seed=13, count=16)
    a = differential_soundness(spec, k_max=8)
    b = differential_soundness(spec, k_max=8, jobs=2)
    assert a.to_json() == b.to_json()


def test_lying_engine_is_flagged(shift3, mutant):
    spec = CorpusSpec(seed=11, count=12)
    report = differential_soundness(spec, engines=("liar",), k_max=6)
    assert not report.ok
    assert any("liar" in v for v in report.violations)
    assert run_engine("liar", mutant, k_max=4, conflict_budget=1000).is_safe


def test_sequence_suite_mini():
    report = sequence_suite(seed=3, trials=250)
    assert report.ok, report.to_text()
    for name, stats in report.lemmas.items():
        assert stats.failures == 0, name
        assert stats.trials == 250
    assert report.split_converse_found_at is not None
