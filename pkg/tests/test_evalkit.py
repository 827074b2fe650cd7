from __future__ import annotations

import json

import pytest

from stforge.backends import GeneratorConfig, GeneratorKind, StubMode, StubScript
from stforge.evalkit import (
    EvalRecord, EvalRow, EvalTable, load_queries, render_figure, render_report,
    run_benchmark, write_outputs,
)

RAG = GeneratorConfig(label="stub-rag", kind=GeneratorKind.STUB, retrieval_enabled=True,
                      stub_script=StubScript(StubMode.EMIT_CATALOG_AWARE))
STANDARD = GeneratorConfig(label="stub-standard", kind=GeneratorKind.STUB,
                           retrieval_enabled=False,
                           stub_script=StubScript(StubMode.EMIT_CATALOG_AWARE))


def record(label: str, compiled: bool, repairs: int = 0,
           reason: str | None = None, qid: str = "q001") -> EvalRecord:
    return EvalRecord(
        query_id=qid, config_label=label, compiled=compiled,
        repairs_used=repairs, failure_reason=reason, elapsed_ms=1.0,
    )


def test_table_percentages_match_prose_semantics():
    # 73 of 100 compiled, 23 of those via repair: the Repaired column counts
    # queries that compiled only after >= 1 repair.
    records = (
        [record("m", True, repairs=0, qid=f"q{i:03d}") for i in range(50)]
        + [record("m", True, repairs=1, qid=f"q{i:03d}") for i in range(50, 73)]
        + [record("m", False, reason="budget_exhausted", qid=f"q{i:03d}") for i in range(73, 100)]
    )
    table = EvalTable.from_records(records)
    assert table.rows == [EvalRow(config_label="m", n=100, compiled_pct=73, repaired_pct=23)]
    report = render_report(records)
    assert "73%" in report and "23%" in report


def test_rounding_is_half_up():
    records = [record("m", True, qid=f"q{i}") for i in range(1)] + \
              [record("m", False, reason="no_code", qid=f"q{i + 1}") for i in range(7)]
    # 1/8 = 12.5% rounds half-up to 13%
    assert EvalTable.from_records(records).rows[0].compiled_pct == 13


def test_single_compiled_record_renders_100_0():
    report = render_report([record("m", True)])
    assert "100%" in report and "0%" in report
    assert "(none)" in report  # no failure reasons


def test_all_failed_renders_zero_with_reason_breakdown():
    records = [
        record("m", False, reason="no_code", qid="q001"),
        record("m", False, reason="budget_exhausted", qid="q002"),
        record("m", False, reason="budget_exhausted", qid="q003"),
    ]
    report = render_report(records)
    assert "0%" in report
    assert "budget_exhausted: 2" in report and "no_code: 1" in report


def test_row_invariant_enforced():
    with pytest.raises(ValueError):
        EvalRow(config_label="m", n=10, compiled_pct=40, repaired_pct=50)


def test_record_invariants():
    with pytest.raises(ValueError):
        EvalRecord("q", "m", compiled=False, repairs_used=0,
                   failure_reason=None, elapsed_ms=1.0)
    with pytest.raises(ValueError):
        EvalRecord("q", "m", compiled=True, repairs_used=3,
                   failure_reason=None, elapsed_ms=1.0)


def test_load_queries_skips_comments(tmp_path):
    path = tmp_path / "queries.txt"
    path.write_text("# heading\nfirst query\n\nsecond query\n")
    queries = load_queries(path)
    assert queries == [("q002", "first query"), ("q004", "second query")]


def test_benchmark_produces_one_record_per_cell(profile, knowledge_store):
    queries = [(f"q{i:03d}", f"benchmark task {i}") for i in range(6)]
    records = run_benchmark(queries, [RAG, STANDARD], profile=profile,
                            knowledge=knowledge_store, seed=3)
    assert len(records) == len(queries) * 2
    labels = {r.config_label for r in records}
    assert labels == {"stub-rag", "stub-standard"}


def test_benchmark_deterministic_report_bytes(profile, knowledge_store):
    queries = [(f"q{i:03d}", f"benchmark task {i}") for i in range(8)]
    first = run_benchmark(queries, [RAG, STANDARD], profile=profile,
                          knowledge=knowledge_store, seed=42)
    second = run_benchmark(queries, [RAG, STANDARD], profile=profile,
                           knowledge=knowledge_store, seed=42)
    assert render_report(first) == render_report(second)
    third = run_benchmark(queries, [RAG], profile=profile,
                          knowledge=knowledge_store, seed=43)
    assert render_report(third) != render_report(first)


def test_benchmark_rejects_empty_inputs(profile):
    with pytest.raises(ValueError):
        run_benchmark([], [RAG], profile=profile)
    with pytest.raises(ValueError):
        run_benchmark([("q1", "x")], [], profile=profile)


def test_write_outputs_creates_three_artifacts(profile, knowledge_store, tmp_path):
    queries = [(f"q{i:03d}", f"artifact task {i}") for i in range(4)]
    records = run_benchmark(queries, [RAG], profile=profile,
                            knowledge=knowledge_store, seed=1)
    paths = write_outputs(records, tmp_path / "out" / "bench")
    assert paths["report"].read_text().startswith("Compilation success rates")
    lines = paths["records"].read_text().splitlines()
    assert len(lines) == 4
    parsed = json.loads(lines[0])
    assert set(parsed) == {"query_id", "config_label", "compiled",
                           "repairs_used", "failure_reason", "elapsed_ms"}
    assert paths["figure"].stat().st_size > 1000  # a real PNG, not a stub
    assert paths["figure"].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_figure_standalone(tmp_path):
    records = [record("alpha", True), record("beta", False, reason="no_code")]
    out = render_figure(records, tmp_path / "fig.png")
    assert out.exists()
