from __future__ import annotations

import json

import pytest

from stforge.checks.defects import inject_defect
from stforge.checks.diagnostics import Category
from stforge.cli import main
from stforge.dialect.parser import parse_source
from stforge.prompting import canonical_example_source


@pytest.fixture()
def data_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("STFORGE_DATA_DIR", str(tmp_path / "data"))
    return tmp_path / "data"


def test_compile_clean_file_exits_zero(tmp_path, capsys):
    path = tmp_path / "ok.st"
    path.write_text(canonical_example_source())
    assert main(["compile", str(path)]) == 0
    out = capsys.readouterr().out
    assert "success" in out


def test_compile_defective_file_exits_one(tmp_path, capsys):
    path = tmp_path / "bad.st"
    path.write_text(inject_defect(
        parse_source(canonical_example_source()), Category.UNUSED_FUNCTION_BLOCK,
    ))
    assert main(["compile", str(path)]) == 1
    out = capsys.readouterr().out
    assert "E005" in out and "failed" in out


def test_compile_emit_labels(tmp_path, capsys):
    path = tmp_path / "labels.st"
    path.write_text("PROGRAM P VAR aa : INT; bb : BOOL; END_VAR aa := 1; END_PROGRAM")
    assert main(["compile", str(path), "--emit-labels"]) == 0
    out = capsys.readouterr().out
    assert "labels extracted: 2" in out


def test_ingest_then_chat(data_dir, capsys):
    assert main(["ingest"]) == 0
    capsys.readouterr()
    assert main(["chat", "blink a lamp every second with a timer"]) == 0
    out = capsys.readouterr().out
    assert "stub-rag" in out and "stub-standard" in out and "stub-local-rag" in out
    assert "compiled" in out


def test_chat_draft_mode_skips_compiling(data_dir, capsys):
    assert main(["chat", "draft something", "--draft"]) == 0
    out = capsys.readouterr().out
    assert "not compiled (draft)" in out


def test_bench_writes_artifacts(data_dir, tmp_path, capsys):
    queries = tmp_path / "queries.txt"
    queries.write_text("\n".join(f"benchmark task {i}" for i in range(5)))
    out_base = tmp_path / "results" / "bench"
    assert main(["bench", "--queries", str(queries), "--seed", "7",
                 "--out", str(out_base)]) == 0
    assert (tmp_path / "results" / "bench.txt").exists()
    assert (tmp_path / "results" / "bench.records.jsonl").exists()
    assert (tmp_path / "results" / "bench.png").exists()
    stdout = capsys.readouterr().out
    assert "stub-rag" in stdout and "Compiled" in stdout


def test_datagen_writes_dataset(data_dir, tmp_path, capsys):
    out = tmp_path / "pairs.jsonl"
    assert main(["datagen", "--n", "6", "--seed", "3", "--out", str(out)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["accepted"] + sum(stats["rejected"].values()) == 6
    lines = out.read_text().splitlines() if out.exists() else []
    assert len(lines) == stats["accepted"]


def test_missing_file_is_reported(capsys):
    assert main(["compile", "no-such-file.st"]) == 2
    assert "error:" in capsys.readouterr().err


def test_compile_json_record_stream(tmp_path, capsys):
    path = tmp_path / "bad.st"
    path.write_text("PROGRAM P VAR qq : UINT; END_VAR ghost := 1; END_PROGRAM")
    assert main(["compile", str(path), "--json"]) == 1
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert len(lines) == 3  # two diagnostics + summary
    assert {line.get("category") for line in lines[:-1]} == {"UnknownDatatype", "UndeclaredVariable"}
    assert lines[-1]["status"] == "Failed"
