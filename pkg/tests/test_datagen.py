from __future__ import annotations

import collections
import io
import json

import pytest

from stforge.backends import GeneratorConfig, GeneratorKind, StubMode, StubScript
from stforge.checks.diagnostics import Category, ReportStatus
from stforge.compiler import InternalCompiler
from stforge.datagen import (
    DatasetSinkError, curate_dataset, default_flags, default_personas,
    generate_queries,
)

PERSONAS = ["casual developer", "control engineer", "electrician jargon", "plc student"]
FLAGS = ["timers", "communication", "array processing"]


def stub(mode: StubMode, **kw) -> GeneratorConfig:
    return GeneratorConfig(
        label="datagen-stub", kind=GeneratorKind.STUB,
        retrieval_enabled=False, stub_script=StubScript(mode, **kw),
    )


# -- query generation --------------------------------------------------------

def test_balanced_batch_12_queries():
    specs = generate_queries(PERSONAS, FLAGS, n=12, seed=9)
    personas = collections.Counter(spec.persona for spec in specs)
    flags = collections.Counter(flag for spec in specs for flag in spec.flags)
    assert all(count == 3 for count in personas.values())   # 12 / 4
    assert all(count == 4 for count in flags.values())      # 12 / 3
    assert len(personas) == 4 and len(flags) == 3


def test_uneven_batch_within_one():
    specs = generate_queries(PERSONAS, FLAGS, n=10, seed=1)
    personas = collections.Counter(spec.persona for spec in specs)
    assert max(personas.values()) - min(personas.values()) <= 1


def test_single_query():
    specs = generate_queries(PERSONAS, FLAGS, n=1, seed=0)
    assert len(specs) == 1


def test_determinism_same_seed():
    a = generate_queries(PERSONAS, FLAGS, n=20, seed=77)
    b = generate_queries(PERSONAS, FLAGS, n=20, seed=77)
    assert [s.to_record() for s in a] == [s.to_record() for s in b]
    c = generate_queries(PERSONAS, FLAGS, n=20, seed=78)
    assert [s.to_record() for s in a] != [s.to_record() for s in c]


def test_query_text_references_flag_topic():
    specs = generate_queries(default_personas(), default_flags(), n=24, seed=3)
    for spec in specs:
        flag = next(iter(spec.flags))
        keyword = flag.split()[0].rstrip("s")  # 'timers' -> 'timer'
        assert keyword.lower() in spec.text.lower(), spec.to_record()


def test_rejects_empty_inputs():
    with pytest.raises(ValueError):
        generate_queries([], FLAGS, n=1, seed=0)
    with pytest.raises(ValueError):
        generate_queries(PERSONAS, FLAGS, n=0, seed=0)


# -- curation -----------------------------------------------------------------

def test_canonical_stub_accepts_everything(profile):
    specs = generate_queries(PERSONAS, FLAGS, n=10, seed=5)
    sink = io.StringIO()
    stats = curate_dataset(specs, stub(StubMode.EMIT_CANONICAL), sink, profile=profile)
    assert stats == {"accepted": 10, "rejected": {}}
    lines = [json.loads(line) for line in sink.getvalue().splitlines()]
    assert len(lines) == 10
    assert all(line["provenance"]["attempt"] == 1 for line in lines)


def test_defect_stub_rejects_everything_as_compile_failed(profile):
    specs = generate_queries(PERSONAS, FLAGS, n=10, seed=5)
    sink = io.StringIO()
    config = stub(StubMode.EMIT_WITH_DEFECTS, defect_count=1,
                  defect_categories=("TypeMismatch",), fix_one_per_repair=False)
    stats = curate_dataset(specs, config, sink, profile=profile)
    assert stats == {"accepted": 0, "rejected": {"CompileFailed": 10}}
    assert sink.getvalue() == ""


def test_unused_fb_rejections_are_tallied_separately(profile):
    specs = generate_queries(PERSONAS, FLAGS, n=6, seed=2)
    config = stub(StubMode.EMIT_WITH_DEFECTS, defect_count=1,
                  defect_categories=("UnusedFunctionBlock",), fix_one_per_repair=False)
    stats = curate_dataset(specs, config, io.StringIO(), profile=profile)
    assert stats == {"accepted": 0, "rejected": {"UnusedFB": 6}}


def test_prose_stub_rejects_as_no_code(profile):
    specs = generate_queries(PERSONAS, FLAGS, n=4, seed=2)
    stats = curate_dataset(specs, stub(StubMode.EMIT_PROSE), io.StringIO(), profile=profile)
    assert stats == {"accepted": 0, "rejected": {"NoCode": 4}}


def test_accounting_always_balances(profile, knowledge_store):
    specs = generate_queries(default_personas(), default_flags(), n=30, seed=11)
    config = GeneratorConfig(
        label="mixed", kind=GeneratorKind.STUB, retrieval_enabled=True,
        stub_script=StubScript(StubMode.EMIT_CATALOG_AWARE),
    )
    stats = curate_dataset(specs, config, io.StringIO(), profile=profile,
                           knowledge=knowledge_store)
    assert stats["accepted"] + sum(stats["rejected"].values()) == 30


def test_persisted_pairs_recompile_clean(profile, knowledge_store, tmp_path):
    specs = generate_queries(default_personas(), default_flags(), n=25, seed=4)
    config = GeneratorConfig(
        label="rag", kind=GeneratorKind.STUB, retrieval_enabled=True,
        stub_script=StubScript(StubMode.EMIT_CATALOG_AWARE),
    )
    out = tmp_path / "dataset.jsonl"
    stats = curate_dataset(specs, config, out, profile=profile, knowledge=knowledge_store)
    assert stats["accepted"] > 0

    compiler = InternalCompiler(profile)
    for line in out.read_text().splitlines():
        pair = json.loads(line)
        report = compiler.compile(pair["code"]).report
        assert report.status is ReportStatus.SUCCESS
        assert Category.UNUSED_FUNCTION_BLOCK not in report.categories()


def test_allow_repaired_accepts_fixable_output(profile):
    specs = generate_queries(PERSONAS, FLAGS, n=3, seed=6)
    config = stub(StubMode.EMIT_WITH_DEFECTS, defect_count=1,
                  defect_categories=("UndeclaredVariable",), fix_one_per_repair=True)
    strict = curate_dataset(specs, config, io.StringIO(), profile=profile)
    assert strict["accepted"] == 0
    relaxed = curate_dataset(specs, config, io.StringIO(), profile=profile,
                             allow_repaired=True)
    assert relaxed["accepted"] == 3


def test_sink_error_reports_partial_progress(profile):
    class ExplodingSink(io.StringIO):
        def __init__(self):
            super().__init__()
            self.writes = 0

        def write(self, text):
            self.writes += 1
            if self.writes > 2:
                raise OSError("disk full")
            return super().write(text)

    specs = generate_queries(PERSONAS, FLAGS, n=5, seed=5)
    with pytest.raises(DatasetSinkError) as err:
        curate_dataset(specs, stub(StubMode.EMIT_CANONICAL), ExplodingSink(), profile=profile)
    assert err.value.accepted == 2
