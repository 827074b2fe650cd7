from __future__ import annotations

import pytest

from stforge.backends import GeneratorConfig, GeneratorKind
from stforge.checks.diagnostics import ReportStatus
from stforge.compiler import InternalCompiler
from stforge.knowledge import Segment
from stforge.prompting import (
    BudgetExceeded, build_generation_prompt, build_repair_prompt,
    canonical_example_source, condense_history, estimate_tokens, expand_query,
    render_constraints, sanitize,
)

STUB = GeneratorConfig(label="expander", kind=GeneratorKind.STUB)


def test_canonical_example_invariants(profile):
    source = canonical_example_source()
    report = InternalCompiler(profile).compile(source).report
    assert report.status is ReportStatus.SUCCESS, [d.render() for d in report.diagnostics]
    upper = source.upper()
    assert "TON" in upper          # timer invocation
    assert "CASE" in upper         # state machine
    assert "RTRIG" in upper        # edge detection idiom


def test_empty_retrieval_yields_mandatory_sections_only(profile):
    bundle = build_generation_prompt("blink a lamp", {}, profile)
    names = [name for name, _ in bundle.sections]
    assert names == ["role", "constraints", "example", "format"]
    assert bundle.user_text == "blink a lamp"


def test_retrieved_doc_text_appears_verbatim(profile, knowledge_store):
    results = knowledge_store.search("rising edge push", Segment.FUNCTION_BLOCKS, k=2)
    bundle = build_generation_prompt(
        "save registers on a rising edge",
        {Segment.FUNCTION_BLOCKS: results}, profile,
    )
    section = bundle.section(Segment.FUNCTION_BLOCKS.value)
    assert section is not None
    assert results[0][0].text in section
    names = [name for name, _ in bundle.sections]
    assert names == ["role", "constraints", Segment.FUNCTION_BLOCKS.value, "example", "format"]


def test_sections_concatenate_to_system_text(profile, knowledge_store):
    results = knowledge_store.search("timer", Segment.FUNCTION_BLOCKS, k=3)
    bundle = build_generation_prompt("a timer", {Segment.FUNCTION_BLOCKS: results}, profile)
    assert "".join(text for _, text in bundle.sections) == bundle.system_text


def test_oversized_retrieval_is_capped(profile, knowledge_store):
    from stforge.knowledge.store import KnowledgeDoc
    import numpy as np
    huge = KnowledgeDoc(
        id="x" * 32, segment=Segment.SPECS, text="spec " * 8000,
        metadata={}, vector=np.zeros(256),
    )
    bundle = build_generation_prompt(
        "quite a big one", {Segment.SPECS: [(huge, 1.0)]}, profile,
    )
    section = bundle.section(Segment.SPECS.value)
    assert section is not None
    # Cap is 3000 chars of sanitized body plus the section header.
    assert len(section) <= 3000 + 64
    assert bundle.token_estimate <= 12_000


def test_budget_exceeded_when_mandatory_does_not_fit(profile):
    with pytest.raises(BudgetExceeded):
        build_generation_prompt("query", {}, profile, token_budget=100)


def test_prompt_determinism(profile, knowledge_store):
    retrieved = {
        Segment.FUNCTION_BLOCKS: knowledge_store.search("timer", Segment.FUNCTION_BLOCKS, k=4),
    }
    history = [("user", "earlier question"), ("assistant", "earlier answer")]
    one = build_generation_prompt("do it again", retrieved, profile, history)
    two = build_generation_prompt("do it again", retrieved, profile, history)
    assert one == two
    assert one.system_text == two.system_text and one.user_text == two.user_text


def test_constraints_cover_profile_vocabulary(profile):
    text = render_constraints(profile)
    for word in profile.reserved_words:
        assert word in text
    for datatype in profile.allowed_datatypes:
        assert datatype in text
    for instruction in profile.disallowed_instructions:
        assert instruction in text
    assert "must also be invoked" in text  # FB usage rule


def test_sanitize_strips_control_chars():
    dirty = "line1\x00\x07\r\nline2\tok\x1b"
    clean = sanitize(dirty, 100)
    assert clean == "line1\nline2\tok"


def test_estimate_tokens_quarter_heuristic():
    assert estimate_tokens("") == 0
    assert estimate_tokens("abcd") == 1
    assert estimate_tokens("abcde") == 2


# -- repair prompts ---------------------------------------------------------

def test_repair_prompt_embeds_diagnostics_verbatim(profile):
    compiler = InternalCompiler(profile)
    code = "PROGRAM P VAR RETAIN : BOOL; END_VAR RETAIN := TRUE; END_PROGRAM"
    report = compiler.compile(code).report
    assert report.status is ReportStatus.FAILED
    bundle = build_repair_prompt(code, report, profile)
    for diagnostic in report.diagnostics:
        assert diagnostic.render() in bundle.system_text
    assert code.rstrip() in bundle.system_text
    assert "preserving" in bundle.system_text  # keep validated segments
    for category in ("UndeclaredVariable", "ReservedWordViolation",
                     "TypeMismatch", "DisallowedInstruction"):
        assert category in bundle.system_text  # category guidance block


def test_repair_prompt_preserves_diagnostic_order(profile):
    compiler = InternalCompiler(profile)
    code = (
        "PROGRAM P VAR qq : UINT; END_VAR\n"
        "ghost := 1;\nOUT(TRUE);\nEND_PROGRAM"
    )
    report = compiler.compile(code).report
    bundle = build_repair_prompt(code, report, profile)
    rendered = [d.render() for d in report.diagnostics]
    positions = [bundle.system_text.index(r) for r in rendered]
    assert positions == sorted(positions)


def test_repair_prompt_requires_failed_report(profile):
    compiler = InternalCompiler(profile)
    report = compiler.compile(canonical_example_source()).report
    with pytest.raises(ValueError, match="failed"):
        build_repair_prompt("PROGRAM P ; END_PROGRAM", report, profile)


# -- query expansion ----------------------------------------------------------

def test_expansion_adds_construct_keywords():
    expanded = expand_query("blink a lamp every second", STUB)
    assert expanded.startswith("blink a lamp every second")
    assert "timer" in expanded


def test_short_query_passes_through():
    assert expand_query("help", STUB) == "help"


def test_unmatched_topics_pass_through():
    query = "please do something unusual entirely"
    assert expand_query(query, STUB) == query


def test_expansion_propagates_backend_errors():
    from stforge.backends import BackendError
    remote = GeneratorConfig(
        label="remote", kind=GeneratorKind.REMOTE_CHAT,
        endpoint="http://127.0.0.1:1", model_name="m", timeout_ms=200.0,
    )
    with pytest.raises(BackendError):
        expand_query("blink a lamp every second", remote)


# -- history condensation -------------------------------------------------------

def test_short_history_unchanged():
    turns = [("user", "hello"), ("assistant", "hi there")]
    assert condense_history(turns, budget=500) == turns


def test_long_history_condenses_to_summary_plus_tail():
    turns = []
    for i in range(50):
        turns.append(("user", f"question {i} " + "padding words " * 20))
        turns.append(("assistant", f"answer {i} " + "padding words " * 20))
    condensed = condense_history(turns, budget=600)
    assert condensed[0][0] == "system"
    assert "condensed" in condensed[0][1]
    assert condensed[1:] == turns[-(len(condensed) - 1):]
    total = sum(estimate_tokens(text) + 2 for _, text in condensed)
    assert total <= 600


def test_empty_history():
    assert condense_history([], budget=100) == []
