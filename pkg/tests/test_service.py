from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from stforge.backends import GeneratorConfig, GeneratorKind, StubMode, StubScript
from stforge.checks.defects import inject_defect
from stforge.checks.diagnostics import Category
from stforge.dialect.parser import parse_source
from stforge.orchestrator import SessionStore
from stforge.prompting import canonical_example_source
from stforge.service import create_app


def stub_config(label: str, mode: StubMode, retrieval: bool = True, **kw) -> GeneratorConfig:
    return GeneratorConfig(
        label=label, kind=GeneratorKind.STUB, retrieval_enabled=retrieval,
        stub_script=StubScript(mode, **kw),
    )


@pytest.fixture()
def client(profile, knowledge_store, tmp_path):
    configs = [
        stub_config("stub-rag", StubMode.EMIT_CANONICAL),
        stub_config("stub-standard", StubMode.EMIT_CATALOG_AWARE, retrieval=False),
        stub_config("stub-local-rag", StubMode.EMIT_WITH_DEFECTS, defect_count=1,
                    defect_categories=("UndeclaredVariable",), fix_one_per_repair=True),
    ]
    sessions = SessionStore(tmp_path / "sessions")
    app = create_app(profile, configs, knowledge_store, sessions)
    return TestClient(app)


def sse_events(response) -> list[tuple[str, dict]]:
    events = []
    event_name = None
    for line in response.text.splitlines():
        if line.startswith("event: "):
            event_name = line[len("event: "):]
        elif line.startswith("data: "):
            events.append((event_name, json.loads(line[len("data: "):])))
    return events


# -- /compile -----------------------------------------------------------------

def test_compile_canonical_example_succeeds(client):
    response = client.post("/compile", json={
        "schema_version": 1,
        "source": canonical_example_source(),
        "profile_id": "melsec-iqr",
    })
    assert response.status_code == 200
    body = response.json()
    assert body["schema_version"] == 1
    assert body["report"]["status"] == "Success"
    assert body["report"]["diagnostics"] == []


def test_compile_reserved_word_defect_fails_with_one_diagnostic(client, canonical_source):
    defective = inject_defect(parse_source(canonical_source), Category.RESERVED_WORD_VIOLATION)
    response = client.post("/compile", json={"source": defective})
    assert response.status_code == 200
    report = response.json()["report"]
    assert report["status"] == "Failed"
    assert [d["category"] for d in report["diagnostics"]] == ["ReservedWordViolation"]
    assert report["diagnostics"][0]["code"] == "E002"


def test_compile_syntax_error_surfaces_as_structure_violation(client):
    response = client.post("/compile", json={"source": "PROGRAM P IF b END_PROGRAM"})
    report = response.json()["report"]
    assert report["status"] == "Failed"
    assert all(d["category"] == "StructureViolation" for d in report["diagnostics"])


def test_compile_emits_label_manifest(client):
    source = "PROGRAM P VAR aa : INT; bb : BOOL := TRUE; END_VAR aa := 1; END_PROGRAM"
    response = client.post("/compile", json={"source": source, "emit_label_manifest": True})
    body = response.json()
    assert body["report"]["status"] == "Success"
    assert [label["name"] for label in body["label_manifest"]] == ["aa", "bb"]
    assert body["label_manifest"][1]["initializer"] == "TRUE"


def test_compile_oversize_body_is_413(client):
    response = client.post("/compile", json={"source": "x" * (2 << 20)})
    assert response.status_code == 413


def test_compile_malformed_body_is_400(client):
    assert client.post("/compile", content=b"not json").status_code == 400
    assert client.post("/compile", json={"nope": 1}).status_code == 400


# -- sessions and streaming ------------------------------------------------------

def test_session_lifecycle(client):
    created = client.post("/sessions", json={"settings": {"expansion": True}})
    assert created.status_code == 200
    session = created.json()["session"]
    assert session["settings"]["expansion"] is True

    fetched = client.get(f"/sessions/{session['id']}")
    assert fetched.status_code == 200
    assert fetched.json()["session"]["id"] == session["id"]

    assert client.get("/sessions/does-not-exist").status_code == 404


def test_initial_message_streams_three_paths(client):
    session_id = client.post("/sessions").json()["session"]["id"]
    response = client.post(f"/sessions/{session_id}/message",
                           json={"text": "blink a lamp with a timer"})
    assert response.status_code == 200
    events = sse_events(response)

    labels = {payload["label"] for name, payload in events if name == "delta"}
    assert labels == {"stub-rag", "stub-standard", "stub-local-rag"}

    compiles = [payload for name, payload in events if name == "compile"]
    assert len(compiles) >= 3  # one per path at minimum, repairs add more

    done = [payload for name, payload in events if name == "done"]
    assert len(done) == 1
    assert [p["config_label"] for p in done[0]["paths"]] == \
        ["stub-rag", "stub-standard", "stub-local-rag"]

    # Per-path ordering: every delta precedes every compile for that path.
    for label in labels:
        kinds = [name for name, payload in events if payload.get("label") == label]
        if "compile" in kinds:
            assert kinds.index("compile") > max(
                i for i, k in enumerate(kinds) if k == "delta"
            )


def test_followup_streams_single_path(client):
    session_id = client.post("/sessions").json()["session"]["id"]
    client.post(f"/sessions/{session_id}/message", json={"text": "first question"})
    response = client.post(
        f"/sessions/{session_id}/message",
        json={"text": "refine it", "model": "stub-rag"},
    )
    events = sse_events(response)
    labels = {payload["label"] for name, payload in events if name == "delta"}
    assert labels == {"stub-rag"}
    done = [payload for name, payload in events if name == "done"]
    assert len(done) == 1 and len(done[0]["paths"]) == 1


def test_followup_with_unknown_model_emits_error_event(client):
    session_id = client.post("/sessions").json()["session"]["id"]
    client.post(f"/sessions/{session_id}/message", json={"text": "first"})
    response = client.post(
        f"/sessions/{session_id}/message",
        json={"text": "again", "model": "not-a-model"},
    )
    events = sse_events(response)
    assert events[-1][0] == "error"
    assert sum(1 for name, _ in events if name in ("done", "error")) == 1


def test_message_to_unknown_session_404(client):
    assert client.post("/sessions/ghost/message", json={"text": "hi"}).status_code == 404


def test_session_state_reconstructable_after_stream(client):
    session_id = client.post("/sessions").json()["session"]["id"]
    client.post(f"/sessions/{session_id}/message", json={"text": "persist this"})
    session = client.get(f"/sessions/{session_id}").json()["session"]
    roles = [turn["role"] for turn in session["turns"]]
    assert roles == ["user", "assistant", "assistant", "assistant"]
    assert session["turns"][1]["compile_report"] is not None


def test_every_stream_terminates_with_exactly_one_done_or_error(client):
    session_id = client.post("/sessions").json()["session"]["id"]
    for i in range(10):
        response = client.post(f"/sessions/{session_id}/message",
                               json={"text": f"scripted stream {i}"})
        events = sse_events(response)
        terminators = [name for name, _ in events if name in ("done", "error")]
        assert terminators == ["done"], i
        assert events[-1][0] == "done"


# -- upload ------------------------------------------------------------------------

def test_upload_text_file(client):
    response = client.post("/upload?filename=example.st",
                           content=b"IF a THEN b := 1; END_IF;\n" * 100)
    assert response.status_code == 200
    body = response.json()
    assert body["chunks_indexed"] >= 1
    assert body["filename"] == "example.st"


def test_upload_binary_rejected(client):
    response = client.post("/upload?filename=blob.bin", content=b"\x00\x01\x02binary")
    assert response.status_code == 400
    assert response.json()["code"] == "BinaryContentRejected"


def test_upload_bad_encoding_rejected(client):
    response = client.post("/upload?filename=legacy.txt",
                           content="müll".encode("latin-1") * 10)
    assert response.status_code == 400
    assert response.json()["code"] == "EncodingRejected"


def test_upload_oversize_rejected(client):
    response = client.post("/upload?filename=big.txt", content=b"x" * (2 << 20))
    assert response.status_code == 413


# -- introspection --------------------------------------------------------------------

def test_health_reports_segments_and_profile(client, knowledge_store):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["profile_id"] == "melsec-iqr"
    assert body["segments"]["FunctionBlocks"] == len(knowledge_store.documents())
    assert body["models"] == ["stub-rag", "stub-standard", "stub-local-rag"]


def test_profiles_endpoint(client):
    body = client.get("/profiles").json()
    assert body["active"] == "melsec-iqr"
    assert "melsec-iqr" in body["available"]


def test_adapter_timeout_maps_to_504(profile, knowledge_store, tmp_path):
    from stforge.checks.diagnostics import CompileReport, ReportStatus
    from stforge.compiler import CompileOutcome

    class StalledAdapter:
        identity = "external-adapter/stalled"

        def compile(self, source, *, register_labels=False, strict_labels=None,
                    timeout_ms=30_000.0):
            return CompileOutcome(report=CompileReport(
                status=ReportStatus.TIMEOUT, compiler_id=self.identity,
            ))

    app = create_app(
        profile,
        [stub_config("stub", StubMode.EMIT_CANONICAL)],
        knowledge_store,
        SessionStore(tmp_path / "s"),
        compiler=StalledAdapter(),
    )
    response = TestClient(app).post("/compile", json={"source": "PROGRAM P ; END_PROGRAM"})
    assert response.status_code == 504
    assert response.json()["report"]["status"] == "Timeout"
