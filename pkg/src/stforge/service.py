"""HTTP surface: compilation, chat sessions with SSE streaming, uploads.

One service fronts the compile oracle and the orchestrator; the browser UI
consumes only this API.  Every JSON payload carries ``schema_version``.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse

from .backends import GeneratorConfig
from .checks.profile import DialectProfile
from .compiler import CompilerAdapter, InternalCompiler
from .knowledge.store import (
    BinaryContentRejected, EncodingRejected, KnowledgeStore,
)
from .orchestrator import (
    ChatSettings, Orchestrator, SessionStore, UnknownModelLabel,
)

SCHEMA_VERSION = 1
MAX_COMPILE_SOURCE_BYTES = 1 << 20   # 1 MiB
MAX_UPLOAD_BYTES = 1 << 20


@dataclass
class ServiceState:
    profile: DialectProfile
    orchestrator: Orchestrator
    knowledge: KnowledgeStore
    sessions: SessionStore
    compiler: CompilerAdapter


def create_app(
    profile: DialectProfile,
    configs: list[GeneratorConfig],
    knowledge: KnowledgeStore,
    sessions: SessionStore,
    compiler: CompilerAdapter | None = None,
) -> FastAPI:
    compiler = compiler or InternalCompiler(profile)
    orchestrator = Orchestrator(
        profile, configs, knowledge=knowledge, compiler=compiler,
        session_store=sessions,
    )
    state = ServiceState(profile, orchestrator, knowledge, sessions, compiler)

    app = FastAPI(title="stforge", version="0.1.0")
    app.state.stforge = state

    # -- compile ---------------------------------------------------------

    @app.post("/compile")
    async def compile_endpoint(request: Request) -> Response:
        try:
            body = json.loads(await request.body())
            source = body["source"]
            if not isinstance(source, str):
                raise TypeError("source must be a string")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return _error(400, f"malformed compile request: {exc}")
        if len(source.encode("utf-8")) > MAX_COMPILE_SOURCE_BYTES:
            return _error(413, "source exceeds the 1 MiB limit")

        outcome = state.compiler.compile(
            source,
            register_labels=bool(body.get("emit_label_manifest", False)),
            strict_labels=body.get("strict_labels"),
        )
        payload = {
            "schema_version": SCHEMA_VERSION,
            "report": outcome.report.to_record(),
        }
        if outcome.manifest is not None:
            payload["label_manifest"] = outcome.manifest.to_records()
        status = 504 if outcome.report.status.value == "Timeout" else 200
        return JSONResponse(payload, status_code=status)

    # -- sessions ----------------------------------------------------------

    @app.post("/sessions")
    async def create_session(request: Request) -> Response:
        body = {}
        raw = await request.body()
        if raw:
            try:
                body = json.loads(raw)
            except json.JSONDecodeError as exc:
                return _error(400, f"malformed session request: {exc}")
        settings = ChatSettings.from_record(body.get("settings", {}))
        session = state.sessions.create(settings)
        return JSONResponse({
            "schema_version": SCHEMA_VERSION,
            "session": _session_record(state, session.id),
        })

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str) -> Response:
        if not state.sessions.exists(session_id):
            return _error(404, f"unknown session {session_id!r}")
        return JSONResponse({
            "schema_version": SCHEMA_VERSION,
            "session": _session_record(state, session_id),
        })

    @app.post("/sessions/{session_id}/message")
    async def post_message(session_id: str, request: Request) -> Response:
        if not state.sessions.exists(session_id):
            return _error(404, f"unknown session {session_id!r}")
        try:
            body = json.loads(await request.body())
            text = body["text"]
            if not isinstance(text, str) or not text.strip():
                raise TypeError("text must be a non-empty string")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return _error(400, f"malformed message request: {exc}")

        session = state.sessions.load(session_id)
        if body.get("model"):
            session.selected_model = body["model"]
            state.sessions.set_selected_model(session_id, body["model"])

        return StreamingResponse(
            _event_stream(state, session, text),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache"},
        )

    # -- knowledge ----------------------------------------------------------

    @app.post("/upload")
    async def upload(request: Request, filename: str = "upload.txt") -> Response:
        data = await request.body()
        if len(data) > MAX_UPLOAD_BYTES:
            return _error(413, "upload exceeds the 1 MiB limit")
        try:
            ids = state.knowledge.ingest_upload(filename, data)
        except BinaryContentRejected as exc:
            return _error(400, str(exc), code="BinaryContentRejected")
        except EncodingRejected as exc:
            return _error(400, str(exc), code="EncodingRejected")
        return JSONResponse({
            "schema_version": SCHEMA_VERSION,
            "filename": filename,
            "chunks_indexed": len(ids),
            "doc_ids": ids,
        })

    # -- introspection -------------------------------------------------------

    @app.get("/health")
    async def health() -> Response:
        return JSONResponse({
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "profile_id": state.profile.id,
            "segments": state.knowledge.segment_counts(),
            "compiler_id": state.compiler.identity,
            "models": [c.label for c in state.orchestrator.configs],
        })

    @app.get("/profiles")
    async def profiles() -> Response:
        from .checks.profile import bundled_profile_ids
        return JSONResponse({
            "schema_version": SCHEMA_VERSION,
            "active": state.profile.id,
            "available": bundled_profile_ids(),
        })

    return app


def _session_record(state: ServiceState, session_id: str) -> dict:
    session = state.sessions.load(session_id)
    return {
        "id": session.id,
        "selected_model": session.selected_model,
        "settings": session.settings.to_record(),
        "turns": [turn.to_record() for turn in session.turns],
    }


def _error(status: int, message: str, code: str | None = None) -> JSONResponse:
    body = {"schema_version": SCHEMA_VERSION, "error": message}
    if code:
        body["code"] = code
    return JSONResponse(body, status_code=status)


def _sse(event: str, payload: dict) -> str:
    return f"event: {event}\ndata: {json.dumps(payload, sort_keys=True)}\n\n"


def _event_stream(state: ServiceState, session, text: str):
    """Worker thread runs the orchestrator; events flow through a queue.

    Per-path event order is deltas, then compile reports, then the path
    summary; the stream always ends with exactly one ``done`` or ``error``.
    """
    events: "queue.Queue[tuple[str, str, dict] | None]" = queue.Queue()

    def on_event(kind: str, label: str, payload: dict) -> None:
        events.put((kind, label, payload))

    outcome: dict = {}

    def run() -> None:
        try:
            if session.selected_model and len(session.turns) > 0:
                results = [state.orchestrator.answer_followup(text, session, on_event=on_event)]
            else:
                results = state.orchestrator.answer_initial(text, session, on_event=on_event)
            outcome["results"] = results
        except UnknownModelLabel as exc:
            outcome["error"] = str(exc)
        except Exception as exc:  # surface anything else as a stream error
            outcome["error"] = f"{type(exc).__name__}: {exc}"
        finally:
            events.put(None)

    worker = threading.Thread(target=run, daemon=True)
    worker.start()

    while True:
        item = events.get()
        if item is None:
            break
        kind, label, payload = item
        yield _sse(kind, {"schema_version": SCHEMA_VERSION, "label": label, **payload})

    if "error" in outcome:
        yield _sse("error", {"schema_version": SCHEMA_VERSION, "message": outcome["error"]})
    else:
        yield _sse("done", {
            "schema_version": SCHEMA_VERSION,
            "session_id": session.id,
            "paths": [result.to_record() for result in outcome.get("results", [])],
        })
