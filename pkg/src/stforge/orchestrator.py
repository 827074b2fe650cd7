"""Competitive generation orchestration and the bounded compile-repair loop.

Initial queries fan out over every configured model path concurrently; each
path independently runs expansion, retrieval, prompt construction,
generation, and (when enabled) the compile-repair loop.  One path failing
never disturbs the others.  Follow-up turns run the single user-selected
model over condensed history.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .backends import BackendError, GenerationOutput, GeneratorConfig, generate
from .checks.diagnostics import CompileReport, ReportStatus
from .checks.profile import DialectProfile
from .compiler import CompilerAdapter, InternalCompiler
from .knowledge.store import EmptyIndex, KnowledgeDoc, KnowledgeStore, Segment
from .prompting import (
    RETRIEVAL_K, build_generation_prompt, build_repair_prompt,
    condense_history, expand_query,
)

# 1 initial compilation + at most 2 repair rounds.
MAX_COMPILE_ATTEMPTS = 3
MAX_REPAIRS = MAX_COMPILE_ATTEMPTS - 1

HISTORY_TOKEN_BUDGET = 2_000

CompileFn = Callable[[str, int], CompileReport]
EventFn = Callable[[str, str, dict], None]


class UnknownModelLabel(Exception):
    pass


# -- final status -------------------------------------------------------------

FAIL_BUDGET = "budget_exhausted"
FAIL_TIMEOUT = "timeout"
FAIL_NO_CODE = "no_code"
FAIL_BACKEND = "backend_error"


@dataclass(frozen=True)
class FinalStatus:
    kind: str  # 'compiled_clean' | 'compiled_after_repair' | 'failed'
    repairs: int = 0
    reason: str | None = None

    def __post_init__(self) -> None:
        if self.kind == "compiled_after_repair" and self.repairs not in (1, 2):
            raise ValueError("repaired status requires 1 or 2 repairs")
        if self.kind == "failed" and not self.reason:
            raise ValueError("failed status requires a reason")

    @property
    def compiled(self) -> bool:
        return self.kind in ("compiled_clean", "compiled_after_repair")

    def render(self) -> str:
        if self.kind == "compiled_clean":
            return "compiled clean"
        if self.kind == "compiled_after_repair":
            return f"compiled after {self.repairs} repair(s)"
        return f"failed ({self.reason})"


def compiled_clean() -> FinalStatus:
    return FinalStatus("compiled_clean")


def compiled_after_repair(repairs: int) -> FinalStatus:
    return FinalStatus("compiled_after_repair", repairs=repairs)


def failed(reason: str) -> FinalStatus:
    return FinalStatus("failed", reason=reason)


@dataclass
class PathResult:
    config_label: str
    output: GenerationOutput
    reports: list[CompileReport] = field(default_factory=list)
    final_status: FinalStatus | None = None  # None when compilation was skipped
    final_code: str | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.reports) > MAX_COMPILE_ATTEMPTS:
            raise ValueError("more compile reports than the attempt bound allows")

    def to_record(self) -> dict:
        return {
            "config_label": self.config_label,
            "code": self.final_code,
            "explanation": self.output.explanation,
            "final_status": None if self.final_status is None else {
                "kind": self.final_status.kind,
                "repairs": self.final_status.repairs,
                "reason": self.final_status.reason,
            },
            "reports": [r.to_record() for r in self.reports],
            "warnings": self.warnings,
        }


# -- chat sessions ------------------------------------------------------------

@dataclass
class ChatSettings:
    expansion: bool = False
    draft_mode: bool = False
    compile_enabled: bool = True

    def to_record(self) -> dict:
        return {
            "expansion": self.expansion,
            "draft_mode": self.draft_mode,
            "compile_enabled": self.compile_enabled,
        }

    @staticmethod
    def from_record(record: dict) -> "ChatSettings":
        return ChatSettings(
            expansion=record.get("expansion", False),
            draft_mode=record.get("draft_mode", False),
            compile_enabled=record.get("compile_enabled", True),
        )


@dataclass
class ChatTurn:
    role: str  # 'user' | 'assistant'
    text: str
    model_label: str | None = None
    compile_report: CompileReport | None = None
    timestamp: float = field(default_factory=time.time)
    liked: bool = False

    def __post_init__(self) -> None:
        if self.role == "assistant" and not self.model_label:
            raise ValueError("assistant turns carry the producing model label")

    def to_record(self) -> dict:
        return {
            "role": self.role,
            "text": self.text,
            "model_label": self.model_label,
            "compile_report": self.compile_report.to_record() if self.compile_report else None,
            "timestamp": self.timestamp,
            "liked": self.liked,
        }

    @staticmethod
    def from_record(record: dict) -> "ChatTurn":
        report = record.get("compile_report")
        return ChatTurn(
            role=record["role"],
            text=record["text"],
            model_label=record.get("model_label"),
            compile_report=CompileReport.from_record(report) if report else None,
            timestamp=record.get("timestamp", 0.0),
            liked=record.get("liked", False),
        )


@dataclass
class ChatSession:
    id: str
    turns: list[ChatTurn] = field(default_factory=list)
    selected_model: str | None = None
    settings: ChatSettings = field(default_factory=ChatSettings)

    def history_pairs(self) -> list[tuple[str, str]]:
        return [(turn.role, turn.text) for turn in self.turns]


class SessionStore:
    """Append-only record file per session under the data directory."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        """Per-session writer lock: one active turn at a time."""
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def create(self, settings: ChatSettings | None = None) -> ChatSession:
        session = ChatSession(id=uuid.uuid4().hex[:12], settings=settings or ChatSettings())
        self._append(session.id, {"type": "settings", **session.settings.to_record()})
        return session

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.jsonl"))

    def append_turn(self, session_id: str, turn: ChatTurn) -> None:
        self._append(session_id, {"type": "turn", **turn.to_record()})

    def set_selected_model(self, session_id: str, label: str) -> None:
        self._append(session_id, {"type": "selected_model", "label": label})

    def mark_liked(self, session_id: str, turn_index: int) -> None:
        self._append(session_id, {"type": "liked", "turn_index": turn_index})

    def _append(self, session_id: str, record: dict) -> None:
        with self._path(session_id).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    def load(self, session_id: str) -> ChatSession:
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(f"unknown session {session_id!r}")
        session = ChatSession(id=session_id)
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            kind = record.pop("type")
            if kind == "settings":
                session.settings = ChatSettings.from_record(record)
            elif kind == "turn":
                session.turns.append(ChatTurn.from_record(record))
            elif kind == "selected_model":
                session.selected_model = record["label"]
            elif kind == "liked":
                index = record["turn_index"]
                if 0 <= index < len(session.turns):
                    session.turns[index].liked = True
        return session


# -- the orchestrator ---------------------------------------------------------

class Orchestrator:
    def __init__(
        self,
        profile: DialectProfile,
        configs: list[GeneratorConfig],
        knowledge: KnowledgeStore | None = None,
        compiler: CompilerAdapter | None = None,
        session_store: SessionStore | None = None,
    ) -> None:
        if not configs:
            raise ValueError("at least one generator config is required")
        self.profile = profile
        self.configs = list(configs)
        self.knowledge = knowledge
        self.compiler = compiler or InternalCompiler(profile)
        self.sessions = session_store

    def config_for(self, label: str) -> GeneratorConfig:
        for config in self.configs:
            if config.label == label:
                return config
        raise UnknownModelLabel(f"no generator config labeled {label!r}")

    # -- public entry points ---------------------------------------------

    def answer_initial(self, query: str, session: ChatSession,
                       configs: list[GeneratorConfig] | None = None,
                       on_event: EventFn | None = None) -> list[PathResult]:
        """Run every configured path concurrently; results follow config order."""
        active = configs or self.configs
        if not active:
            raise ValueError("no generator configs for this query")
        lock = self.sessions.lock(session.id) if self.sessions else threading.Lock()
        with lock:
            history = condense_history(session.history_pairs(), HISTORY_TOKEN_BUDGET)
            with ThreadPoolExecutor(max_workers=len(active)) as pool:
                futures = [
                    pool.submit(self._run_path, query, config, session.settings, history, on_event)
                    for config in active
                ]
                results = [future.result() for future in futures]
            self._record_turns(session, query, results)
        return results

    def answer_followup(self, query: str, session: ChatSession,
                        on_event: EventFn | None = None) -> PathResult:
        """Single-path turn using the session's selected model."""
        if not session.selected_model:
            raise UnknownModelLabel("session has no selected model for follow-ups")
        config = self.config_for(session.selected_model)
        lock = self.sessions.lock(session.id) if self.sessions else threading.Lock()
        with lock:
            history = condense_history(session.history_pairs(), HISTORY_TOKEN_BUDGET)
            result = self._run_path(query, config, session.settings, history, on_event)
            self._record_turns(session, query, [result])
        return result

    # -- per-path pipeline --------------------------------------------------

    def _run_path(self, query: str, config: GeneratorConfig,
                  settings: ChatSettings, history: list[tuple[str, str]],
                  on_event: EventFn | None) -> PathResult:
        def emit(kind: str, payload: dict) -> None:
            if on_event is not None:
                on_event(kind, config.label, payload)

        warnings: list[str] = []
        try:
            effective_query = query
            if settings.expansion:
                try:
                    effective_query = expand_query(query, config)
                except BackendError as exc:
                    warnings.append(f"query expansion unavailable: {exc}")

            retrieved = self.retrieve_context(effective_query) if config.retrieval_enabled else {}
            prompt = build_generation_prompt(
                effective_query, retrieved, self.profile, history,
                token_budget=config.token_budget,
            )
            output = generate(
                prompt, config, call_index=0,
                on_chunk=lambda text: emit("delta", {"text": text}),
            )
        except BackendError as exc:
            result = PathResult(
                config_label=config.label,
                output=GenerationOutput(raw_text="", explanation=str(exc)),
                final_status=failed(FAIL_BACKEND),
                warnings=warnings,
            )
            emit("path_done", result.to_record())
            return result

        if output.code is None:
            result = PathResult(
                config_label=config.label, output=output,
                final_status=failed(FAIL_NO_CODE), warnings=warnings,
            )
            emit("path_done", result.to_record())
            return result

        if settings.draft_mode or not settings.compile_enabled:
            result = PathResult(
                config_label=config.label, output=output,
                final_status=None, final_code=output.code, warnings=warnings,
            )
            emit("path_done", result.to_record())
            return result

        final_code, reports, status = self.repair_loop(
            output.code, config, self.compile_fn(),
            on_report=lambda report: emit("compile", report.to_record()),
        )
        result = PathResult(
            config_label=config.label, output=output, reports=reports,
            final_status=status, final_code=final_code, warnings=warnings,
        )
        emit("path_done", result.to_record())
        return result

    def retrieve_context(self, query: str) -> dict[Segment, list[tuple[KnowledgeDoc, float]]]:
        if self.knowledge is None or len(self.knowledge) == 0:
            return {}
        retrieved: dict[Segment, list[tuple[KnowledgeDoc, float]]] = {}
        for segment, k in RETRIEVAL_K.items():
            try:
                retrieved[segment] = self.knowledge.search(query, segment, k)
            except EmptyIndex:
                continue
        return retrieved

    def compile_fn(self) -> CompileFn:
        def compile_attempt(source: str, attempt: int) -> CompileReport:
            report = self.compiler.compile(source).report
            report.attempt = attempt
            return report
        return compile_attempt

    # -- repair loop ----------------------------------------------------------

    def repair_loop(
        self,
        code: str,
        config: GeneratorConfig,
        compile_fn: CompileFn,
        on_report: Callable[[CompileReport], None] | None = None,
    ) -> tuple[str, list[CompileReport], FinalStatus]:
        """Compile, then regenerate against the diagnostics, at most
        MAX_COMPILE_ATTEMPTS compilations total; stop early on success or
        timeout."""
        if not code.strip():
            raise ValueError("repair loop needs non-empty code")

        reports: list[CompileReport] = []
        current = code
        for attempt in range(1, MAX_COMPILE_ATTEMPTS + 1):
            report = compile_fn(current, attempt)
            reports.append(report)
            if on_report is not None:
                on_report(report)
            if report.status is ReportStatus.SUCCESS:
                break
            if report.status is ReportStatus.TIMEOUT:
                return current, reports, failed(FAIL_TIMEOUT)
            if attempt == MAX_COMPILE_ATTEMPTS:
                return current, reports, failed(FAIL_BUDGET)

            repair_prompt = build_repair_prompt(current, report, self.profile)
            try:
                output = generate(repair_prompt, config, call_index=attempt)
            except BackendError:
                return current, reports, failed(FAIL_BACKEND)
            if output.code is None:
                return current, reports, failed(FAIL_NO_CODE)
            current = output.code

        return current, reports, classify_success(reports)

    # -- bookkeeping ---------------------------------------------------------

    def _record_turns(self, session: ChatSession, query: str,
                      results: list[PathResult]) -> None:
        turns = [ChatTurn(role="user", text=query)]
        for result in results:
            text = result.final_code or result.output.explanation or result.output.raw_text
            turns.append(ChatTurn(
                role="assistant",
                text=text or "(no output)",
                model_label=result.config_label,
                compile_report=result.reports[-1] if result.reports else None,
            ))
        session.turns.extend(turns)
        if self.sessions is not None:
            for turn in turns:
                self.sessions.append_turn(session.id, turn)


def classify_success(reports: list[CompileReport],
                     output: GenerationOutput | None = None) -> FinalStatus:
    """Success classification from the attempt trail.

    A generation with no extractable code is a NoCode failure; unused-FB
    diagnostics are Error severity upstream, so such generations can never
    reach a Success report and always classify failed.
    """
    if output is not None and output.code is None:
        return failed(FAIL_NO_CODE)
    if not reports:
        return failed(FAIL_NO_CODE)
    for index, report in enumerate(reports):
        if report.status is ReportStatus.SUCCESS:
            return compiled_clean() if index == 0 else compiled_after_repair(index)
        if report.status is ReportStatus.TIMEOUT:
            return failed(FAIL_TIMEOUT)
    return failed(FAIL_BUDGET)
