"""Synthetic query generation and compile-filtered training-pair curation.

Queries come from persona phrasing crossed with functional topic flags,
balanced across the batch.  Curation runs the full generation pipeline but
accepts only first-shot compiles with no unused function blocks; repaired
outputs never enter the dataset unless explicitly allowed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from .backends import BackendError, GeneratorConfig, generate
from .checks.diagnostics import Category, CompileReport, ReportStatus
from .checks.profile import DialectProfile
from .compiler import CompilerAdapter, InternalCompiler
from .knowledge.store import KnowledgeStore
from .orchestrator import Orchestrator
from .prompting import build_generation_prompt

REJECT_COMPILE_FAILED = "CompileFailed"
REJECT_UNUSED_FB = "UnusedFB"
REJECT_NO_CODE = "NoCode"
REJECT_BACKEND = "BackendError"


class DatasetSinkError(Exception):
    def __init__(self, message: str, accepted: int, rejected: dict[str, int]) -> None:
        super().__init__(f"{message} (after {accepted} accepted)")
        self.accepted = accepted
        self.rejected = rejected


@dataclass(frozen=True)
class QuerySpec:
    persona: str
    flags: frozenset[str]
    seed: int
    text: str

    def to_record(self) -> dict:
        return {
            "persona": self.persona,
            "flags": sorted(self.flags),
            "seed": self.seed,
            "text": self.text,
        }


@dataclass
class CuratedPair:
    query: str
    code: str
    report: CompileReport
    provenance: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "query": self.query,
            "code": self.code,
            "provenance": self.provenance,
        }


# Task phrasings per topic flag; every phrasing names its flag's keyword so
# generated queries stay on-topic.
_FLAG_TASKS: dict[str, tuple[str, ...]] = {
    "timers": (
        "turn a mixer off 5 seconds after the start signal drops using a timer",
        "blink a warning lamp with a 1 second timer cycle",
        "debounce a noisy sensor with a 100 ms timer delay",
    ),
    "communication": (
        "track a communication watchdog and raise an alarm when messages stop",
        "count communication retries and give up after three failed transfers",
        "frame a communication status word from link and error bits",
    ),
    "array processing": (
        "find the highest value in an array of 16 level samples",
        "clear an array of recipe values and reload defaults in a loop",
        "copy every second element of an array into a results buffer",
    ),
    "pid control": (
        "outline a pid control scaffold with setpoint and measured value",
        "clamp a pid control output between 0 and 100 percent",
        "switch pid control between manual and automatic setpoints",
    ),
    "counters": (
        "count bottles on a conveyor with an up counter and reset per batch",
        "use an up-down counter to track items entering and leaving a zone",
        "latch a done flag when the piece counter reaches the preset",
    ),
    "edge detection": (
        "toggle an output on every rising edge of a push button",
        "detect the falling edge of a gate sensor and log one count",
        "start a sequence exactly once per trigger using edge detection",
    ),
    "state machines": (
        "implement a three step state machine for a filling sequence",
        "write a state machine with idle, running and fault states",
        "advance a packaging state machine on sensor and timer events",
    ),
    "alarms": (
        "latch an alarm on overpressure and clear it with an acknowledge",
        "flash a beacon while any alarm is active and steady when acknowledged",
        "prioritize three alarm inputs into a single alarm code",
    ),
}

_PERSONA_PREFIXES: dict[str, str] = {
    "casual developer": "Hey, can you quickly",
    "control engineer": "Per the functional specification, implement the following:",
    "electrician jargon": "Need ladder-style thinking but in ST, wire it so we",
    "plc student": "For my training exercise, please show me how to",
    "maintenance technician": "On the night shift rig, set something up to",
    "automation architect": "Draft a reference implementation that will",
}


def default_personas() -> list[str]:
    return list(_PERSONA_PREFIXES)


def default_flags() -> list[str]:
    return list(_FLAG_TASKS)


def generate_queries(personas: list[str], flags: list[str], n: int,
                     seed: int) -> list[QuerySpec]:
    """Deterministic batch with persona and flag coverage balanced to ±1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not personas or not flags:
        raise ValueError("personas and flags must be non-empty")

    rng = random.Random(seed)
    persona_order = list(personas)
    flag_order = list(flags)
    rng.shuffle(persona_order)
    rng.shuffle(flag_order)

    specs: list[QuerySpec] = []
    for i in range(n):
        persona = persona_order[i % len(persona_order)]
        flag = flag_order[i % len(flag_order)]
        tasks = _FLAG_TASKS.get(flag, (f"write a program that deals with {flag}",))
        task = tasks[rng.randrange(len(tasks))]
        prefix = _PERSONA_PREFIXES.get(persona, f"As a {persona}, please")
        specs.append(QuerySpec(
            persona=persona,
            flags=frozenset({flag}),
            seed=seed + i,
            text=f"{prefix} {task}.",
        ))
    return specs


def curate_dataset(
    specs: list[QuerySpec],
    config: GeneratorConfig,
    out: IO[str] | str | Path,
    *,
    profile: DialectProfile,
    knowledge: KnowledgeStore | None = None,
    compiler: CompilerAdapter | None = None,
    allow_repaired: bool = False,
) -> dict:
    """Generate one candidate per query spec and keep only validated pairs.

    First-shot passes only by default: repaired generations would launder
    weak outputs into training data.  ``allow_repaired`` opts in to the
    bounded repair loop for experimentation.
    """
    compiler = compiler or InternalCompiler(profile)
    orchestrator = Orchestrator(profile, [config], knowledge=knowledge, compiler=compiler)

    accepted = 0
    rejected: dict[str, int] = {}
    handle, owns_handle = _open_sink(out)

    def reject(reason: str) -> None:
        rejected[reason] = rejected.get(reason, 0) + 1

    try:
        for spec in specs:
            retrieved = orchestrator.retrieve_context(spec.text) if config.retrieval_enabled else {}
            prompt = build_generation_prompt(
                spec.text, retrieved, profile, token_budget=config.token_budget,
            )
            try:
                output = generate(prompt, config, call_index=0)
            except BackendError:
                reject(REJECT_BACKEND)
                continue
            if output.code is None:
                reject(REJECT_NO_CODE)
                continue

            code = output.code
            report = compiler.compile(code).report
            attempt = 1
            if allow_repaired:
                code, reports, status = orchestrator.repair_loop(
                    code, config, orchestrator.compile_fn(),
                )
                report = reports[-1]
                attempt = len(reports)

            if report.status is not ReportStatus.SUCCESS:
                if Category.UNUSED_FUNCTION_BLOCK in report.categories():
                    reject(REJECT_UNUSED_FB)
                else:
                    reject(REJECT_COMPILE_FAILED)
                continue

            pair = CuratedPair(
                query=spec.text,
                code=code,
                report=report,
                provenance={
                    "config_label": config.label,
                    "seed": spec.seed,
                    "attempt": attempt,
                    "persona": spec.persona,
                    "flags": sorted(spec.flags),
                },
            )
            try:
                handle.write(json.dumps(pair.to_record(), sort_keys=True) + "\n")
            except OSError as exc:
                raise DatasetSinkError(f"dataset sink failed: {exc}", accepted, rejected) from exc
            accepted += 1
    finally:
        if owns_handle:
            handle.close()

    return {"accepted": accepted, "rejected": rejected}


def _open_sink(out: IO[str] | str | Path) -> tuple[IO[str], bool]:
    if hasattr(out, "write"):
        return out, False  # type: ignore[return-value]
    path = Path(out)  # type: ignore[arg-type]
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("a", encoding="utf-8"), True


def load_list_file(path: str | Path) -> list[str]:
    """One item per line; blank lines and '#' comments skipped."""
    items = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            items.append(line)
    return items
