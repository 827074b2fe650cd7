"""Prompt construction: one holistic generation prompt, diagnostic-guided
repair prompts, optional query expansion, and history condensation.

The generation prompt is a single pass: hard dialect constraints rendered
from the profile, retrieved context per segment, the pinned canonical
example, and the output-format instruction.  No multi-agent orchestration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .checks.diagnostics import CompileReport, ReportStatus
from .checks.profile import DialectProfile
from .knowledge.store import KnowledgeDoc, Segment
from .templates import render_template, template_text

DEFAULT_TOKEN_BUDGET = 12_000

# Character caps per retrieved section keep the constraints and the example
# intact under the budget.
SECTION_CAPS = {
    Segment.FUNCTION_BLOCKS: 4_000,
    Segment.SPECS: 3_000,
    Segment.AUXILIARY: 2_000,
}

# Per-segment retrieval depth for generation prompts.
RETRIEVAL_K = {
    Segment.FUNCTION_BLOCKS: 6,
    Segment.SPECS: 4,
    Segment.AUXILIARY: 2,
}

_SECTION_TITLES = {
    Segment.FUNCTION_BLOCKS: "Function block reference",
    Segment.SPECS: "Dialect specification excerpts",
    Segment.AUXILIARY: "Project context",
}

_CONTROL_CHARS = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")

_MIN_EXPANSION_WORDS = 3


class BudgetExceeded(Exception):
    pass


def estimate_tokens(text: str) -> int:
    """Characters/4 heuristic; avoids a tokenizer dependency."""
    return (len(text) + 3) // 4


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    token_estimate: int
    sections: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self) -> None:
        joined = "".join(text for _, text in self.sections)
        if joined != self.system_text:
            raise ValueError("sections must concatenate to system_text")

    def section(self, name: str) -> str | None:
        for section_name, text in self.sections:
            if section_name == name:
                return text
        return None


def canonical_example_source() -> str:
    """The pinned always-compiling example embedded in generation prompts."""
    ref = resources.files("stforge") / "assets" / "canonical_example.st"
    return ref.read_text(encoding="utf-8")


def sanitize(text: str, cap: int) -> str:
    """Strip control characters (newline/tab stay) and cap the length."""
    cleaned = _CONTROL_CHARS.sub("", text.replace("\r\n", "\n").replace("\r", "\n"))
    return cleaned[:cap]


def render_constraints(profile: DialectProfile) -> str:
    """Hard dialect rules rendered from the profile, in a fixed order."""
    lines = [f"Hard rules for the {profile.id} dialect (violations fail compilation):"]
    lines.append(
        "1. Reserved words may never be used as identifiers: "
        + ", ".join(sorted(profile.reserved_words)) + "."
    )
    lines.append(
        "2. Every variable must be declared before use; datatypes are "
        "restricted to: " + ", ".join(sorted(profile.allowed_datatypes)) + "."
    )
    lines.append(
        "3. POU structure: define exactly one PROGRAM ... END_PROGRAM as the "
        "entry point; FUNCTION and FUNCTION_BLOCK POUs take interface blocks."
    )
    table = "; ".join(
        f"{kind.value} may contain " + ", ".join(sorted(b.value for b in blocks))
        for kind, blocks in sorted(profile.block_kind_table.items(), key=lambda kv: kv[0].value)
    )
    lines.append(f"4. Allowed variable block kinds per POU: {table}.")
    lines.append(
        "5. These instructions do not exist in ST form and must not be "
        "called: " + ", ".join(sorted(profile.disallowed_instructions)) + "."
    )
    lines.append(
        "6. Every function block instance you declare must also be invoked; "
        "declared-but-unused instances fail validation."
    )
    rules = profile.identifier_rules
    lines.append(
        f"7. Identifiers need at least {rules.min_length} characters; device "
        "addresses (" + ", ".join(sorted(rules.forbidden_names)) + ") are "
        "accessed through registered labels, never declared as names."
    )
    if profile.strict_labels:
        lines.append(
            "8. Variables are registered as external labels in the "
            "engineering tool: reference them directly and do not emit "
            "inline VAR blocks in the PROGRAM."
        )
    else:
        lines.append(
            "8. Program variables may be declared inline; assume labels "
            "referenced without declaration are pre-registered in the "
            "engineering tool."
        )
    return "\n".join(lines)


def build_generation_prompt(
    query: str,
    retrieved: dict[Segment, list[tuple[KnowledgeDoc, float]]],
    profile: DialectProfile,
    history: list[tuple[str, str]] | None = None,
    *,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> PromptBundle:
    """Assemble the holistic single-pass generation prompt.

    Section order is fixed: role, hard constraints, retrieved function
    blocks, retrieved specs, auxiliary context (only when non-empty),
    canonical example, output format.  Raises :class:`BudgetExceeded` when
    the mandatory sections alone do not fit the budget.
    """
    if not query.strip():
        raise ValueError("query must be non-empty")

    user_parts = []
    for role, text in history or []:
        user_parts.append(f"{role}: {sanitize(text, 2_000)}")
    user_parts.append(query)
    user_text = "\n".join(user_parts)

    sections: list[tuple[str, str]] = [
        ("role", render_template("generation_role", profile_id=profile.id)),
        ("constraints", "\n" + render_constraints(profile) + "\n"),
    ]
    example = (
        "\nCanonical example of a compliant program (timer, state machine, "
        "edge detection):\n```\n" + canonical_example_source() + "```\n"
    )
    format_section = "\n" + template_text("output_format")

    mandatory_chars = (
        sum(len(text) for _, text in sections) + len(example)
        + len(format_section) + len(user_text)
    )
    mandatory_tokens = (mandatory_chars + 3) // 4
    if mandatory_tokens > token_budget:
        raise BudgetExceeded(
            f"constraints and example need ~{mandatory_tokens} tokens; "
            f"budget is {token_budget}"
        )

    remaining_chars = token_budget * 4 - mandatory_chars
    for segment in (Segment.FUNCTION_BLOCKS, Segment.SPECS, Segment.AUXILIARY):
        docs = retrieved.get(segment, [])
        if not docs:
            continue
        cap = min(SECTION_CAPS[segment], max(remaining_chars, 0))
        if cap <= 0:
            continue
        body = "\n---\n".join(doc.text for doc, _ in docs)
        text = f"\n## {_SECTION_TITLES[segment]}\n{sanitize(body, cap)}\n"
        remaining_chars -= len(text)
        sections.append((segment.value, text))

    sections.append(("example", example))
    sections.append(("format", format_section))

    system_text = "".join(text for _, text in sections)
    return PromptBundle(
        system_text=system_text,
        user_text=user_text,
        token_estimate=estimate_tokens(system_text + user_text),
        sections=tuple(sections),
    )


def build_repair_prompt(code: str, report: CompileReport,
                        profile: DialectProfile) -> PromptBundle:
    """Structured repair instruction embedding the compiler feedback verbatim."""
    if report.status is not ReportStatus.FAILED:
        raise ValueError("repair prompts are built from failed compile reports only")

    diag_lines = "\n".join(d.render() for d in report.diagnostics)
    sections: tuple[tuple[str, str], ...] = (
        ("role", render_template("repair_role", profile_id=profile.id)),
        ("diagnostics", f"\nCompiler feedback from attempt {report.attempt}:\n{diag_lines}\n"),
        ("guidance", "\n" + template_text("repair_guidance")),
        ("code", f"\nThe failing program:\n```\n{code.rstrip()}\n```\n"),
        ("format", "\n" + template_text("output_format")),
    )
    system_text = "".join(text for _, text in sections)
    user_text = "Fix every diagnostic and return the complete corrected program."
    return PromptBundle(
        system_text=system_text,
        user_text=user_text,
        token_estimate=estimate_tokens(system_text) + estimate_tokens(user_text),
        sections=sections,
    )


# Topic keywords for the deterministic expansion stub.
_EXPANSION_TOPICS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("timer", ("blink", "flash", "delay", "wait", "second", "seconds",
               "minute", "pulse", "debounce", "after", "timeout")),
    ("counter", ("count", "counter", "pieces", "items", "bottles", "batch")),
    ("edge detection", ("edge", "press", "pressed", "button", "trigger", "once", "toggle")),
    ("state machine", ("state", "sequence", "step", "phase", "mode", "cycle")),
    ("array processing", ("array", "buffer", "list", "sort", "average",
                          "samples", "ring", "table")),
    ("communication", ("send", "receive", "message", "transfer", "serial",
                       "network", "comm", "protocol")),
    ("pid control", ("pid", "setpoint", "temperature", "pressure", "flow",
                     "control loop", "regulate")),
)


def expand_query(query: str, generator) -> str:
    """Optional pre-retrieval reasoning pass over the user query.

    With the stub generator this is a deterministic keyword expansion; short
    queries fall below the expansion threshold and pass through unchanged.
    Backend errors propagate so the caller can fall back to the raw query.
    """
    from .backends import GeneratorKind, generate_text

    if len(query.split()) < _MIN_EXPANSION_WORDS:
        return query

    if generator.kind is GeneratorKind.STUB:
        lowered = query.lower()
        topics = [
            topic for topic, keywords in _EXPANSION_TOPICS
            if any(keyword in lowered for keyword in keywords)
        ]
        if not topics:
            return query
        return f"{query}\n(The request likely involves: {', '.join(topics)}.)"

    expanded = generate_text(render_template("expand_query", query=query), generator)
    return expanded.strip() or query


def condense_history(turns: list[tuple[str, str]], budget: int) -> list[tuple[str, str]]:
    """Keep the newest turns verbatim within ``budget`` estimated tokens;
    older turns collapse into a single summary stub."""
    if not turns:
        return []
    reserve = 48  # room for the summary stub
    kept: list[tuple[str, str]] = []
    used = 0
    for role, text in reversed(turns):
        cost = estimate_tokens(text) + 2
        if kept and used + cost > max(budget - reserve, 0):
            break
        kept.append((role, text))
        used += cost
    kept.reverse()
    if len(kept) == len(turns):
        return list(turns)
    dropped = len(turns) - len(kept)
    first_user = next((text for role, text in turns if role.lower() == "user"), "")
    summary = (
        f"[{dropped} earlier turn(s) condensed. The conversation started "
        f"with: {first_user[:120]}]"
    )
    return [("system", summary), *kept]
