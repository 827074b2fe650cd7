"""Benchmark harness: fixed query set x model configurations.

Each (query, config) cell runs the full generation pipeline once and yields
one record; the report aggregates per-config Compiled% (any successful
compilation within the repair budget) and Repaired% (compiled only after at
least one repair), rendered as a two-column table, a machine-readable record
file, and a bar-chart figure.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .backends import GeneratorConfig
from .checks.profile import DialectProfile
from .compiler import CompilerAdapter
from .knowledge.store import KnowledgeStore
from .orchestrator import ChatSession, ChatSettings, Orchestrator, PathResult


@dataclass(frozen=True)
class EvalRecord:
    query_id: str
    config_label: str
    compiled: bool
    repairs_used: int
    failure_reason: str | None
    elapsed_ms: float

    def __post_init__(self) -> None:
        if not 0 <= self.repairs_used <= 2:
            raise ValueError("repairs_used must be within the repair budget")
        if not self.compiled and not self.failure_reason:
            raise ValueError("failed records carry a failure reason")

    def to_record(self) -> dict:
        return {
            "query_id": self.query_id,
            "config_label": self.config_label,
            "compiled": self.compiled,
            "repairs_used": self.repairs_used,
            "failure_reason": self.failure_reason,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


@dataclass(frozen=True)
class EvalRow:
    config_label: str
    n: int
    compiled_pct: int
    repaired_pct: int

    def __post_init__(self) -> None:
        if not (0 <= self.repaired_pct <= self.compiled_pct <= 100):
            raise ValueError("percentages must satisfy 0 <= repaired <= compiled <= 100")


@dataclass
class EvalTable:
    rows: list[EvalRow]

    @staticmethod
    def from_records(records: list[EvalRecord]) -> "EvalTable":
        by_config: dict[str, list[EvalRecord]] = {}
        order: list[str] = []
        for record in records:
            if record.config_label not in by_config:
                order.append(record.config_label)
            by_config.setdefault(record.config_label, []).append(record)
        rows = []
        for label in order:
            cell = by_config[label]
            n = len(cell)
            compiled = sum(1 for r in cell if r.compiled)
            repaired = sum(1 for r in cell if r.compiled and r.repairs_used > 0)
            rows.append(EvalRow(
                config_label=label,
                n=n,
                compiled_pct=_round_pct(compiled, n),
                repaired_pct=_round_pct(repaired, n),
            ))
        return EvalTable(rows)


def _round_pct(part: int, whole: int) -> int:
    if whole == 0:
        return 0
    ratio = Decimal(part) * 100 / Decimal(whole)
    return int(ratio.quantize(Decimal("1"), rounding=ROUND_HALF_UP))


def load_queries(path: str | Path) -> list[tuple[str, str]]:
    """Benchmark query file: one query per line, id = line position."""
    queries = []
    for index, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if line and not line.startswith("#"):
            queries.append((f"q{index:03d}", line))
    if not queries:
        raise ValueError(f"no queries in {path}")
    return queries


def run_benchmark(
    queries: list[tuple[str, str]],
    configs: list[GeneratorConfig],
    *,
    profile: DialectProfile,
    knowledge: KnowledgeStore | None = None,
    compiler: CompilerAdapter | None = None,
    seed: int = 0,
) -> list[EvalRecord]:
    """One EvalRecord per (query, config) cell, in query-major order."""
    if not queries:
        raise ValueError("benchmark needs at least one query")
    if not configs:
        raise ValueError("benchmark needs at least one model configuration")

    records: list[EvalRecord] = []
    for query_id, text in queries:
        for config in configs:
            seeded = _with_seed(config, seed)
            orchestrator = Orchestrator(
                profile, [seeded], knowledge=knowledge, compiler=compiler,
            )
            session = ChatSession(id=f"bench-{query_id}", settings=ChatSettings())
            started = time.perf_counter()
            result = orchestrator.answer_initial(text, session)[0]
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            records.append(_to_record(query_id, result, elapsed_ms))
    return records


def _with_seed(config: GeneratorConfig, seed: int) -> GeneratorConfig:
    from dataclasses import replace
    return replace(config, seed=seed)


def _to_record(query_id: str, result: PathResult, elapsed_ms: float) -> EvalRecord:
    status = result.final_status
    if status is None:  # compile disabled cannot happen in benchmarks
        raise RuntimeError("benchmark paths always compile")
    return EvalRecord(
        query_id=query_id,
        config_label=result.config_label,
        compiled=status.compiled,
        repairs_used=status.repairs if status.compiled else max(len(result.reports) - 1, 0),
        failure_reason=status.reason,
        elapsed_ms=elapsed_ms,
    )


def render_report(records: list[EvalRecord]) -> str:
    """Two-column Compiled/Repaired table plus a failure-reason appendix.

    Deterministic for identical records (timing is deliberately excluded).
    """
    if not records:
        raise ValueError("no records to report")
    table = EvalTable.from_records(records)

    label_width = max(len("Model Configuration"), max(len(r.config_label) for r in table.rows))
    lines = [
        "Compilation success rates across model configurations",
        "",
        f"{'Model Configuration':<{label_width}}  {'Compiled':>9}  {'Repaired':>9}  {'n':>5}",
        "-" * (label_width + 29),
    ]
    for row in table.rows:
        lines.append(
            f"{row.config_label:<{label_width}}  {row.compiled_pct:>8}%  "
            f"{row.repaired_pct:>8}%  {row.n:>5}"
        )

    reasons: dict[str, dict[str, int]] = {}
    for record in records:
        if record.failure_reason:
            per = reasons.setdefault(record.config_label, {})
            per[record.failure_reason] = per.get(record.failure_reason, 0) + 1
    lines.append("")
    lines.append("Failure reasons")
    if not reasons:
        lines.append("  (none)")
    else:
        for label in (r.config_label for r in table.rows):
            if label not in reasons:
                continue
            parts = ", ".join(f"{reason}: {count}"
                              for reason, count in sorted(reasons[label].items()))
            lines.append(f"  {label}: {parts}")
    return "\n".join(lines) + "\n"


def render_figure(records: list[EvalRecord], path: str | Path) -> Path:
    """Grouped bar chart of Compiled% and Repaired% per configuration."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    table = EvalTable.from_records(records)
    labels = [row.config_label for row in table.rows]
    compiled = [row.compiled_pct for row in table.rows]
    repaired = [row.repaired_pct for row in table.rows]

    positions = range(len(labels))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6.0, 1.8 * len(labels)), 4.0))
    ax.bar([p - width / 2 for p in positions], compiled, width,
           label="Compiled", color="#2a6fb0")
    ax.bar([p + width / 2 for p in positions], repaired, width,
           label="Repaired", color="#e8a33d")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=15, ha="right")
    ax.set_ylabel("% of queries")
    ax.set_ylim(0, 100)
    ax.set_title("Compilation success by model configuration")
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def write_outputs(records: list[EvalRecord], out_base: str | Path) -> dict[str, Path]:
    """Write the three report artifacts next to each other.

    ``<base>.txt`` (table), ``<base>.records.jsonl`` (machine-readable),
    ``<base>.png`` (figure).
    """
    base = Path(out_base)
    base.parent.mkdir(parents=True, exist_ok=True)
    report_path = base.with_suffix(".txt")
    report_path.write_text(render_report(records), encoding="utf-8")
    records_path = base.with_suffix(".records.jsonl")
    with records_path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_record(), sort_keys=True) + "\n")
    figure_path = render_figure(records, base.with_suffix(".png"))
    return {"report": report_path, "records": records_path, "figure": figure_path}
