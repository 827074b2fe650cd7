"""Structured compiler feedback: diagnostic records and compile reports."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..dialect.spans import SourceSpan


class Category(enum.Enum):
    UNDECLARED_VARIABLE = "UndeclaredVariable"
    RESERVED_WORD_VIOLATION = "ReservedWordViolation"
    TYPE_MISMATCH = "TypeMismatch"
    DISALLOWED_INSTRUCTION = "DisallowedInstruction"
    UNUSED_FUNCTION_BLOCK = "UnusedFunctionBlock"
    MISSING_PROGRAM = "MissingProgram"
    UNKNOWN_DATATYPE = "UnknownDatatype"
    DUPLICATE_DECLARATION = "DuplicateDeclaration"
    STRUCTURE_VIOLATION = "StructureViolation"
    IDENTIFIER_RULE = "IdentifierRule"


class Severity(enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"


# Stable code table; codes appear verbatim in repair prompts and reports.
CODE_FOR_CATEGORY: dict[Category, str] = {
    Category.UNDECLARED_VARIABLE: "E001",
    Category.RESERVED_WORD_VIOLATION: "E002",
    Category.TYPE_MISMATCH: "E003",
    Category.DISALLOWED_INSTRUCTION: "E004",
    Category.UNUSED_FUNCTION_BLOCK: "E005",
    Category.MISSING_PROGRAM: "E006",
    Category.UNKNOWN_DATATYPE: "E007",
    Category.DUPLICATE_DECLARATION: "E008",
    Category.STRUCTURE_VIOLATION: "E009",
    Category.IDENTIFIER_RULE: "E010",
}
CATEGORY_FOR_CODE = {code: cat for cat, code in CODE_FOR_CATEGORY.items()}


@dataclass(frozen=True)
class Diagnostic:
    category: Category
    severity: Severity
    span: SourceSpan
    message: str
    related: tuple[SourceSpan, ...] = ()

    def __post_init__(self) -> None:
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    @property
    def code(self) -> str:
        return CODE_FOR_CATEGORY[self.category]

    def render(self) -> str:
        return f"{self.code} {self.category.value} [{self.severity.value}] {self.span}: {self.message}"

    def to_record(self) -> dict:
        return {
            "code": self.code,
            "category": self.category.value,
            "severity": self.severity.value,
            "span": {
                "start_line": self.span.start_line,
                "start_col": self.span.start_col,
                "end_line": self.span.end_line,
                "end_col": self.span.end_col,
            },
            "message": self.message,
        }

    @staticmethod
    def from_record(record: dict) -> "Diagnostic":
        span = record["span"]
        return Diagnostic(
            category=Category(record["category"]),
            severity=Severity(record["severity"]),
            span=SourceSpan(
                span["start_line"], span["start_col"],
                span["end_line"], span["end_col"],
            ),
            message=record["message"],
        )


def error(category: Category, span: SourceSpan, message: str,
          related: tuple[SourceSpan, ...] = ()) -> Diagnostic:
    return Diagnostic(category, Severity.ERROR, span, message, related)


class ReportStatus(enum.Enum):
    SUCCESS = "Success"
    FAILED = "Failed"
    TIMEOUT = "Timeout"


@dataclass
class CompileReport:
    status: ReportStatus
    diagnostics: list[Diagnostic] = field(default_factory=list)
    attempt: int = 1
    elapsed_ms: float = 0.0
    compiler_id: str = "internal-oracle"

    def __post_init__(self) -> None:
        if self.attempt < 1:
            raise ValueError("attempt starts at 1")
        has_errors = any(d.severity is Severity.ERROR for d in self.diagnostics)
        if self.status is ReportStatus.SUCCESS and has_errors:
            raise ValueError("successful report cannot carry Error diagnostics")
        if self.status is ReportStatus.FAILED and not has_errors:
            raise ValueError("failed report must carry at least one Error diagnostic")

    @property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity is Severity.ERROR)

    def categories(self) -> set[Category]:
        return {d.category for d in self.diagnostics}

    def to_record(self) -> dict:
        return {
            "status": self.status.value,
            "diagnostics": [d.to_record() for d in self.diagnostics],
            "attempt": self.attempt,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "compiler_id": self.compiler_id,
        }

    @staticmethod
    def from_record(record: dict) -> "CompileReport":
        return CompileReport(
            status=ReportStatus(record["status"]),
            diagnostics=[Diagnostic.from_record(d) for d in record.get("diagnostics", [])],
            attempt=record.get("attempt", 1),
            elapsed_ms=record.get("elapsed_ms", 0.0),
            compiler_id=record.get("compiler_id", "unknown"),
        )


def report_from_diagnostics(diagnostics: list[Diagnostic], *, attempt: int = 1,
                            elapsed_ms: float = 0.0,
                            compiler_id: str = "internal-oracle") -> CompileReport:
    """Status follows severity: Success iff no Error-level diagnostics."""
    has_errors = any(d.severity is Severity.ERROR for d in diagnostics)
    return CompileReport(
        status=ReportStatus.FAILED if has_errors else ReportStatus.SUCCESS,
        diagnostics=diagnostics,
        attempt=attempt,
        elapsed_ms=elapsed_ms,
        compiler_id=compiler_id,
    )
