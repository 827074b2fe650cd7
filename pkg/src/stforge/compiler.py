"""Compile oracle facade and the adapter seam for external vendor tools.

``InternalCompiler`` runs the bundled pipeline (tokenize, parse, optional
label extraction, validate) and is the default everywhere.  A vendor
engineering tool can be plugged in through :class:`HttpCompilerAdapter`,
which maps a remote compile endpoint onto the same report shape.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Protocol

import httpx

from .checks.diagnostics import (
    Category, CompileReport, Diagnostic, ReportStatus, Severity, error,
    report_from_diagnostics,
)
from .checks.profile import DialectProfile
from .checks.validator import validate
from .dialect.labels import DuplicateLabelError, LabelManifest, extract_labels
from .dialect.lexer import LexError, tokenize
from .dialect.parser import Parser
from .dialect.spans import SourceSpan


@dataclass
class CompileOutcome:
    report: CompileReport
    manifest: LabelManifest | None = None


class CompilerAdapter(Protocol):
    identity: str

    def compile(self, source: str, *, register_labels: bool = False,
                strict_labels: bool | None = None,
                timeout_ms: float = 30_000.0) -> CompileOutcome: ...


class InternalCompiler:
    """The bundled dialect oracle: full parse plus static validation."""

    def __init__(self, profile: DialectProfile) -> None:
        self.profile = profile
        self.identity = f"internal-oracle/{profile.id}"

    def compile(self, source: str, *, register_labels: bool = False,
                strict_labels: bool | None = None,
                timeout_ms: float = 30_000.0) -> CompileOutcome:
        started = time.perf_counter()
        diagnostics: list[Diagnostic] = []
        manifest: LabelManifest | None = None

        try:
            tokens = tokenize(source)
        except LexError as exc:
            diagnostics.append(error(Category.STRUCTURE_VIOLATION, exc.span, exc.message))
            return self._finish(diagnostics, None, started)

        parser = Parser(tokens)
        unit = parser.run()
        for issue in parser.issues:
            diagnostics.append(error(Category.STRUCTURE_VIOLATION, issue.span, issue.message))
        if diagnostics:
            # Syntax is broken; name/type checks on the partial tree would
            # only produce noise.
            return self._finish(diagnostics, None, started)

        if register_labels:
            try:
                manifest, unit = extract_labels(unit)
            except DuplicateLabelError as exc:
                diagnostics.append(error(
                    Category.DUPLICATE_DECLARATION, exc.spans[-1],
                    str(exc), related=tuple(exc.spans[:-1]),
                ))
                return self._finish(diagnostics, None, started)

        profile = self.profile
        if strict_labels is not None and strict_labels != profile.strict_labels:
            profile = _with_strict_labels(profile, strict_labels)

        diagnostics.extend(validate(unit, profile, labels=manifest))
        return self._finish(diagnostics, manifest, started)

    def _finish(self, diagnostics: list[Diagnostic], manifest: LabelManifest | None,
                started: float) -> CompileOutcome:
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        report = report_from_diagnostics(
            diagnostics, elapsed_ms=elapsed_ms, compiler_id=self.identity,
        )
        return CompileOutcome(report=report, manifest=manifest)


class HttpCompilerAdapter:
    """Adapter for an external compile endpoint speaking the /compile schema.

    Timeouts and transport failures map to a Timeout report so the repair
    loop can terminate the way it would on a vendor-tool stall.
    """

    def __init__(self, base_url: str, profile_id: str, *, client: httpx.Client | None = None) -> None:
        self.base_url = base_url.rstrip("/")
        self.profile_id = profile_id
        self.identity = f"external-adapter/{base_url}"
        self._client = client or httpx.Client()

    def compile(self, source: str, *, register_labels: bool = False,
                strict_labels: bool | None = None,
                timeout_ms: float = 30_000.0) -> CompileOutcome:
        payload = {
            "schema_version": 1,
            "source": source,
            "profile_id": self.profile_id,
            "strict_labels": bool(strict_labels),
            "emit_label_manifest": register_labels,
        }
        try:
            response = self._client.post(
                f"{self.base_url}/compile", json=payload, timeout=timeout_ms / 1000.0,
            )
            response.raise_for_status()
            body = response.json()
            report = CompileReport.from_record(body["report"])
            report.compiler_id = self.identity
            return CompileOutcome(report=report)
        except (httpx.HTTPError, KeyError, ValueError):
            report = CompileReport(
                status=ReportStatus.TIMEOUT,
                diagnostics=[Diagnostic(
                    Category.STRUCTURE_VIOLATION, Severity.WARNING,
                    SourceSpan.point(1, 1),
                    "external compiler unavailable or returned an unusable response",
                )],
                compiler_id=self.identity,
            )
            return CompileOutcome(report=report)


def _with_strict_labels(profile: DialectProfile, strict: bool) -> DialectProfile:
    return DialectProfile(
        id=profile.id,
        reserved_words=profile.reserved_words,
        allowed_datatypes=profile.allowed_datatypes,
        disallowed_instructions=profile.disallowed_instructions,
        block_kind_table=profile.block_kind_table,
        identifier_rules=profile.identifier_rules,
        strict_labels=strict,
        fb_catalog=profile.fb_catalog,
    )
