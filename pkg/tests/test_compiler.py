from __future__ import annotations

import json

import httpx

from stforge.checks.diagnostics import ReportStatus
from stforge.compiler import HttpCompilerAdapter, InternalCompiler
from stforge.knowledge import augment_description
from stforge.prompting import canonical_example_source


def test_internal_compiler_identity_names_profile(profile):
    compiler = InternalCompiler(profile)
    assert compiler.identity == "internal-oracle/melsec-iqr"
    outcome = compiler.compile(canonical_example_source())
    assert outcome.report.compiler_id == compiler.identity
    assert outcome.report.elapsed_ms > 0.0
    assert outcome.manifest is None  # labels only on request


def test_internal_compiler_lex_errors_become_diagnostics(profile):
    outcome = InternalCompiler(profile).compile("PROGRAM P a := 'open\nEND_PROGRAM")
    assert outcome.report.status is ReportStatus.FAILED
    assert outcome.report.diagnostics[0].code == "E009"


def test_http_adapter_maps_remote_report(profile):
    remote_report = InternalCompiler(profile).compile("PROGRAM P ghost := 1; END_PROGRAM").report

    def handle(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        assert body["schema_version"] == 1
        assert "source" in body
        return httpx.Response(200, json={
            "schema_version": 1,
            "report": remote_report.to_record(),
        })

    adapter = HttpCompilerAdapter(
        "http://vendor-tool.local", "melsec-iqr",
        client=httpx.Client(transport=httpx.MockTransport(handle)),
    )
    outcome = adapter.compile("PROGRAM P ghost := 1; END_PROGRAM")
    assert outcome.report.status is ReportStatus.FAILED
    assert outcome.report.compiler_id.startswith("external-adapter/")
    assert [d.code for d in outcome.report.diagnostics] == ["E001"]


def test_http_adapter_unreachable_reports_timeout():
    def refuse(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("refused", request=request)

    adapter = HttpCompilerAdapter(
        "http://vendor-tool.local", "melsec-iqr",
        client=httpx.Client(transport=httpx.MockTransport(refuse)),
    )
    outcome = adapter.compile("PROGRAM P ; END_PROGRAM", timeout_ms=100.0)
    assert outcome.report.status is ReportStatus.TIMEOUT


def test_augmentation_propagates_backend_errors(catalog_entries):
    from stforge.backends import BackendError, GeneratorConfig, GeneratorKind
    import copy
    import pytest

    entry = copy.deepcopy(catalog_entries[0])
    entry.augmented_description = None
    unreachable = GeneratorConfig(
        label="remote", kind=GeneratorKind.REMOTE_CHAT,
        endpoint="http://127.0.0.1:1", model_name="m", timeout_ms=200.0,
    )
    with pytest.raises(BackendError):
        augment_description(entry, unreachable)
    assert entry.augmented_description is None  # entry unchanged on failure
