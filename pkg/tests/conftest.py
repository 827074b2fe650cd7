from __future__ import annotations

from pathlib import Path

import pytest

from stforge.backends import GeneratorConfig, GeneratorKind
from stforge.catalog import load_catalog
from stforge.checks.profile import DialectProfile, load_bundled_profile
from stforge.knowledge import KnowledgeStore, augment_entries

ASSETS = Path(__file__).resolve().parent.parent / "src" / "stforge" / "assets"

_acceptance_results: list[tuple[str, bool]] = []


@pytest.fixture(scope="session")
def profile() -> DialectProfile:
    return load_bundled_profile()


@pytest.fixture(scope="session")
def canonical_source() -> str:
    return (ASSETS / "canonical_example.st").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_files() -> list[Path]:
    files = [ASSETS / "canonical_example.st"]
    files.extend(sorted((ASSETS / "corpus").glob("*.st")))
    return files


@pytest.fixture(scope="session")
def catalog_entries():
    entries = load_catalog(ASSETS / "catalog" / "function_blocks.jsonl")
    augment_entries(entries, GeneratorConfig(label="augment", kind=GeneratorKind.STUB))
    return entries


@pytest.fixture()
def knowledge_store(catalog_entries) -> KnowledgeStore:
    store = KnowledgeStore()
    store.ingest_catalog(catalog_entries)
    return store


# -- acceptance criterion reporting ----------------------------------------

def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_"):
        _acceptance_results.append((name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed in sorted(_acceptance_results):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
