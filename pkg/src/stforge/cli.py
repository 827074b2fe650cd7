"""Command-line interface: ingest, compile, chat, serve, datagen, bench."""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .backends import (
    GeneratorConfig, GeneratorKind, StubMode, StubScript, load_configs,
)
from .catalog import load_catalog
from .checks.profile import (
    DEFAULT_PROFILE_ID, DialectProfile, load_bundled_profile, load_profile_file,
)
from .compiler import HttpCompilerAdapter, InternalCompiler
from .knowledge import HashedBagEmbedder, KnowledgeStore, augment_entries

DATA_DIR_ENV = "STFORGE_DATA_DIR"
ADAPTER_URL_ENV = "STFORGE_ADAPTER_URL"

DEFAULT_DATA_DIR = "stforge_data"


def default_configs() -> list[GeneratorConfig]:
    """The offline three-path competitive layer: RAG, standard, local-RAG."""
    catalog_aware = StubScript(StubMode.EMIT_CATALOG_AWARE)
    return [
        GeneratorConfig(label="stub-rag", kind=GeneratorKind.STUB,
                        retrieval_enabled=True, stub_script=catalog_aware),
        GeneratorConfig(label="stub-standard", kind=GeneratorKind.STUB,
                        retrieval_enabled=False, stub_script=catalog_aware),
        GeneratorConfig(label="stub-local-rag", kind=GeneratorKind.STUB,
                        retrieval_enabled=True,
                        stub_script=StubScript(StubMode.EMIT_CANONICAL)),
    ]


def _resolve_profile(spec: str) -> DialectProfile:
    if Path(spec).exists():
        return load_profile_file(spec)
    return load_bundled_profile(spec)


def _data_dir(args) -> Path:
    return Path(args.data_dir or os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR))


def _open_store(args) -> KnowledgeStore:
    data_dir = _data_dir(args)
    return KnowledgeStore(HashedBagEmbedder(), persist_path=data_dir / "index.jsonl")


def _load_model_configs(args) -> list[GeneratorConfig]:
    if getattr(args, "config", None):
        return load_configs(Path(args.config).read_text(encoding="utf-8"))
    return default_configs()


def _compiler(profile: DialectProfile):
    adapter_url = os.environ.get(ADAPTER_URL_ENV)
    if adapter_url:
        return HttpCompilerAdapter(adapter_url, profile.id)
    return InternalCompiler(profile)


# -- subcommands ----------------------------------------------------------

def cmd_ingest(args) -> int:
    store = _open_store(args)
    created = 0

    catalog_path = args.catalog
    if catalog_path is None:
        catalog_path = str(resources.files("stforge") / "assets" / "catalog" / "function_blocks.jsonl")
    entries = load_catalog(catalog_path)
    if not args.no_augment:
        augmentor = GeneratorConfig(label="augment", kind=GeneratorKind.STUB)
        augment_entries(entries, augmentor)
    created += store.ingest_catalog(entries)

    for spec_file in args.spec or []:
        ids = store.ingest_spec_text(Path(spec_file).name, Path(spec_file).read_text(encoding="utf-8"))
        created += len(ids)
    for upload in args.upload or []:
        ids = store.ingest_upload(Path(upload).name, Path(upload).read_bytes())
        created += len(ids)

    counts = store.segment_counts()
    print(f"indexed {created} new documents ({counts})")
    print(f"index file: {store.persist_path}")
    return 0


def cmd_compile(args) -> int:
    profile = _resolve_profile(args.profile)
    compiler = _compiler(profile)
    source = Path(args.file).read_text(encoding="utf-8")
    outcome = compiler.compile(
        source,
        register_labels=args.emit_labels,
        strict_labels=True if args.strict_labels else None,
    )
    report = outcome.report
    if args.json:
        # One record per diagnostic, then the report summary record.
        for diagnostic in report.diagnostics:
            print(json.dumps(diagnostic.to_record(), sort_keys=True))
        summary = {"status": report.status.value, "attempt": report.attempt,
                   "compiler_id": report.compiler_id}
        if outcome.manifest is not None:
            summary["label_manifest"] = outcome.manifest.to_records()
        print(json.dumps(summary, sort_keys=True))
        return 0 if report.status.value == "Success" else 1
    for diagnostic in report.diagnostics:
        print(diagnostic.render())
    if outcome.manifest is not None:
        print(f"labels extracted: {len(outcome.manifest)}")
        for record in outcome.manifest.to_records():
            print("  " + json.dumps(record, sort_keys=True))
    print(f"{report.status.value.lower()}: {report.error_count} error(s), "
          f"{len(report.diagnostics)} diagnostic(s), {report.elapsed_ms:.1f} ms "
          f"[{report.compiler_id}]")
    return 0 if report.status.value == "Success" else 1


def cmd_chat(args) -> int:
    from .orchestrator import ChatSession, ChatSettings, Orchestrator

    profile = _resolve_profile(args.profile)
    store = _open_store(args)
    configs = _load_model_configs(args)
    orchestrator = Orchestrator(
        profile, configs, knowledge=store, compiler=_compiler(profile),
    )
    settings = ChatSettings(
        expansion=args.expand,
        draft_mode=args.draft,
        compile_enabled=not args.no_compile,
    )
    session = ChatSession(id="cli", settings=settings)
    results = orchestrator.answer_initial(args.query, session)
    for result in results:
        print(f"=== {result.config_label} ===")
        status = result.final_status.render() if result.final_status else "not compiled (draft)"
        print(f"status: {status}")
        for report in result.reports:
            for diagnostic in report.diagnostics:
                print(f"  [attempt {report.attempt}] {diagnostic.render()}")
        if result.final_code:
            print(result.final_code.rstrip())
        elif result.output.explanation:
            print(result.output.explanation.strip())
        print()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .orchestrator import SessionStore
    from .service import create_app

    profile = _resolve_profile(args.profile)
    store = _open_store(args)
    if len(store) == 0:
        entries = load_catalog(str(resources.files("stforge") / "assets" / "catalog" / "function_blocks.jsonl"))
        augment_entries(entries, GeneratorConfig(label="augment", kind=GeneratorKind.STUB))
        store.ingest_catalog(entries)
    sessions = SessionStore(_data_dir(args) / "sessions")
    app = create_app(profile, _load_model_configs(args), store, sessions,
                     compiler=_compiler(profile))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_datagen(args) -> int:
    from .datagen import (
        curate_dataset, default_flags, default_personas, generate_queries,
        load_list_file,
    )

    profile = _resolve_profile(args.profile)
    store = _open_store(args)
    personas = load_list_file(args.personas_file) if args.personas_file else default_personas()
    flags = load_list_file(args.flags_file) if args.flags_file else default_flags()
    specs = generate_queries(personas, flags, args.n, args.seed)

    configs = _load_model_configs(args)
    config = configs[0]
    stats = curate_dataset(
        specs, config, args.out,
        profile=profile, knowledge=store if config.retrieval_enabled else None,
        compiler=_compiler(profile), allow_repaired=args.allow_repaired,
    )
    print(json.dumps({"n": args.n, "seed": args.seed, **stats}, sort_keys=True))
    return 0


def cmd_bench(args) -> int:
    from .evalkit import load_queries, render_report, run_benchmark, write_outputs

    profile = _resolve_profile(args.profile)
    store = _open_store(args)
    if len(store) == 0:
        entries = load_catalog(str(resources.files("stforge") / "assets" / "catalog" / "function_blocks.jsonl"))
        augment_entries(entries, GeneratorConfig(label="augment", kind=GeneratorKind.STUB))
        store.ingest_catalog(entries)

    queries_path = args.queries
    if queries_path is None:
        queries_path = str(resources.files("stforge") / "assets" / "bench_queries.txt")
    queries = load_queries(queries_path)

    if args.configs:
        configs = load_configs(Path(args.configs).read_text(encoding="utf-8"))
    else:
        configs = default_configs()[:2]  # RAG vs standard

    records = run_benchmark(
        queries, configs, profile=profile, knowledge=store,
        compiler=_compiler(profile), seed=args.seed,
    )
    if args.out:
        paths = write_outputs(records, args.out)
        print(f"report:  {paths['report']}")
        print(f"records: {paths['records']}")
        print(f"figure:  {paths['figure']}")
    print()
    print(render_report(records))
    return 0


# -- argument parsing -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stforge",
        description="Vendor-aware ST coding assistant: compile oracle, "
                    "retrieval, competitive generation, and repair.",
    )
    parser.add_argument("--data-dir", default=None,
                        help=f"index and session directory (or ${DATA_DIR_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="build or extend the knowledge index")
    p_ingest.add_argument("--catalog", default=None, help="FB catalog record file (default: bundled)")
    p_ingest.add_argument("--spec", action="append", help="specification text file (repeatable)")
    p_ingest.add_argument("--upload", action="append", help="auxiliary file (repeatable)")
    p_ingest.add_argument("--no-augment", action="store_true",
                          help="index raw descriptions without augmentation")
    p_ingest.set_defaults(func=cmd_ingest)

    p_compile = sub.add_parser("compile", help="compile one ST file against a profile")
    p_compile.add_argument("file")
    p_compile.add_argument("--profile", default=DEFAULT_PROFILE_ID)
    p_compile.add_argument("--strict-labels", action="store_true")
    p_compile.add_argument("--emit-labels", action="store_true",
                           help="extract VAR blocks into a label manifest first")
    p_compile.add_argument("--json", action="store_true",
                           help="emit one JSON record per diagnostic plus a summary record")
    p_compile.set_defaults(func=cmd_compile)

    p_chat = sub.add_parser("chat", help="single-shot competitive generation")
    p_chat.add_argument("query")
    p_chat.add_argument("--profile", default=DEFAULT_PROFILE_ID)
    p_chat.add_argument("--config", default=None, help="generator config JSON file")
    p_chat.add_argument("--expand", action="store_true", help="enable query expansion")
    p_chat.add_argument("--draft", action="store_true", help="draft mode (skip compilation)")
    p_chat.add_argument("--no-compile", action="store_true")
    p_chat.set_defaults(func=cmd_chat)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--profile", default=DEFAULT_PROFILE_ID)
    p_serve.add_argument("--config", default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8787)
    p_serve.set_defaults(func=cmd_serve)

    p_datagen = sub.add_parser("datagen", help="generate and curate training pairs")
    p_datagen.add_argument("--n", type=int, required=True)
    p_datagen.add_argument("--seed", type=int, default=0)
    p_datagen.add_argument("--personas-file", default=None)
    p_datagen.add_argument("--flags-file", default=None)
    p_datagen.add_argument("--out", required=True)
    p_datagen.add_argument("--profile", default=DEFAULT_PROFILE_ID)
    p_datagen.add_argument("--config", default=None)
    p_datagen.add_argument("--allow-repaired", action="store_true",
                           help="accept pairs that compiled only after repair")
    p_datagen.set_defaults(func=cmd_datagen)

    p_bench = sub.add_parser("bench", help="run the compile-rate benchmark")
    p_bench.add_argument("--queries", default=None, help="query file (default: bundled 100)")
    p_bench.add_argument("--configs", default=None, help="generator config JSON file")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default=None, help="output base path for report/records/figure")
    p_bench.add_argument("--profile", default=DEFAULT_PROFILE_ID)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
