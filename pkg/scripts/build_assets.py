#!/usr/bin/env python3
"""Regenerate derived assets: the default profile and the sampled corpus.

The default profile embeds the FB catalog signatures; regenerating it from
``assets/catalog/function_blocks.jsonl`` keeps the two in sync.  Sampled
corpus programs are frozen into ``assets/corpus`` so the acceptance suite
runs against committed files.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from stforge.catalog import load_catalog  # noqa: E402
from stforge.dialect.sampler import sample_program  # noqa: E402

ASSETS = REPO / "src" / "stforge" / "assets"

RESERVED_WORDS = [
    "ACTION", "ADDRESS", "ANY", "ANY_BIT", "ANY_INT", "ANY_NUM", "ANY_REAL",
    "AT", "BYTE", "CONFIGURATION", "DATE", "DT", "EN", "ENO", "INITIAL_STEP",
    "LABEL", "LINT", "LWORD", "POINTER", "READ_ONLY", "READ_WRITE", "REF",
    "RESOURCE", "RETAIN", "SINT", "STEP", "TASK", "TOD", "TRANSITION",
    "UDINT", "UINT", "ULINT", "USINT", "WSTRING",
]

ALLOWED_DATATYPES = ["BOOL", "INT", "DINT", "WORD", "DWORD", "REAL", "LREAL", "TIME", "STRING"]

# Ladder-only instructions that the ST converter rejects.
DISALLOWED_INSTRUCTIONS = [
    "ANB", "LD", "LDI", "MC", "MCR", "MPP", "MPS", "MRD", "ORB", "OUT",
    "PLF", "PLS", "RST", "SET",
]

BLOCK_KIND_TABLE = {
    "PROGRAM": ["VAR", "VAR_EXTERNAL", "VAR_CONSTANT"],
    "FUNCTION": ["VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR", "VAR_CONSTANT"],
    "FUNCTION_BLOCK": ["VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR", "VAR_EXTERNAL", "VAR_CONSTANT"],
}

FORBIDDEN_NAMES = ["D0", "D1", "D2", "M0", "M1", "M2", "SD0", "SM400", "SM401", "X0", "X1", "Y0", "Y1"]

SAMPLED_CORPUS_COUNT = 20


def build_profile() -> None:
    entries = load_catalog(ASSETS / "catalog" / "function_blocks.jsonl")
    signatures = []
    for entry in entries:
        record = entry.to_record()
        del record["raw_description"]
        del record["augmented_description"]
        signatures.append(record)

    profile = {
        "schema_version": 1,
        "id": "melsec-iqr",
        "reserved_words": RESERVED_WORDS,
        "allowed_datatypes": ALLOWED_DATATYPES,
        "disallowed_instructions": DISALLOWED_INSTRUCTIONS,
        "block_kind_table": BLOCK_KIND_TABLE,
        "identifier_rules": {"min_length": 2, "forbidden_names": FORBIDDEN_NAMES},
        "strict_labels": False,
        "fb_catalog": signatures,
    }
    out = ASSETS / "profiles" / "melsec-iqr.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(profile, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(signatures)} catalog signatures)")


def build_corpus() -> None:
    corpus = ASSETS / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    for seed in range(SAMPLED_CORPUS_COUNT):
        path = corpus / f"sampled_{seed:02d}.st"
        path.write_text(sample_program(seed), encoding="utf-8")
    print(f"wrote {SAMPLED_CORPUS_COUNT} sampled corpus programs to {corpus}")


if __name__ == "__main__":
    build_profile()
    build_corpus()
