"""Function-block catalog: instruction signatures plus variant-suffix semantics.

Catalog entries are the single source of truth for FB names, parameter
signatures, and the vendor naming convention where a trailing ``P`` means
edge-executed and ``_U`` means the unsigned variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

EDGE_EXECUTED = "EdgeExecuted"
UNSIGNED = "Unsigned"
EN_ENO = "EnEno"

VARIANT_TAGS = frozenset({EDGE_EXECUTED, UNSIGNED, EN_ENO})


class CatalogError(Exception):
    pass


@dataclass(frozen=True)
class FbSignature:
    inputs: tuple[tuple[str, str], ...]   # (param name, type name)
    outputs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        names = [n.upper() for n, _ in self.inputs + self.outputs]
        if len(names) != len(set(names)):
            raise CatalogError(f"duplicate parameter name in signature {self}")

    def input_type(self, name: str) -> str | None:
        for param, type_name in self.inputs:
            if param.upper() == name.upper():
                return type_name
        return None

    def output_type(self, name: str) -> str | None:
        for param, type_name in self.outputs:
            if param.upper() == name.upper():
                return type_name
        return None

    def render(self) -> str:
        ins = ", ".join(f"{n} : {t}" for n, t in self.inputs)
        outs = ", ".join(f"{n} : {t}" for n, t in self.outputs)
        return f"Inputs: {ins or '-'} | Outputs: {outs or '-'}"


@dataclass
class FunctionBlockEntry:
    name: str
    base_name: str
    signature: FbSignature
    raw_description: str
    variant_tags: frozenset[str] = frozenset()
    augmented_description: str | None = None

    def __post_init__(self) -> None:
        unknown = self.variant_tags - VARIANT_TAGS
        if unknown:
            raise CatalogError(f"unknown variant tags {sorted(unknown)} on {self.name}")
        derived = derive_variant_tags(self.name, self.base_name)
        if (self.variant_tags & {EDGE_EXECUTED, UNSIGNED}) != derived:
            raise CatalogError(
                f"variant tags {sorted(self.variant_tags)} inconsistent with "
                f"name {self.name!r} (base {self.base_name!r})"
            )
        if EN_ENO in self.variant_tags:
            if self.signature.input_type("EN") is None or self.signature.output_type("ENO") is None:
                raise CatalogError(f"{self.name}: EnEno tag requires EN input and ENO output")

    @property
    def description(self) -> str:
        return self.augmented_description or self.raw_description

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "base_name": self.base_name,
            "variant_tags": sorted(self.variant_tags),
            "inputs": [[n, t] for n, t in self.signature.inputs],
            "outputs": [[n, t] for n, t in self.signature.outputs],
            "raw_description": self.raw_description,
            "augmented_description": self.augmented_description,
        }

    @staticmethod
    def from_record(record: dict) -> "FunctionBlockEntry":
        try:
            return FunctionBlockEntry(
                name=record["name"],
                base_name=record.get("base_name", record["name"]),
                signature=FbSignature(
                    inputs=tuple((n, t) for n, t in record.get("inputs", [])),
                    outputs=tuple((n, t) for n, t in record.get("outputs", [])),
                ),
                raw_description=record.get("raw_description", ""),
                variant_tags=frozenset(record.get("variant_tags", [])),
                augmented_description=record.get("augmented_description"),
            )
        except KeyError as exc:
            raise CatalogError(f"catalog record missing field {exc}") from exc


def derive_variant_tags(name: str, base_name: str) -> frozenset[str]:
    """Suffix-derived tags: ``<base>P`` is edge-executed, ``<base>[P]_U`` unsigned."""
    upper = name.upper()
    base = base_name.upper()
    if not upper.startswith(base):
        raise CatalogError(f"name {name!r} does not extend base {base_name!r}")
    rest = upper[len(base):]
    tags: set[str] = set()
    if rest.endswith("_U"):
        tags.add(UNSIGNED)
        rest = rest[:-2]
    if rest == "P":
        tags.add(EDGE_EXECUTED)
        rest = ""
    if rest:
        raise CatalogError(f"unrecognized suffix {rest!r} on {name!r}")
    return frozenset(tags)


def load_catalog(path: str | Path) -> list[FunctionBlockEntry]:
    """Read a record file (one JSON entry per line)."""
    entries: list[FunctionBlockEntry] = []
    seen: set[str] = set()
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{path}:{line_no}: bad record: {exc}") from exc
        entry = FunctionBlockEntry.from_record(record)
        key = entry.name.upper()
        if key in seen:
            raise CatalogError(f"{path}:{line_no}: duplicate entry {entry.name!r}")
        seen.add(key)
        entries.append(entry)
    return entries


def dump_catalog(entries: list[FunctionBlockEntry], path: str | Path) -> None:
    lines = [json.dumps(entry.to_record(), sort_keys=True) for entry in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
