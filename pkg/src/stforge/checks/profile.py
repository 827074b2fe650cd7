"""Vendor dialect profiles: the rule set the static checker enforces.

A profile is a JSON document (see ``assets/profiles/``) carrying the
reserved-word blacklist, the datatype vocabulary, disallowed instruction
names, POU/var-block structure rules, identifier rules, and the FB catalog
signatures.  Profiles are immutable after load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..catalog import CatalogError, FbSignature, FunctionBlockEntry
from ..dialect.nodes import PouKind, VarBlockKind

DEFAULT_PROFILE_ID = "melsec-iqr"

_PROFILE_FIELDS = {
    "schema_version", "id", "reserved_words", "allowed_datatypes",
    "disallowed_instructions", "block_kind_table", "identifier_rules",
    "strict_labels", "fb_catalog",
}
_IDENTIFIER_RULE_FIELDS = {"min_length", "forbidden_names"}


class ProfileParseError(Exception):
    pass


class ProfileInvariantViolation(Exception):
    pass


@dataclass(frozen=True)
class IdentifierRules:
    min_length: int = 1
    forbidden_names: frozenset[str] = frozenset()  # stored upper-cased


@dataclass(frozen=True)
class DialectProfile:
    id: str
    reserved_words: frozenset[str]          # upper-cased
    allowed_datatypes: frozenset[str]       # upper-cased
    disallowed_instructions: frozenset[str]  # upper-cased
    block_kind_table: dict[PouKind, frozenset[VarBlockKind]]
    identifier_rules: IdentifierRules
    strict_labels: bool
    fb_catalog: tuple[FunctionBlockEntry, ...]
    _fb_index: dict[str, FunctionBlockEntry] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self.allowed_datatypes:
            raise ProfileInvariantViolation("allowed_datatypes must be non-empty")
        overlap = self.reserved_words & self.allowed_datatypes
        if overlap:
            raise ProfileInvariantViolation(
                f"reserved words also listed as datatypes: {sorted(overlap)}"
            )
        index = {entry.name.upper(): entry for entry in self.fb_catalog}
        if len(index) != len(self.fb_catalog):
            raise ProfileInvariantViolation("duplicate FB catalog entry names")
        object.__setattr__(self, "_fb_index", index)

    def is_reserved(self, name: str) -> bool:
        return name.upper() in self.reserved_words

    def is_known_datatype(self, name: str) -> bool:
        return name.upper() in self.allowed_datatypes

    def fb_entry(self, name: str) -> FunctionBlockEntry | None:
        return self._fb_index.get(name.upper())

    def fb_signature(self, name: str) -> FbSignature | None:
        entry = self.fb_entry(name)
        return entry.signature if entry else None

    def allowed_blocks(self, pou_kind: PouKind) -> frozenset[VarBlockKind]:
        return self.block_kind_table.get(pou_kind, frozenset())


def load_profile(document: str) -> DialectProfile:
    """Parse and validate a profile document (JSON text).

    Unknown fields are rejected (:class:`ProfileParseError`); invariant
    breaks raise :class:`ProfileInvariantViolation`.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ProfileParseError(f"profile is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProfileParseError("profile document must be a JSON object")

    unknown = set(data) - _PROFILE_FIELDS
    if unknown:
        raise ProfileParseError(f"unknown profile fields: {sorted(unknown)}")
    missing = {"id", "allowed_datatypes"} - set(data)
    if missing:
        raise ProfileParseError(f"missing required profile fields: {sorted(missing)}")

    ident_raw = data.get("identifier_rules", {})
    if not isinstance(ident_raw, dict) or set(ident_raw) - _IDENTIFIER_RULE_FIELDS:
        raise ProfileParseError(f"bad identifier_rules: {ident_raw!r}")

    table: dict[PouKind, frozenset[VarBlockKind]] = {}
    for kind_name, block_names in data.get("block_kind_table", {}).items():
        try:
            kind = PouKind(kind_name.upper())
            table[kind] = frozenset(VarBlockKind(b.upper()) for b in block_names)
        except ValueError as exc:
            raise ProfileParseError(f"bad block_kind_table entry {kind_name!r}: {exc}") from exc

    try:
        catalog = tuple(
            FunctionBlockEntry.from_record(rec) for rec in data.get("fb_catalog", [])
        )
    except CatalogError as exc:
        raise ProfileParseError(f"bad fb_catalog: {exc}") from exc

    return DialectProfile(
        id=str(data["id"]),
        reserved_words=_upper_set(data.get("reserved_words", []), "reserved_words"),
        allowed_datatypes=_upper_set(data["allowed_datatypes"], "allowed_datatypes"),
        disallowed_instructions=_upper_set(
            data.get("disallowed_instructions", []), "disallowed_instructions"),
        block_kind_table=table,
        identifier_rules=IdentifierRules(
            min_length=int(ident_raw.get("min_length", 1)),
            forbidden_names=_upper_set(ident_raw.get("forbidden_names", []), "forbidden_names"),
        ),
        strict_labels=bool(data.get("strict_labels", False)),
        fb_catalog=catalog,
    )


def load_profile_file(path: str | Path) -> DialectProfile:
    return load_profile(Path(path).read_text(encoding="utf-8"))


def bundled_profile_ids() -> list[str]:
    root = resources.files("stforge") / "assets" / "profiles"
    return sorted(p.name.removesuffix(".json") for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled_profile(profile_id: str = DEFAULT_PROFILE_ID) -> DialectProfile:
    ref = resources.files("stforge") / "assets" / "profiles" / f"{profile_id}.json"
    try:
        document = ref.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ProfileParseError(
            f"no bundled profile {profile_id!r}; available: {bundled_profile_ids()}"
        ) from exc
    return load_profile(document)


def _upper_set(values, what: str) -> frozenset[str]:
    if not isinstance(values, (list, tuple)):
        raise ProfileParseError(f"{what} must be a list")
    return frozenset(str(v).upper() for v in values)
