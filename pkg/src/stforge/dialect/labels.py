"""Label manifest extraction.

The target engineering tool manages program variables as externally
registered labels instead of inline ``VAR`` blocks.  ``extract_labels``
emulates that workflow: it lifts ``VAR``/``VAR_EXTERNAL`` declarations out
of PROGRAM POUs into a manifest and returns the stripped unit.  Interface
blocks of functions and function blocks stay untouched.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .nodes import CompilationUnit, DataTypeRef, Pou, PouKind, VarBlockKind
from .printer import print_expression
from .spans import SourceSpan

_EXTRACTED_KINDS = (VarBlockKind.VAR, VarBlockKind.VAR_EXTERNAL)

GLOBAL_SCOPE = "Global"


@dataclass(frozen=True)
class Label:
    name: str
    data_type: DataTypeRef
    scope: str  # GLOBAL_SCOPE or the owning program's name
    initializer: str | None
    span: SourceSpan

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "data_type": self.data_type.render(),
            "scope": self.scope,
            "initializer": self.initializer,
        }


@dataclass
class LabelManifest:
    labels: list[Label] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.labels)

    def scope_names(self, pou_name: str) -> dict[str, Label]:
        """Labels visible inside ``pou_name``: its locals plus all globals."""
        visible: dict[str, Label] = {}
        for label in self.labels:
            if label.scope == GLOBAL_SCOPE or label.scope.upper() == pou_name.upper():
                visible[label.name.upper()] = label
        return visible

    def to_records(self) -> list[dict]:
        return [label.to_record() for label in self.labels]


class DuplicateLabelError(Exception):
    def __init__(self, name: str, spans: list[SourceSpan]) -> None:
        where = ", ".join(str(s) for s in spans)
        super().__init__(f"label {name!r} declared more than once ({where})")
        self.name = name
        self.spans = spans


def extract_labels(unit: CompilationUnit) -> tuple[LabelManifest, CompilationUnit]:
    """Lift VAR/VAR_EXTERNAL declarations out of PROGRAM POUs.

    Returns the manifest and a deep-copied unit with those blocks removed.
    Raises :class:`DuplicateLabelError` when a name repeats within one scope
    (case-insensitive).
    """
    manifest = LabelManifest()
    stripped = copy.deepcopy(unit)
    seen: dict[tuple[str, str], Label] = {}

    for pou in stripped.pous:
        if pou.kind is not PouKind.PROGRAM:
            continue
        kept = []
        for block in pou.var_blocks:
            if block.kind not in _EXTRACTED_KINDS:
                kept.append(block)
                continue
            scope = GLOBAL_SCOPE if block.kind is VarBlockKind.VAR_EXTERNAL else pou.name
            for decl in block.decls:
                label = Label(
                    name=decl.name,
                    data_type=decl.data_type,
                    scope=scope,
                    initializer=(
                        print_expression(decl.initializer)
                        if decl.initializer is not None else None
                    ),
                    span=decl.span,
                )
                key = (scope.upper(), decl.name.upper())
                if key in seen:
                    raise DuplicateLabelError(decl.name, [seen[key].span, decl.span])
                seen[key] = label
                manifest.labels.append(label)
        pou.var_blocks = kept

    return manifest, stripped
