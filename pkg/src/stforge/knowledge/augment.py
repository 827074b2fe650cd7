"""Machine-augmented catalog descriptions.

Raw vendor descriptions rarely distinguish instruction variants, which makes
retrieval confuse e.g. an edge-executed instruction with its every-scan base
form.  Augmentation appends explicit variant semantics: with a remote
generator via the augmentation prompt, with the stub deterministically from
the entry's variant tags.
"""

from __future__ import annotations

from ..catalog import EDGE_EXECUTED, EN_ENO, UNSIGNED, FunctionBlockEntry
from ..templates import render_template


def augment_description(entry: FunctionBlockEntry, generator) -> str:
    """Return the augmented description text for ``entry``.

    ``generator`` is a backend configuration; the caller stores the result
    as ``entry.augmented_description``.  Backend errors propagate unchanged.
    """
    from ..backends import GeneratorKind, generate_text

    if generator.kind is GeneratorKind.STUB:
        return stub_augmentation(entry)

    prompt = render_template(
        "augment_description",
        name=entry.name,
        base_name=entry.base_name,
        variant_tags=", ".join(sorted(entry.variant_tags)) or "none",
        signature=entry.signature.render(),
        raw_description=entry.raw_description,
    )
    return generate_text(prompt, generator)


def stub_augmentation(entry: FunctionBlockEntry) -> str:
    """Deterministic augmentation derived from the entry's variant tags."""
    sentences = [entry.raw_description.rstrip()]
    if EDGE_EXECUTED in entry.variant_tags:
        sentences.append(
            f"{entry.name} is the edge-executed variant of {entry.base_name}: "
            f"it executes on the rising edge of its execution condition and "
            f"runs exactly once per rising edge, not every scan. Choose this "
            f"edge variant for one-shot, edge-triggered actions; the base "
            f"instruction {entry.base_name} executes every scan while the "
            f"condition stays on."
        )
    if UNSIGNED in entry.variant_tags:
        sentences.append(
            f"{entry.name} treats its data as unsigned 16-bit values "
            f"(0 to 65535) instead of signed values."
        )
    if EN_ENO in entry.variant_tags:
        sentences.append(
            "Follows the EN/ENO convention: the instruction executes only "
            "while EN is on, and ENO reports successful execution for chaining."
        )
    else:
        sentences.append(
            "Standard function block enable behaviour; EN/ENO gating does "
            "not apply to this block."
        )
    return " ".join(sentences)


def augment_entries(entries: list[FunctionBlockEntry], generator) -> list[FunctionBlockEntry]:
    """Augment every entry in place (skipping already-augmented ones)."""
    for entry in entries:
        if entry.augmented_description is None:
            entry.augmented_description = augment_description(entry, generator)
    return entries
