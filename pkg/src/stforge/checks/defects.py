"""Seeded single-defect injection into clean programs.

Each injector takes a clean unit and appends one self-contained construct
that trips exactly one diagnostic of its category and nothing else.  The
injector's declared category is the ground truth that validator detection
tests and the defect-scripted generation stubs are measured against.
"""

from __future__ import annotations

import copy

from ..dialect.nodes import (
    Assignment, CompilationUnit, DataTypeRef, Literal, LiteralKind, Pou,
    PouKind, VarBlock, VarBlockKind, VarDecl, VariableRef,
)
from ..dialect.printer import pretty_print
from ..dialect.spans import SourceSpan
from .diagnostics import Category

_SPAN = SourceSpan.point(1, 1)

# Categories with an injector; MissingProgram works by re-kinding the POU,
# everything else appends fresh declarations or statements.
INJECTABLE_CATEGORIES: tuple[Category, ...] = (
    Category.UNDECLARED_VARIABLE,
    Category.RESERVED_WORD_VIOLATION,
    Category.TYPE_MISMATCH,
    Category.DISALLOWED_INSTRUCTION,
    Category.UNUSED_FUNCTION_BLOCK,
    Category.MISSING_PROGRAM,
    Category.UNKNOWN_DATATYPE,
    Category.DUPLICATE_DECLARATION,
    Category.STRUCTURE_VIOLATION,
    Category.IDENTIFIER_RULE,
)


class InjectionError(Exception):
    pass


def inject_defect(unit: CompilationUnit, category: Category, *, serial: int = 0) -> str:
    """Return the source of ``unit`` with one seeded defect of ``category``.

    ``serial`` keeps generated names unique when several defects go into one
    program.  The input unit is never modified.
    """
    mutated = copy.deepcopy(unit)
    program = _first_program(mutated)

    if category is Category.UNDECLARED_VARIABLE:
        program.body.append(Assignment(
            target=VariableRef(f"ghost_flag_{serial}", span=_SPAN),
            value=_true(), span=_SPAN,
        ))
    elif category is Category.RESERVED_WORD_VIOLATION:
        _append_decl(program, VarDecl("RETAIN", DataTypeRef("BOOL", span=_SPAN), None, _SPAN))
    elif category is Category.TYPE_MISMATCH:
        name = f"mix_count_{serial}"
        _append_decl(program, VarDecl(name, DataTypeRef("INT", span=_SPAN), None, _SPAN))
        program.body.append(Assignment(
            target=VariableRef(name, span=_SPAN), value=_true(), span=_SPAN,
        ))
    elif category is Category.DISALLOWED_INSTRUCTION:
        from ..dialect.nodes import CallArg, CallStatement
        program.body.append(CallStatement(
            "OUT", [CallArg(None, "in", _true(), _SPAN)], _SPAN,
        ))
    elif category is Category.UNUSED_FUNCTION_BLOCK:
        _append_decl(program, VarDecl(
            f"idle_timer_{serial}", DataTypeRef("TON", span=_SPAN), None, _SPAN,
        ))
    elif category is Category.MISSING_PROGRAM:
        for pou in mutated.pous:
            if pou.kind is PouKind.PROGRAM:
                pou.kind = PouKind.FUNCTION_BLOCK
    elif category is Category.UNKNOWN_DATATYPE:
        _append_decl(program, VarDecl(
            f"probe_value_{serial}", DataTypeRef("UINT", span=_SPAN), None, _SPAN,
        ))
    elif category is Category.DUPLICATE_DECLARATION:
        name = f"dup_value_{serial}"
        block = VarBlock(VarBlockKind.VAR, [
            VarDecl(name, DataTypeRef("INT", span=_SPAN), None, _SPAN),
            VarDecl(name, DataTypeRef("INT", span=_SPAN), None, _SPAN),
        ], _SPAN)
        program.var_blocks.append(block)
    elif category is Category.STRUCTURE_VIOLATION:
        program.var_blocks.append(VarBlock(VarBlockKind.VAR_INPUT, [
            VarDecl(f"aux_input_{serial}", DataTypeRef("BOOL", span=_SPAN), None, _SPAN),
        ], _SPAN))
    elif category is Category.IDENTIFIER_RULE:
        _append_decl(program, VarDecl("q", DataTypeRef("BOOL", span=_SPAN), None, _SPAN))
    else:
        raise InjectionError(f"no injector for category {category.value}")

    return pretty_print(mutated)


def inject_defects(unit: CompilationUnit, categories: list[Category]) -> str:
    """Seed several independent defects into one program, one per category."""
    from ..dialect.parser import parse_source

    source = pretty_print(unit)
    for serial, category in enumerate(categories):
        source = inject_defect(parse_source(source), category, serial=serial)
    return source


def _first_program(unit: CompilationUnit) -> Pou:
    for pou in unit.pous:
        if pou.kind is PouKind.PROGRAM:
            return pou
    raise InjectionError("defect injection needs a PROGRAM POU as the base")


def _append_decl(program: Pou, decl: VarDecl) -> None:
    for block in program.var_blocks:
        if block.kind is VarBlockKind.VAR:
            block.decls.append(decl)
            return
    program.var_blocks.append(VarBlock(VarBlockKind.VAR, [decl], _SPAN))


def _true() -> Literal:
    return Literal(LiteralKind.BOOL, "TRUE", True, _SPAN)
