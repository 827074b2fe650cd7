"""AST for the supported ST dialect subset.

Every node carries the :class:`SourceSpan` of the source text it covers.
``structural_key`` reduces a tree to a nested tuple that ignores spans and
literal spelling, which is what round-trip tests compare.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

from .lexer import Token
from .spans import SourceSpan


class PouKind(enum.Enum):
    PROGRAM = "PROGRAM"
    FUNCTION = "FUNCTION"
    FUNCTION_BLOCK = "FUNCTION_BLOCK"


class VarBlockKind(enum.Enum):
    VAR = "VAR"
    VAR_INPUT = "VAR_INPUT"
    VAR_OUTPUT = "VAR_OUTPUT"
    VAR_IN_OUT = "VAR_IN_OUT"
    VAR_EXTERNAL = "VAR_EXTERNAL"
    VAR_CONSTANT = "VAR_CONSTANT"


class LiteralKind(enum.Enum):
    INT = "Int"
    REAL = "Real"
    TIME = "Time"
    STRING = "String"
    BOOL = "Bool"


# --- Expressions -----------------------------------------------------------

@dataclass
class Literal:
    kind: LiteralKind
    text: str
    value: object
    span: SourceSpan


@dataclass
class VariableRef:
    """``name`` optionally followed by array indices and member accesses.

    Covers plain variables (``count``), array elements (``buf[2]``), and
    function-block member reads (``run_timer.Q``).
    """

    name: str
    indices: list["Expression"] = field(default_factory=list)
    members: list[str] = field(default_factory=list)
    span: SourceSpan = SourceSpan.point(1, 1)


@dataclass
class Unary:
    op: str  # 'NOT' or '-'
    operand: "Expression"
    span: SourceSpan


@dataclass
class Binary:
    op: str
    lhs: "Expression"
    rhs: "Expression"
    span: SourceSpan


@dataclass
class CallArg:
    """One argument of a call: positional, ``name := expr`` or ``name => target``."""

    name: str | None
    direction: str  # 'in' | 'out'
    value: "Expression"
    span: SourceSpan


@dataclass
class FunctionCall:
    callee: str
    args: list[CallArg]
    span: SourceSpan


Expression = Union[Literal, VariableRef, Unary, Binary, FunctionCall]


# --- Statements ------------------------------------------------------------

@dataclass
class Assignment:
    target: VariableRef
    value: Expression
    span: SourceSpan


@dataclass
class IfBranch:
    cond: Expression
    body: list["Statement"]
    span: SourceSpan


@dataclass
class IfStatement:
    branches: list[IfBranch]  # IF plus any ELSIF branches, in source order
    else_body: list["Statement"]
    span: SourceSpan


@dataclass
class CaseRange:
    low: Literal
    high: Literal
    span: SourceSpan


@dataclass
class CaseArm:
    labels: list[Union[Literal, CaseRange]]
    body: list["Statement"]
    span: SourceSpan


@dataclass
class CaseStatement:
    selector: Expression
    arms: list[CaseArm]
    else_body: list["Statement"]
    span: SourceSpan


@dataclass
class ForStatement:
    var_name: str
    start: Expression
    stop: Expression
    step: Expression | None
    body: list["Statement"]
    span: SourceSpan


@dataclass
class WhileStatement:
    cond: Expression
    body: list["Statement"]
    span: SourceSpan


@dataclass
class RepeatStatement:
    body: list["Statement"]
    until_cond: Expression
    span: SourceSpan


@dataclass
class FbInvocation:
    """Named-parameter invocation of a declared FB instance: ``tmr(IN := x);``"""

    instance: str
    args: list[CallArg]
    span: SourceSpan


@dataclass
class CallStatement:
    """Function-style call in statement position: ``ZPUSH(flag, buf);``"""

    callee: str
    args: list[CallArg]
    span: SourceSpan


@dataclass
class ExitStatement:
    span: SourceSpan


@dataclass
class ReturnStatement:
    span: SourceSpan


@dataclass
class EmptyStatement:
    span: SourceSpan


Statement = Union[
    Assignment, IfStatement, CaseStatement, ForStatement, WhileStatement,
    RepeatStatement, FbInvocation, CallStatement, ExitStatement,
    ReturnStatement, EmptyStatement,
]


# --- Declarations ----------------------------------------------------------

@dataclass
class DataTypeRef:
    base: str
    array_bounds: list[tuple[int, int]] | None = None
    span: SourceSpan = SourceSpan.point(1, 1)

    def __post_init__(self) -> None:
        for low, high in self.array_bounds or ():
            if low > high:
                raise ValueError(f"array bound {low}..{high} is inverted")

    def render(self) -> str:
        if self.array_bounds:
            dims = ", ".join(f"{lo}..{hi}" for lo, hi in self.array_bounds)
            return f"ARRAY [{dims}] OF {self.base}"
        return self.base


@dataclass
class VarDecl:
    name: str
    data_type: DataTypeRef
    initializer: Expression | None
    span: SourceSpan


@dataclass
class VarBlock:
    kind: VarBlockKind
    decls: list[VarDecl]
    span: SourceSpan


@dataclass
class Pou:
    kind: PouKind
    name: str
    return_type: DataTypeRef | None
    var_blocks: list[VarBlock]
    body: list[Statement]
    span: SourceSpan


@dataclass
class CompilationUnit:
    pous: list[Pou]
    trivia: list[Token] = field(default_factory=list)  # comment tokens
    span: SourceSpan = SourceSpan.point(1, 1)


# --- Structural comparison -------------------------------------------------

def structural_key(node: object) -> object:
    """Nested-tuple shape of a tree, ignoring spans, trivia, and literal text.

    Two parses are considered equivalent when their keys are equal; this is
    the oracle used by pretty-printer round-trip tests.
    """
    if isinstance(node, Literal):
        return ("lit", node.kind.value, node.value)
    if isinstance(node, (list, tuple)):
        return tuple(structural_key(item) for item in node)
    if isinstance(node, (str, int, float, bool, type(None))):
        return node
    if isinstance(node, enum.Enum):
        return node.value
    if isinstance(node, CompilationUnit):
        return ("unit", structural_key(node.pous))
    if hasattr(node, "__dataclass_fields__"):
        fields = [
            (name, structural_key(getattr(node, name)))
            for name in node.__dataclass_fields__
            if name not in ("span", "trivia")
        ]
        return (type(node).__name__, tuple(fields))
    raise TypeError(f"structural_key: unsupported node {type(node).__name__}")
