"""Canonical formatter: deterministic 4-space-indented, LF-terminated output.

``parse(pretty_print(parse(s)))`` is structurally equal to ``parse(s)`` for
every parseable source; the printer is also the canonical form embedded in
repair prompts and the label-stripped output.
"""

from __future__ import annotations

from .nodes import (
    Assignment, Binary, CallArg, CallStatement, CaseRange, CaseStatement,
    CompilationUnit, EmptyStatement, ExitStatement, Expression, FbInvocation,
    ForStatement, FunctionCall, IfStatement, Literal, LiteralKind, Pou,
    PouKind, RepeatStatement, ReturnStatement, Statement, Unary, VarBlock,
    VariableRef, WhileStatement,
)

INDENT = "    "

# Binding strength per operator; children with strictly weaker binding get
# parenthesized so the reparse preserves the tree shape.
_PRECEDENCE = {
    "OR": 1, "XOR": 2, "AND": 3,
    "=": 4, "<>": 4,
    "<": 5, "<=": 5, ">": 5, ">=": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7, "MOD": 7,
    "**": 8,
}
_UNARY_PRECEDENCE = 9


def pretty_print(unit: CompilationUnit) -> str:
    chunks = [_print_pou(pou) for pou in unit.pous]
    return "\n".join(chunks)


def _print_pou(pou: Pou) -> str:
    lines: list[str] = []
    header = f"{pou.kind.value} {pou.name}"
    if pou.kind is PouKind.FUNCTION and pou.return_type is not None:
        header += f" : {pou.return_type.render()}"
    lines.append(header)
    for block in pou.var_blocks:
        lines.extend(_print_var_block(block))
    if pou.var_blocks and pou.body:
        lines.append("")
    for stmt in pou.body:
        lines.extend(_print_statement(stmt, 1))
    lines.append(f"END_{pou.kind.value}")
    return "\n".join(lines) + "\n"


def _print_var_block(block: VarBlock) -> list[str]:
    lines = [INDENT + block.kind.value.replace("VAR_CONSTANT", "VAR CONSTANT")]
    for decl in block.decls:
        entry = f"{INDENT * 2}{decl.name} : {decl.data_type.render()}"
        if decl.initializer is not None:
            entry += f" := {print_expression(decl.initializer)}"
        lines.append(entry + ";")
    lines.append(INDENT + "END_VAR")
    return lines


def _print_statement(stmt: Statement, depth: int) -> list[str]:
    pad = INDENT * depth

    if isinstance(stmt, Assignment):
        return [f"{pad}{_print_ref(stmt.target)} := {print_expression(stmt.value)};"]

    if isinstance(stmt, (FbInvocation, CallStatement)):
        name = stmt.instance if isinstance(stmt, FbInvocation) else stmt.callee
        rendered = ", ".join(_print_call_arg(arg) for arg in stmt.args)
        return [f"{pad}{name}({rendered});"]

    if isinstance(stmt, IfStatement):
        lines: list[str] = []
        for i, branch in enumerate(stmt.branches):
            opener = "IF" if i == 0 else "ELSIF"
            lines.append(f"{pad}{opener} {print_expression(branch.cond)} THEN")
            lines.extend(_print_body(branch.body, depth + 1))
        if stmt.else_body:
            lines.append(f"{pad}ELSE")
            lines.extend(_print_body(stmt.else_body, depth + 1))
        lines.append(f"{pad}END_IF;")
        return lines

    if isinstance(stmt, CaseStatement):
        lines = [f"{pad}CASE {print_expression(stmt.selector)} OF"]
        for arm in stmt.arms:
            labels = ", ".join(_print_case_label(label) for label in arm.labels)
            lines.append(f"{pad}{INDENT}{labels}:")
            lines.extend(_print_body(arm.body, depth + 2))
        if stmt.else_body:
            lines.append(f"{pad}{INDENT}ELSE")
            lines.extend(_print_body(stmt.else_body, depth + 2))
        lines.append(f"{pad}END_CASE;")
        return lines

    if isinstance(stmt, ForStatement):
        header = f"{pad}FOR {stmt.var_name} := {print_expression(stmt.start)} TO {print_expression(stmt.stop)}"
        if stmt.step is not None:
            header += f" BY {print_expression(stmt.step)}"
        header += " DO"
        return [header, *_print_body(stmt.body, depth + 1), f"{pad}END_FOR;"]

    if isinstance(stmt, WhileStatement):
        return [
            f"{pad}WHILE {print_expression(stmt.cond)} DO",
            *_print_body(stmt.body, depth + 1),
            f"{pad}END_WHILE;",
        ]

    if isinstance(stmt, RepeatStatement):
        return [
            f"{pad}REPEAT",
            *_print_body(stmt.body, depth + 1),
            f"{pad}UNTIL {print_expression(stmt.until_cond)}",
            f"{pad}END_REPEAT;",
        ]

    if isinstance(stmt, ExitStatement):
        return [f"{pad}EXIT;"]
    if isinstance(stmt, ReturnStatement):
        return [f"{pad}RETURN;"]
    if isinstance(stmt, EmptyStatement):
        return [f"{pad};"]

    raise TypeError(f"unprintable statement {type(stmt).__name__}")


def _print_body(body: list[Statement], depth: int) -> list[str]:
    lines: list[str] = []
    for stmt in body:
        lines.extend(_print_statement(stmt, depth))
    return lines


def _print_case_label(label) -> str:
    if isinstance(label, CaseRange):
        return f"{label.low.text}..{label.high.text}"
    return label.text


def _print_call_arg(arg: CallArg) -> str:
    if arg.name is None:
        return print_expression(arg.value)
    op = ":=" if arg.direction == "in" else "=>"
    return f"{arg.name} {op} {print_expression(arg.value)}"


def print_expression(expr: Expression) -> str:
    return _print_expr(expr, 0)


def _print_expr(expr: Expression, parent_level: int) -> str:
    if isinstance(expr, Literal):
        if expr.kind is LiteralKind.BOOL:
            return "TRUE" if expr.value else "FALSE"
        return expr.text

    if isinstance(expr, VariableRef):
        return _print_ref(expr)

    if isinstance(expr, FunctionCall):
        rendered = ", ".join(_print_call_arg(arg) for arg in expr.args)
        return f"{expr.callee}({rendered})"

    if isinstance(expr, Unary):
        inner = _print_expr(expr.operand, _UNARY_PRECEDENCE)
        text = f"NOT {inner}" if expr.op == "NOT" else f"-{inner}"
        return f"({text})" if parent_level >= _UNARY_PRECEDENCE else text

    if isinstance(expr, Binary):
        level = _PRECEDENCE[expr.op]
        # Same-level children on the non-associative side get parens so the
        # reparse preserves the tree; '**' is right-associative, the rest
        # associate left.
        if expr.op == "**":
            lhs = _print_expr(expr.lhs, level + 1)
            rhs = _print_expr(expr.rhs, level)
        else:
            lhs = _print_expr(expr.lhs, level)
            rhs = _print_expr(expr.rhs, level + 1)
        text = f"{lhs} {expr.op} {rhs}"
        return f"({text})" if level < parent_level else text

    raise TypeError(f"unprintable expression {type(expr).__name__}")


def _print_ref(ref: VariableRef) -> str:
    text = ref.name
    if ref.indices:
        text += "[" + ", ".join(print_expression(ix) for ix in ref.indices) + "]"
    for member in ref.members:
        text += f".{member}"
    return text
