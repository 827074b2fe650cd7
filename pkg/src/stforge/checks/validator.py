"""Static checks that constitute the desk-scale compile oracle.

Checks cover name resolution against declarations and external labels,
reserved-word and identifier rules, datatype vocabulary, disallowed
instructions, var-block structure rules, assignment/argument type
compatibility, and the instantiated-but-never-invoked FB rule.  Output is a
deterministic diagnostic list ordered by (span, code).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import FbSignature
from ..dialect.labels import LabelManifest
from ..dialect.nodes import (
    Assignment, Binary, CallArg, CallStatement, CaseStatement,
    CompilationUnit, DataTypeRef, EmptyStatement, ExitStatement, Expression,
    FbInvocation, ForStatement, FunctionCall, IfStatement, Literal,
    LiteralKind, Pou, PouKind, RepeatStatement, ReturnStatement, Statement,
    Unary, VarBlockKind, VarDecl, VariableRef, WhileStatement,
)
from ..dialect.spans import SourceSpan
from .diagnostics import Category, Diagnostic, error
from .profile import DialectProfile

# Scalar type families used by the compatibility table.
_INT_TYPES = ("INT", "DINT")
_REAL_TYPES = ("REAL", "LREAL")
_BIT_TYPES = ("WORD", "DWORD")
_INT_LITERAL = "<integer literal>"
_REAL_LITERAL = "<real literal>"

# Widening conversions accepted on assignment (besides exact match).
_WIDENINGS = {("INT", "DINT"), ("REAL", "LREAL")}


@dataclass(frozen=True)
class _ArrayType:
    base: str
    bounds: tuple[tuple[int, int], ...]

    def __str__(self) -> str:
        dims = ", ".join(f"{lo}..{hi}" for lo, hi in self.bounds)
        return f"ARRAY [{dims}] OF {self.base}"


_Type = "str | _ArrayType"


@dataclass
class _DeclInfo:
    name: str
    data_type: DataTypeRef
    block_kind: VarBlockKind | None  # None for external labels
    span: SourceSpan
    fb_type: str | None = None       # set when the declared type is an FB
    type_known: bool = True          # False suppresses cascading checks
    invoked: bool = False


def validate(unit: CompilationUnit, profile: DialectProfile,
             labels: LabelManifest | None = None) -> list[Diagnostic]:
    """Run every static check; returns the ordered diagnostic list."""
    checker = _Validator(unit, profile, labels or LabelManifest())
    checker.run()
    return sorted(
        checker.diags,
        key=lambda d: (d.span.start_line, d.span.start_col, d.code, d.message),
    )


class _Validator:
    def __init__(self, unit: CompilationUnit, profile: DialectProfile,
                 labels: LabelManifest) -> None:
        self.unit = unit
        self.profile = profile
        self.labels = labels
        self.diags: list[Diagnostic] = []
        # POUs defined inside the unit: function blocks become datatypes,
        # functions become callable with a return type.
        self.user_fbs: dict[str, FbSignature] = {}
        self.user_functions: dict[str, tuple[FbSignature, str]] = {}
        for pou in unit.pous:
            if pou.kind is PouKind.FUNCTION_BLOCK:
                self.user_fbs[pou.name.upper()] = _interface_signature(pou)
            elif pou.kind is PouKind.FUNCTION and pou.return_type is not None:
                self.user_functions[pou.name.upper()] = (
                    _interface_signature(pou), pou.return_type.base.upper(),
                )

    def report(self, category: Category, span: SourceSpan, message: str,
               related: tuple[SourceSpan, ...] = ()) -> None:
        self.diags.append(error(category, span, message, related))

    # -- unit level ------------------------------------------------------

    def run(self) -> None:
        if not any(p.kind is PouKind.PROGRAM for p in self.unit.pous):
            self.report(
                Category.MISSING_PROGRAM, self.unit.span,
                "no PROGRAM organization unit in this compilation unit",
            )
        seen_pous: dict[str, SourceSpan] = {}
        for pou in self.unit.pous:
            key = pou.name.upper()
            if key in seen_pous:
                self.report(
                    Category.DUPLICATE_DECLARATION, pou.span,
                    f"POU name {pou.name!r} already used",
                    related=(seen_pous[key],),
                )
            else:
                seen_pous[key] = pou.span
            self._check_declared_name(pou.name, pou.span, is_pou=True)
            self._check_pou(pou)

    # -- POU level ---------------------------------------------------------

    def _check_pou(self, pou: Pou) -> None:
        scope = self._collect_scope(pou)
        body_ctx = _BodyContext(pou=pou, scope=scope, loop_depth=0)
        for stmt in pou.body:
            self._check_statement(stmt, body_ctx)
        for info in scope.values():
            if info.fb_type is not None and info.block_kind is not None and not info.invoked:
                self.report(
                    Category.UNUSED_FUNCTION_BLOCK, info.span,
                    f"function block instance {info.name!r} ({info.fb_type}) is declared but never invoked",
                )

    def _collect_scope(self, pou: Pou) -> dict[str, _DeclInfo]:
        scope: dict[str, _DeclInfo] = {}
        allowed_blocks = self.profile.allowed_blocks(pou.kind)

        for block in pou.var_blocks:
            if block.kind not in allowed_blocks:
                self.report(
                    Category.STRUCTURE_VIOLATION, block.span,
                    f"{block.kind.value} block is not allowed in a {pou.kind.value}",
                )
            if (
                self.profile.strict_labels
                and pou.kind is PouKind.PROGRAM
                and block.kind is VarBlockKind.VAR
            ):
                self.report(
                    Category.STRUCTURE_VIOLATION, block.span,
                    "inline VAR block in PROGRAM: this profile requires externally registered labels",
                )
            for decl in block.decls:
                self._check_decl(decl, block.kind, scope)

        # Inside a FUNCTION the function name acts as the result variable.
        if pou.kind is PouKind.FUNCTION and pou.return_type is not None:
            scope.setdefault(pou.name.upper(), _DeclInfo(
                name=pou.name,
                data_type=pou.return_type,
                block_kind=None,
                span=pou.span,
                fb_type=None,
                invoked=True,
            ))
        return scope

    def _check_decl(self, decl: VarDecl, block_kind: VarBlockKind,
                    scope: dict[str, _DeclInfo]) -> None:
        self._check_declared_name(decl.name, decl.span, is_pou=False)

        fb_type, type_known = self._check_datatype(decl.data_type)

        key = decl.name.upper()
        if key in scope:
            self.report(
                Category.DUPLICATE_DECLARATION, decl.span,
                f"{decl.name!r} is already declared in this POU",
                related=(scope[key].span,),
            )
            return
        info = _DeclInfo(decl.name, decl.data_type, block_kind, decl.span,
                         fb_type=fb_type, type_known=type_known)
        scope[key] = info

        if decl.initializer is not None and type_known:
            if fb_type is not None:
                self.report(
                    Category.TYPE_MISMATCH, decl.span,
                    f"function block instance {decl.name!r} cannot take an initializer",
                )
                return
            init_type = self._type_of(decl.initializer, _BodyContext(None, scope, 0))
            decl_type = _declared_type(decl.data_type, fb_type)
            if init_type is not None and not _assignable(init_type, decl_type):
                self.report(
                    Category.TYPE_MISMATCH, decl.span,
                    f"initializer of type {_show(init_type)} does not fit {decl.name} : {_show(decl_type)}",
                )

    def _check_declared_name(self, name: str, span: SourceSpan, *, is_pou: bool) -> None:
        what = "POU" if is_pou else "variable"
        if self.profile.is_reserved(name):
            self.report(
                Category.RESERVED_WORD_VIOLATION, span,
                f"{what} name {name!r} is a reserved word in profile {self.profile.id!r}",
            )
        elif self.profile.is_known_datatype(name) or (
            not is_pou and self.profile.fb_entry(name) is not None
        ):
            self.report(
                Category.RESERVED_WORD_VIOLATION, span,
                f"{what} name {name!r} collides with a datatype or catalog instruction name",
            )
        if is_pou:
            return  # identifier rules target labels/variables, not POU names
        rules = self.profile.identifier_rules
        if len(name) < rules.min_length:
            self.report(
                Category.IDENTIFIER_RULE, span,
                f"{what} name {name!r} is shorter than the minimum length {rules.min_length}",
            )
        if name.upper() in rules.forbidden_names:
            self.report(
                Category.IDENTIFIER_RULE, span,
                f"{what} name {name!r} is on the forbidden-name list (device names must go through labels)",
            )

    def _check_datatype(self, ref: DataTypeRef) -> tuple[str | None, bool]:
        """(fb type name or None, whether the type resolved at all)."""
        base = ref.base.upper()
        if self.profile.is_known_datatype(base):
            return None, True
        if self.profile.fb_entry(base) is not None or base in self.user_fbs:
            if ref.array_bounds:
                self.report(
                    Category.UNKNOWN_DATATYPE, ref.span,
                    f"arrays of function blocks are not supported: {ref.render()}",
                )
                return None, False
            return base, True
        self.report(
            Category.UNKNOWN_DATATYPE, ref.span,
            f"datatype {ref.base!r} is not in the profile vocabulary",
        )
        return None, False

    # -- statements --------------------------------------------------------

    def _check_statement(self, stmt: Statement, ctx: "_BodyContext") -> None:
        if isinstance(stmt, Assignment):
            self._check_assignment(stmt, ctx)
        elif isinstance(stmt, (FbInvocation, CallStatement)):
            self._check_invocation(stmt, ctx)
        elif isinstance(stmt, IfStatement):
            for branch in stmt.branches:
                self._require_bool(branch.cond, ctx, "IF condition")
                self._check_body(branch.body, ctx)
            self._check_body(stmt.else_body, ctx)
        elif isinstance(stmt, CaseStatement):
            sel_type = self._type_of(stmt.selector, ctx)
            if sel_type is not None and not _is_int_like(sel_type):
                self.report(
                    Category.TYPE_MISMATCH, stmt.selector.span,
                    f"CASE selector must be an integer, got {_show(sel_type)}",
                )
            for arm in stmt.arms:
                self._check_body(arm.body, ctx)
            self._check_body(stmt.else_body, ctx)
        elif isinstance(stmt, ForStatement):
            self._check_for(stmt, ctx)
        elif isinstance(stmt, WhileStatement):
            self._require_bool(stmt.cond, ctx, "WHILE condition")
            self._check_body(stmt.body, ctx.in_loop())
        elif isinstance(stmt, RepeatStatement):
            self._check_body(stmt.body, ctx.in_loop())
            self._require_bool(stmt.until_cond, ctx, "UNTIL condition")
        elif isinstance(stmt, ExitStatement):
            if ctx.loop_depth == 0:
                self.report(
                    Category.STRUCTURE_VIOLATION, stmt.span,
                    "EXIT is only allowed inside a loop body",
                )
        elif isinstance(stmt, (ReturnStatement, EmptyStatement)):
            pass
        else:
            raise TypeError(f"unchecked statement {type(stmt).__name__}")

    def _check_body(self, body: list[Statement], ctx: "_BodyContext") -> None:
        for stmt in body:
            self._check_statement(stmt, ctx)

    def _check_assignment(self, stmt: Assignment, ctx: "_BodyContext") -> None:
        target_type = self._type_of_ref(stmt.target, ctx, writing=True)
        value_type = self._type_of(stmt.value, ctx)
        if target_type is None or value_type is None:
            return
        if not _assignable(value_type, target_type):
            self.report(
                Category.TYPE_MISMATCH, stmt.span,
                f"cannot assign {_show(value_type)} to {_show(target_type)}",
            )

    def _check_for(self, stmt: ForStatement, ctx: "_BodyContext") -> None:
        info = self._resolve(stmt.var_name, stmt.span, ctx)
        if info is not None:
            var_type = _declared_type(info.data_type, info.fb_type)
            if not _is_int_like(var_type):
                self.report(
                    Category.TYPE_MISMATCH, stmt.span,
                    f"FOR variable {stmt.var_name!r} must be an integer, got {_show(var_type)}",
                )
        for part, name in ((stmt.start, "start"), (stmt.stop, "end"), (stmt.step, "step")):
            if part is None:
                continue
            part_type = self._type_of(part, ctx)
            if part_type is not None and not _is_int_like(part_type):
                self.report(
                    Category.TYPE_MISMATCH, part.span,
                    f"FOR {name} bound must be an integer, got {_show(part_type)}",
                )
        self._check_body(stmt.body, ctx.in_loop())

    # -- invocations -------------------------------------------------------

    def _check_invocation(self, stmt: FbInvocation | CallStatement,
                          ctx: "_BodyContext") -> None:
        name = stmt.instance if isinstance(stmt, FbInvocation) else stmt.callee
        upper = name.upper()

        if upper in self.profile.disallowed_instructions:
            self.report(
                Category.DISALLOWED_INSTRUCTION, stmt.span,
                f"instruction {name!r} is not available in ST under profile {self.profile.id!r}",
            )
            return

        info = self._lookup(upper, ctx)
        if info is not None and info.fb_type is not None:
            info.invoked = True
            signature = self._signature_for(info.fb_type)
            if signature is not None:
                self._check_call_args(stmt.args, signature, info.name, ctx)
            return
        if info is not None:
            if not info.type_known:
                # The declaration already produced UnknownDatatype; anything
                # layered on top would be noise.
                info.invoked = True
                return
            self.report(
                Category.TYPE_MISMATCH, stmt.span,
                f"{name!r} is a {_show(_declared_type(info.data_type, None))} variable, not a callable instance",
            )
            return

        if upper in self.user_functions:
            signature, _ = self.user_functions[upper]
            self._check_call_args(stmt.args, signature, name, ctx)
            return

        if self.profile.fb_entry(name) is not None or upper in self.user_fbs:
            self.report(
                Category.STRUCTURE_VIOLATION, stmt.span,
                f"function block type {name!r} must be invoked through a declared instance",
            )
            return

        self.report(
            Category.UNDECLARED_VARIABLE, stmt.span,
            f"unknown instruction or undeclared instance {name!r}",
        )

    def _check_call_args(self, args: list[CallArg], signature: FbSignature,
                         instance_name: str, ctx: "_BodyContext") -> None:
        positional_inputs = list(signature.inputs)
        position = 0
        for arg in args:
            if arg.name is None:
                if position >= len(positional_inputs):
                    self.report(
                        Category.TYPE_MISMATCH, arg.span,
                        f"too many positional arguments for {instance_name!r}",
                    )
                    continue
                param_type = positional_inputs[position][1]
                position += 1
                self._check_arg_value(arg, param_type, instance_name, ctx)
            elif arg.direction == "in":
                param_type = signature.input_type(arg.name)
                if param_type is None:
                    self.report(
                        Category.UNDECLARED_VARIABLE, arg.span,
                        f"{instance_name!r} has no input parameter {arg.name!r}",
                    )
                    continue
                self._check_arg_value(arg, param_type, instance_name, ctx)
            else:  # output binding: param => target
                param_type = signature.output_type(arg.name)
                if param_type is None:
                    self.report(
                        Category.UNDECLARED_VARIABLE, arg.span,
                        f"{instance_name!r} has no output parameter {arg.name!r}",
                    )
                    continue
                if not isinstance(arg.value, VariableRef):
                    self.report(
                        Category.TYPE_MISMATCH, arg.span,
                        f"output parameter {arg.name!r} must bind a variable",
                    )
                    continue
                target_type = self._type_of_ref(arg.value, ctx, writing=True)
                if target_type is not None and not _assignable(param_type.upper(), target_type):
                    self.report(
                        Category.TYPE_MISMATCH, arg.span,
                        f"output {arg.name} : {param_type} does not fit {_show(target_type)}",
                    )

    def _check_arg_value(self, arg: CallArg, param_type: str, instance_name: str,
                         ctx: "_BodyContext") -> None:
        value_type = self._type_of(arg.value, ctx)
        if value_type is not None and not _assignable(value_type, param_type.upper()):
            shown = arg.name or "argument"
            self.report(
                Category.TYPE_MISMATCH, arg.span,
                f"{shown} of {instance_name!r} expects {param_type}, got {_show(value_type)}",
            )

    def _signature_for(self, fb_type: str) -> FbSignature | None:
        signature = self.profile.fb_signature(fb_type)
        if signature is not None:
            return signature
        return self.user_fbs.get(fb_type.upper())

    # -- names and expression types ----------------------------------------

    def _lookup(self, upper_name: str, ctx: "_BodyContext") -> _DeclInfo | None:
        if upper_name in ctx.scope:
            return ctx.scope[upper_name]
        if ctx.pou is not None:
            visible = self.labels.scope_names(ctx.pou.name)
            if upper_name in visible:
                label = visible[upper_name]
                fb_type = None
                base = label.data_type.base.upper()
                if (
                    not self.profile.is_known_datatype(base)
                    and (self.profile.fb_entry(base) is not None or base in self.user_fbs)
                ):
                    fb_type = base
                info = _DeclInfo(
                    name=label.name, data_type=label.data_type, block_kind=None,
                    span=label.span, fb_type=fb_type, invoked=True,
                )
                # Cache so repeated use (and FB invocation marking) sticks.
                ctx.scope[upper_name] = info
                return info
        return None

    def _resolve(self, name: str, span: SourceSpan, ctx: "_BodyContext") -> _DeclInfo | None:
        info = self._lookup(name.upper(), ctx)
        if info is None:
            self.report(
                Category.UNDECLARED_VARIABLE, span,
                f"{name!r} is not declared and is not a registered label",
            )
        return info

    def _type_of(self, expr: Expression, ctx: "_BodyContext"):
        if isinstance(expr, Literal):
            return _literal_type(expr)
        if isinstance(expr, VariableRef):
            return self._type_of_ref(expr, ctx, writing=False)
        if isinstance(expr, Unary):
            return self._type_of_unary(expr, ctx)
        if isinstance(expr, Binary):
            return self._type_of_binary(expr, ctx)
        if isinstance(expr, FunctionCall):
            return self._type_of_call(expr, ctx)
        raise TypeError(f"untyped expression {type(expr).__name__}")

    def _type_of_ref(self, ref: VariableRef, ctx: "_BodyContext", *, writing: bool):
        info = self._resolve(ref.name, ref.span, ctx)
        if info is None:
            return None
        if not info.type_known:
            return None
        if writing and info.block_kind is VarBlockKind.VAR_CONSTANT:
            self.report(
                Category.STRUCTURE_VIOLATION, ref.span,
                f"cannot assign to constant {info.name!r}",
            )
        current = _declared_type(info.data_type, info.fb_type)

        if ref.indices:
            if not isinstance(current, _ArrayType):
                self.report(
                    Category.TYPE_MISMATCH, ref.span,
                    f"{ref.name!r} is not an array",
                )
                return None
            if len(ref.indices) != len(current.bounds):
                self.report(
                    Category.TYPE_MISMATCH, ref.span,
                    f"{ref.name!r} expects {len(current.bounds)} indices, got {len(ref.indices)}",
                )
                return None
            for index in ref.indices:
                index_type = self._type_of(index, ctx)
                if index_type is not None and not _is_int_like(index_type):
                    self.report(
                        Category.TYPE_MISMATCH, index.span,
                        f"array index must be an integer, got {_show(index_type)}",
                    )
            current = current.base

        for member in ref.members:
            if not isinstance(current, str) or self._signature_for(current) is None:
                self.report(
                    Category.UNDECLARED_VARIABLE, ref.span,
                    f"{_show(current)} value has no member {member!r}",
                )
                return None
            signature = self._signature_for(current)
            assert signature is not None
            member_type = signature.output_type(member) or signature.input_type(member)
            if member_type is None:
                self.report(
                    Category.UNDECLARED_VARIABLE, ref.span,
                    f"function block {current} has no parameter {member!r}",
                )
                return None
            current = member_type.upper()
        return current

    def _type_of_unary(self, expr: Unary, ctx: "_BodyContext"):
        operand = self._type_of(expr.operand, ctx)
        if operand is None:
            return None
        if expr.op == "NOT":
            if operand != "BOOL":
                self.report(
                    Category.TYPE_MISMATCH, expr.span,
                    f"NOT expects BOOL, got {_show(operand)}",
                )
                return None
            return "BOOL"
        if not _is_numeric(operand):
            self.report(
                Category.TYPE_MISMATCH, expr.span,
                f"unary '-' expects a numeric operand, got {_show(operand)}",
            )
            return None
        return operand

    def _type_of_binary(self, expr: Binary, ctx: "_BodyContext"):
        lhs = self._type_of(expr.lhs, ctx)
        rhs = self._type_of(expr.rhs, ctx)
        if lhs is None or rhs is None:
            return None
        op = expr.op

        def mismatch() -> None:
            self.report(
                Category.TYPE_MISMATCH, expr.span,
                f"operator {op} cannot combine {_show(lhs)} and {_show(rhs)}",
            )

        if op in ("AND", "OR", "XOR"):
            if lhs == "BOOL" and rhs == "BOOL":
                return "BOOL"
            mismatch()
            return None

        if op in ("=", "<>"):
            if _comparable(lhs, rhs):
                return "BOOL"
            mismatch()
            return None

        if op in ("<", "<=", ">", ">="):
            if _comparable(lhs, rhs) and lhs != "BOOL" and rhs != "BOOL":
                return "BOOL"
            mismatch()
            return None

        if op in ("+", "-"):
            if lhs == "TIME" and rhs == "TIME":
                return "TIME"
        if op == "**":
            if (_is_int_like(lhs) or _is_real_like(lhs)) and _is_int_like(rhs):
                return _concrete(lhs)
            mismatch()
            return None
        if op in ("+", "-", "*", "/", "MOD"):
            if _is_int_like(lhs) and _is_int_like(rhs):
                return _join_ints(lhs, rhs)
            if op != "MOD" and _is_real_like(lhs) and _is_real_like(rhs):
                return _join_reals(lhs, rhs)
            mismatch()
            return None

        raise TypeError(f"untyped operator {op}")

    def _type_of_call(self, expr: FunctionCall, ctx: "_BodyContext"):
        upper = expr.callee.upper()
        if upper in self.profile.disallowed_instructions:
            self.report(
                Category.DISALLOWED_INSTRUCTION, expr.span,
                f"instruction {expr.callee!r} is not available in ST under profile {self.profile.id!r}",
            )
            return None
        if upper in self.user_functions:
            signature, return_type = self.user_functions[upper]
            self._check_call_args(expr.args, signature, expr.callee, ctx)
            return return_type
        info = self._lookup(upper, ctx)
        if info is not None and info.fb_type is not None:
            self.report(
                Category.STRUCTURE_VIOLATION, expr.span,
                f"function block instance {expr.callee!r} cannot be invoked inside an expression",
            )
            return None
        if info is not None:
            if not info.type_known:
                return None
            self.report(
                Category.TYPE_MISMATCH, expr.span,
                f"{expr.callee!r} is a variable, not a function",
            )
            return None
        if self.profile.fb_entry(expr.callee) is not None or upper in self.user_fbs:
            # FB type used as a value-returning call: not expressible here.
            self.report(
                Category.STRUCTURE_VIOLATION, expr.span,
                f"function block type {expr.callee!r} must be invoked through a declared instance",
            )
            return None
        self.report(
            Category.UNDECLARED_VARIABLE, expr.span,
            f"unknown function {expr.callee!r}",
        )
        return None

    def _require_bool(self, expr: Expression, ctx: "_BodyContext", what: str) -> None:
        expr_type = self._type_of(expr, ctx)
        if expr_type is not None and expr_type != "BOOL":
            self.report(
                Category.TYPE_MISMATCH, expr.span,
                f"{what} must be BOOL, got {_show(expr_type)}",
            )


@dataclass
class _BodyContext:
    pou: Pou | None
    scope: dict[str, _DeclInfo]
    loop_depth: int

    def in_loop(self) -> "_BodyContext":
        return _BodyContext(self.pou, self.scope, self.loop_depth + 1)


# -- type algebra ------------------------------------------------------------

def _interface_signature(pou: Pou) -> FbSignature:
    inputs: list[tuple[str, str]] = []
    outputs: list[tuple[str, str]] = []
    for block in pou.var_blocks:
        if block.kind is VarBlockKind.VAR_INPUT:
            inputs.extend((d.name, d.data_type.base.upper()) for d in block.decls)
        elif block.kind is VarBlockKind.VAR_OUTPUT:
            outputs.extend((d.name, d.data_type.base.upper()) for d in block.decls)
    return FbSignature(tuple(inputs), tuple(outputs))


def _declared_type(ref: DataTypeRef, fb_type: str | None):
    if fb_type is not None:
        return fb_type
    if ref.array_bounds:
        return _ArrayType(ref.base.upper(), tuple(ref.array_bounds))
    return ref.base.upper()


def _literal_type(literal: Literal):
    return {
        LiteralKind.INT: _INT_LITERAL,
        LiteralKind.REAL: _REAL_LITERAL,
        LiteralKind.TIME: "TIME",
        LiteralKind.STRING: "STRING",
        LiteralKind.BOOL: "BOOL",
    }[literal.kind]


def _is_int_like(t) -> bool:
    return t in _INT_TYPES or t == _INT_LITERAL


def _is_real_like(t) -> bool:
    return t in _REAL_TYPES or t == _REAL_LITERAL


def _is_numeric(t) -> bool:
    return _is_int_like(t) or _is_real_like(t)


def _concrete(t) -> str:
    if t == _INT_LITERAL:
        return "INT"
    if t == _REAL_LITERAL:
        return "REAL"
    return t


def _join_ints(lhs, rhs) -> str:
    if lhs == _INT_LITERAL and rhs == _INT_LITERAL:
        return _INT_LITERAL
    return "DINT" if "DINT" in (lhs, rhs) else "INT"


def _join_reals(lhs, rhs) -> str:
    if lhs == _REAL_LITERAL and rhs == _REAL_LITERAL:
        return _REAL_LITERAL
    return "LREAL" if "LREAL" in (lhs, rhs) else "REAL"


def _assignable(src, dst) -> bool:
    """Compatibility table: exact match, INT->DINT and REAL->LREAL widening,
    literals into their family (integer literals also fit bit-string types)."""
    if isinstance(src, _ArrayType) or isinstance(dst, _ArrayType):
        return src == dst
    if src == dst:
        return True
    if (src, dst) in _WIDENINGS:
        return True
    if src == _INT_LITERAL:
        return dst in _INT_TYPES or dst in _BIT_TYPES
    if src == _REAL_LITERAL:
        return dst in _REAL_TYPES
    return False


def _comparable(lhs, rhs) -> bool:
    if isinstance(lhs, _ArrayType) or isinstance(rhs, _ArrayType):
        return False
    if _is_int_like(lhs) and _is_int_like(rhs):
        return True
    if _is_real_like(lhs) and _is_real_like(rhs):
        return True
    if _is_int_like(lhs) and rhs in _BIT_TYPES or lhs in _BIT_TYPES and _is_int_like(rhs):
        return lhs == _INT_LITERAL or rhs == _INT_LITERAL or lhs == rhs
    return lhs == rhs


def _show(t) -> str:
    if t is None:
        return "<unknown>"
    return str(t)
