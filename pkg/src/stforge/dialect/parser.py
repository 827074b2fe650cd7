"""Recursive-descent parser with skip-to-END_* error recovery.

The parser keeps going after a syntax error: the offending region is skipped
up to the next ``END_*`` keyword and parsing resumes, so a single run can
report every syntax problem in a file.  ``parse`` raises when any issue was
recorded; ``Parser.run`` returns the partial tree plus the issue list for
callers (the compile service) that surface syntax errors as diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lexer import Token, TokenKind, tokenize
from .nodes import (
    Assignment, Binary, CallArg, CallStatement, CaseArm, CaseRange,
    CaseStatement, CompilationUnit, DataTypeRef, EmptyStatement, ExitStatement,
    Expression, FbInvocation, ForStatement, FunctionCall, IfBranch,
    IfStatement, Literal, LiteralKind, Pou, PouKind, RepeatStatement,
    ReturnStatement, Statement, Unary, VarBlock, VarBlockKind, VarDecl,
    VariableRef, WhileStatement,
)
from .spans import SourceSpan

_POU_OPENERS = {
    "PROGRAM": PouKind.PROGRAM,
    "FUNCTION": PouKind.FUNCTION,
    "FUNCTION_BLOCK": PouKind.FUNCTION_BLOCK,
}
_POU_CLOSERS = {
    PouKind.PROGRAM: "END_PROGRAM",
    PouKind.FUNCTION: "END_FUNCTION",
    PouKind.FUNCTION_BLOCK: "END_FUNCTION_BLOCK",
}
_VAR_OPENERS = {
    "VAR": VarBlockKind.VAR,
    "VAR_INPUT": VarBlockKind.VAR_INPUT,
    "VAR_OUTPUT": VarBlockKind.VAR_OUTPUT,
    "VAR_IN_OUT": VarBlockKind.VAR_IN_OUT,
    "VAR_EXTERNAL": VarBlockKind.VAR_EXTERNAL,
    "VAR_CONSTANT": VarBlockKind.VAR_CONSTANT,
}
_END_KEYWORDS = frozenset({
    "END_PROGRAM", "END_FUNCTION", "END_FUNCTION_BLOCK", "END_VAR",
    "END_IF", "END_CASE", "END_FOR", "END_WHILE", "END_REPEAT",
})

_TIME_MS = {"ms": 1.0, "s": 1000.0, "m": 60_000.0, "h": 3_600_000.0}


@dataclass(frozen=True)
class ParseIssue:
    """One recovered syntax error."""

    span: SourceSpan
    expected: frozenset[str]
    found: str
    message: str


class ParseFailure(Exception):
    """Raised by :func:`parse` when the token stream had syntax errors."""

    def __init__(self, issues: list[ParseIssue], unit: CompilationUnit) -> None:
        first = issues[0]
        super().__init__(f"{len(issues)} syntax error(s); first: {first.message} at {first.span}")
        self.issues = issues
        self.unit = unit


class _SyntaxError(Exception):
    def __init__(self, issue: ParseIssue) -> None:
        super().__init__(issue.message)
        self.issue = issue


class Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.trivia = [t for t in tokens if t.kind is TokenKind.COMMENT]
        self.tokens = [t for t in tokens if t.kind is not TokenKind.COMMENT]
        self.pos = 0
        self.issues: list[ParseIssue] = []

    # -- token plumbing ------------------------------------------------

    def _peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def _eof(self) -> bool:
        return self.pos >= len(self.tokens)

    def _here(self) -> SourceSpan:
        tok = self._peek()
        if tok is not None:
            return tok.span
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan.point(last.end_line, last.end_col)
        return SourceSpan.point(1, 1)

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _error(self, expected: set[str]) -> _SyntaxError:
        tok = self._peek()
        found = repr(tok) if tok is not None else "end of input"
        wanted = ", ".join(sorted(expected))
        return _SyntaxError(ParseIssue(
            span=self._here(),
            expected=frozenset(expected),
            found=found,
            message=f"expected {wanted}, found {found}",
        ))

    def _expect_keyword(self, word: str) -> Token:
        tok = self._peek()
        if tok is not None and tok.is_keyword(word):
            return self._advance()
        raise self._error({word})

    def _expect_punct(self, text: str) -> Token:
        tok = self._peek()
        if tok is not None and tok.kind in (TokenKind.PUNCTUATION, TokenKind.OPERATOR) and tok.text == text:
            return self._advance()
        raise self._error({f"'{text}'"})

    def _expect_identifier(self, what: str = "identifier") -> Token:
        tok = self._peek()
        if tok is not None and tok.kind is TokenKind.IDENTIFIER:
            return self._advance()
        raise self._error({what})

    def _at_punct(self, text: str) -> bool:
        tok = self._peek()
        return (
            tok is not None
            and tok.kind in (TokenKind.PUNCTUATION, TokenKind.OPERATOR)
            and tok.text == text
        )

    def _at_keyword(self, *words: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind is TokenKind.KEYWORD and tok.upper in words

    def _eat_punct(self, text: str) -> bool:
        if self._at_punct(text):
            self._advance()
            return True
        return False

    # -- error recovery ------------------------------------------------

    def _sync(self, stop: set[str]) -> None:
        """Skip forward to the next END_* keyword, then resume parsing.

        Stop keywords stay in place for the caller to consume; a foreign
        END_* (the closer of whatever construct just broke) is swallowed
        together with its trailing semicolon.
        """
        while not self._eof():
            tok = self._peek()
            assert tok is not None
            if tok.kind is TokenKind.KEYWORD:
                if tok.upper in stop:
                    return
                if tok.upper in _END_KEYWORDS:
                    self._advance()
                    self._eat_punct(";")
                    return
            self._advance()

    # -- toplevel --------------------------------------------------------

    def run(self) -> CompilationUnit:
        pous: list[Pou] = []
        while not self._eof():
            try:
                pous.append(self._parse_pou())
            except _SyntaxError as exc:
                self.issues.append(exc.issue)
                # Resume at the next POU opener.
                while not self._eof():
                    tok = self._peek()
                    assert tok is not None
                    if tok.kind is TokenKind.KEYWORD and tok.upper in _POU_OPENERS:
                        break
                    self._advance()
        span = SourceSpan.point(1, 1)
        if pous:
            span = pous[0].span.merge(pous[-1].span)
        return CompilationUnit(pous=pous, trivia=self.trivia, span=span)

    def _parse_pou(self) -> Pou:
        tok = self._peek()
        if tok is None or tok.kind is not TokenKind.KEYWORD or tok.upper not in _POU_OPENERS:
            raise self._error(set(_POU_OPENERS))
        opener = self._advance()
        kind = _POU_OPENERS[opener.upper]
        name = self._expect_identifier("POU name")

        return_type: DataTypeRef | None = None
        if kind is PouKind.FUNCTION:
            self._expect_punct(":")
            return_type = self._parse_data_type()

        var_blocks: list[VarBlock] = []
        while self._at_keyword(*_VAR_OPENERS):
            var_blocks.append(self._parse_var_block())

        closer = _POU_CLOSERS[kind]
        body = self._parse_statements(stop={closer})
        end = self._expect_keyword(closer)
        self._eat_punct(";")
        return Pou(kind, name.text, return_type, var_blocks, body, opener.span.merge(end.span))

    def _parse_var_block(self) -> VarBlock:
        opener = self._advance()
        kind = _VAR_OPENERS[opener.upper]
        if kind is VarBlockKind.VAR and self._at_keyword("CONSTANT"):
            self._advance()
            kind = VarBlockKind.VAR_CONSTANT

        decls: list[VarDecl] = []
        while not self._at_keyword("END_VAR"):
            if self._eof():
                raise self._error({"END_VAR"})
            try:
                decls.extend(self._parse_decl_line())
            except _SyntaxError as exc:
                self.issues.append(exc.issue)
                self._sync({"END_VAR"})
        end = self._expect_keyword("END_VAR")
        if not decls:
            raise _SyntaxError(ParseIssue(
                span=opener.span.merge(end.span),
                expected=frozenset({"variable declaration"}),
                found=repr(end),
                message="empty variable block",
            ))
        return VarBlock(kind, decls, opener.span.merge(end.span))

    def _parse_decl_line(self) -> list[VarDecl]:
        names = [self._expect_identifier("variable name")]
        while self._eat_punct(","):
            names.append(self._expect_identifier("variable name"))
        self._expect_punct(":")
        data_type = self._parse_data_type()
        initializer = None
        if self._at_punct(":="):
            self._advance()
            initializer = self._parse_expression()
        semi = self._expect_punct(";")
        return [
            VarDecl(tok.text, data_type, initializer, tok.span.merge(semi.span))
            for tok in names
        ]

    def _parse_data_type(self) -> DataTypeRef:
        if self._at_keyword("ARRAY"):
            opener = self._advance()
            self._expect_punct("[")
            bounds = [self._parse_bound_pair()]
            while self._eat_punct(","):
                bounds.append(self._parse_bound_pair())
            self._expect_punct("]")
            self._expect_keyword("OF")
            base = self._expect_identifier("element type")
            ref = DataTypeRef(base.text, bounds, opener.span.merge(base.span))
            return ref
        tok = self._expect_identifier("type name")
        return DataTypeRef(tok.text, None, tok.span)

    def _parse_bound_pair(self) -> tuple[int, int]:
        low = self._parse_signed_int()
        self._expect_punct("..")
        high = self._parse_signed_int()
        if low > high:
            raise _SyntaxError(ParseIssue(
                span=self._here(),
                expected=frozenset({"low <= high"}),
                found=f"{low}..{high}",
                message=f"inverted array bound {low}..{high}",
            ))
        return (low, high)

    def _parse_signed_int(self) -> int:
        negative = False
        if self._at_punct("-"):
            self._advance()
            negative = True
        tok = self._peek()
        if tok is None or tok.kind is not TokenKind.INT_LITERAL:
            raise self._error({"integer literal"})
        self._advance()
        value = _int_value(tok.text)
        return -value if negative else value

    # -- statements ------------------------------------------------------

    def _parse_statements(self, stop: set[str]) -> list[Statement]:
        body: list[Statement] = []
        while not self._eof() and not self._at_keyword(*stop):
            try:
                body.append(self._parse_statement())
            except _SyntaxError as exc:
                self.issues.append(exc.issue)
                self._sync(stop)
        return body

    def _parse_statement(self) -> Statement:
        tok = self._peek()
        assert tok is not None
        if tok.kind is TokenKind.KEYWORD:
            word = tok.upper
            if word == "IF":
                return self._parse_if()
            if word == "CASE":
                return self._parse_case()
            if word == "FOR":
                return self._parse_for()
            if word == "WHILE":
                return self._parse_while()
            if word == "REPEAT":
                return self._parse_repeat()
            if word == "EXIT":
                self._advance()
                semi = self._expect_punct(";")
                return ExitStatement(tok.span.merge(semi.span))
            if word == "RETURN":
                self._advance()
                semi = self._expect_punct(";")
                return ReturnStatement(tok.span.merge(semi.span))
            raise self._error({"statement"})
        if self._at_punct(";"):
            semi = self._advance()
            return EmptyStatement(semi.span)
        if tok.kind is TokenKind.IDENTIFIER:
            return self._parse_assignment_or_call()
        raise self._error({"statement"})

    def _parse_assignment_or_call(self) -> Statement:
        name = self._advance()

        if self._at_punct("("):
            args = self._parse_call_args()
            semi = self._expect_punct(";")
            span = name.span.merge(semi.span)
            # Named parameter bindings signal an FB instance invocation;
            # purely positional calls are function-style instructions.
            if any(arg.name is not None for arg in args):
                return FbInvocation(name.text, args, span)
            return CallStatement(name.text, args, span)

        target = self._parse_ref_suffix(name)
        self._expect_punct(":=")
        value = self._parse_expression()
        semi = self._expect_punct(";")
        return Assignment(target, value, name.span.merge(semi.span))

    def _parse_call_args(self) -> list[CallArg]:
        self._expect_punct("(")
        args: list[CallArg] = []
        if not self._at_punct(")"):
            args.append(self._parse_call_arg())
            while self._eat_punct(","):
                args.append(self._parse_call_arg())
        self._expect_punct(")")
        seen: set[str] = set()
        for arg in args:
            if arg.name is not None:
                key = arg.name.upper()
                if key in seen:
                    raise _SyntaxError(ParseIssue(
                        span=arg.span,
                        expected=frozenset({"unique parameter name"}),
                        found=arg.name,
                        message=f"duplicate parameter {arg.name!r} in call",
                    ))
                seen.add(key)
        return args

    def _parse_call_arg(self) -> CallArg:
        tok = self._peek()
        nxt = self._peek(1)
        if (
            tok is not None and tok.kind is TokenKind.IDENTIFIER
            and nxt is not None and nxt.text in (":=", "=>")
        ):
            self._advance()
            op = self._advance()
            value = self._parse_expression()
            direction = "in" if op.text == ":=" else "out"
            return CallArg(tok.text, direction, value, tok.span.merge(_expr_span(value)))
        value = self._parse_expression()
        return CallArg(None, "in", value, _expr_span(value))

    def _parse_if(self) -> IfStatement:
        opener = self._expect_keyword("IF")
        branches: list[IfBranch] = []
        cond = self._parse_expression()
        self._expect_keyword("THEN")
        body = self._parse_statements(stop={"ELSIF", "ELSE", "END_IF"})
        branches.append(IfBranch(cond, body, opener.span.merge(self._here())))
        else_body: list[Statement] = []
        while self._at_keyword("ELSIF"):
            kw = self._advance()
            cond = self._parse_expression()
            self._expect_keyword("THEN")
            body = self._parse_statements(stop={"ELSIF", "ELSE", "END_IF"})
            branches.append(IfBranch(cond, body, kw.span.merge(self._here())))
        if self._at_keyword("ELSE"):
            self._advance()
            else_body = self._parse_statements(stop={"END_IF"})
        end = self._expect_keyword("END_IF")
        self._eat_punct(";")
        return IfStatement(branches, else_body, opener.span.merge(end.span))

    def _parse_case(self) -> CaseStatement:
        opener = self._expect_keyword("CASE")
        selector = self._parse_expression()
        self._expect_keyword("OF")
        arms: list[CaseArm] = []
        else_body: list[Statement] = []
        while not self._at_keyword("ELSE", "END_CASE"):
            if self._eof():
                raise self._error({"END_CASE"})
            arms.append(self._parse_case_arm())
        if self._at_keyword("ELSE"):
            self._advance()
            else_body = self._parse_statements(stop={"END_CASE"})
        end = self._expect_keyword("END_CASE")
        self._eat_punct(";")
        return CaseStatement(selector, arms, else_body, opener.span.merge(end.span))

    def _parse_case_arm(self) -> CaseArm:
        labels = [self._parse_case_label()]
        while self._eat_punct(","):
            labels.append(self._parse_case_label())
        self._expect_punct(":")
        body: list[Statement] = []
        while not self._eof() and not self._at_keyword("ELSE", "END_CASE") and not self._at_case_label():
            try:
                body.append(self._parse_statement())
            except _SyntaxError as exc:
                self.issues.append(exc.issue)
                self._sync({"END_CASE", "ELSE"})
        first = labels[0]
        span = first.span.merge(self._here())
        return CaseArm(labels, body, span)

    def _at_case_label(self) -> bool:
        tok = self._peek()
        if tok is None:
            return False
        if tok.kind is TokenKind.INT_LITERAL:
            return True
        nxt = self._peek(1)
        return tok.text == "-" and nxt is not None and nxt.kind is TokenKind.INT_LITERAL

    def _parse_case_label(self) -> Literal | CaseRange:
        low = self._parse_int_literal()
        if self._at_punct(".."):
            self._advance()
            high = self._parse_int_literal()
            if int(low.value) > int(high.value):  # type: ignore[arg-type]
                raise _SyntaxError(ParseIssue(
                    span=low.span.merge(high.span),
                    expected=frozenset({"low <= high"}),
                    found=f"{low.text}..{high.text}",
                    message="inverted case range",
                ))
            return CaseRange(low, high, low.span.merge(high.span))
        return low

    def _parse_int_literal(self) -> Literal:
        negative = None
        if self._at_punct("-"):
            negative = self._advance()
        tok = self._peek()
        if tok is None or tok.kind is not TokenKind.INT_LITERAL:
            raise self._error({"integer literal"})
        self._advance()
        value = _int_value(tok.text)
        if negative is not None:
            return Literal(LiteralKind.INT, f"-{tok.text}", -value, negative.span.merge(tok.span))
        return Literal(LiteralKind.INT, tok.text, value, tok.span)

    def _parse_for(self) -> ForStatement:
        opener = self._expect_keyword("FOR")
        var = self._expect_identifier("loop variable")
        self._expect_punct(":=")
        start = self._parse_expression()
        self._expect_keyword("TO")
        stop_expr = self._parse_expression()
        step = None
        if self._at_keyword("BY"):
            self._advance()
            step = self._parse_expression()
        self._expect_keyword("DO")
        body = self._parse_statements(stop={"END_FOR"})
        end = self._expect_keyword("END_FOR")
        self._eat_punct(";")
        return ForStatement(var.text, start, stop_expr, step, body, opener.span.merge(end.span))

    def _parse_while(self) -> WhileStatement:
        opener = self._expect_keyword("WHILE")
        cond = self._parse_expression()
        self._expect_keyword("DO")
        body = self._parse_statements(stop={"END_WHILE"})
        end = self._expect_keyword("END_WHILE")
        self._eat_punct(";")
        return WhileStatement(cond, body, opener.span.merge(end.span))

    def _parse_repeat(self) -> RepeatStatement:
        opener = self._expect_keyword("REPEAT")
        body = self._parse_statements(stop={"UNTIL"})
        self._expect_keyword("UNTIL")
        cond = self._parse_expression()
        end = self._expect_keyword("END_REPEAT")
        self._eat_punct(";")
        return RepeatStatement(body, cond, opener.span.merge(end.span))

    # -- expressions -----------------------------------------------------

    def _parse_expression(self) -> Expression:
        return self._parse_or()

    def _parse_binary_level(self, operand, ops: tuple[str, ...], keyword: bool = False):
        lhs = operand()
        while True:
            tok = self._peek()
            if tok is None:
                return lhs
            if keyword:
                if tok.kind is not TokenKind.KEYWORD or tok.upper not in ops:
                    return lhs
                op = tok.upper
            else:
                if tok.kind is not TokenKind.OPERATOR or tok.text not in ops:
                    return lhs
                op = tok.text
            self._advance()
            rhs = operand()
            lhs = Binary(op, lhs, rhs, _expr_span(lhs).merge(_expr_span(rhs)))

    def _parse_or(self) -> Expression:
        return self._parse_binary_level(self._parse_xor, ("OR",), keyword=True)

    def _parse_xor(self) -> Expression:
        return self._parse_binary_level(self._parse_and, ("XOR",), keyword=True)

    def _parse_and(self) -> Expression:
        return self._parse_binary_level(self._parse_equality, ("AND",), keyword=True)

    def _parse_equality(self) -> Expression:
        return self._parse_binary_level(self._parse_relational, ("=", "<>"))

    def _parse_relational(self) -> Expression:
        return self._parse_binary_level(self._parse_additive, ("<", "<=", ">", ">="))

    def _parse_additive(self) -> Expression:
        return self._parse_binary_level(self._parse_multiplicative, ("+", "-"))

    def _parse_multiplicative(self) -> Expression:
        lhs = self._parse_power()
        while True:
            tok = self._peek()
            if tok is None:
                return lhs
            if tok.kind is TokenKind.OPERATOR and tok.text in ("*", "/"):
                op = tok.text
            elif tok.kind is TokenKind.KEYWORD and tok.upper == "MOD":
                op = "MOD"
            else:
                return lhs
            self._advance()
            rhs = self._parse_power()
            lhs = Binary(op, lhs, rhs, _expr_span(lhs).merge(_expr_span(rhs)))

    def _parse_power(self) -> Expression:
        base = self._parse_unary()
        if self._at_punct("**"):
            self._advance()
            exponent = self._parse_power()  # right-associative
            return Binary("**", base, exponent, _expr_span(base).merge(_expr_span(exponent)))
        return base

    def _parse_unary(self) -> Expression:
        tok = self._peek()
        if tok is not None and tok.kind is TokenKind.KEYWORD and tok.upper == "NOT":
            self._advance()
            operand = self._parse_unary()
            return Unary("NOT", operand, tok.span.merge(_expr_span(operand)))
        if tok is not None and tok.kind is TokenKind.OPERATOR and tok.text in ("-", "+"):
            self._advance()
            operand = self._parse_unary()
            if tok.text == "+":
                return operand
            return Unary("-", operand, tok.span.merge(_expr_span(operand)))
        return self._parse_primary()

    def _parse_primary(self) -> Expression:
        tok = self._peek()
        if tok is None:
            raise self._error({"expression"})

        if tok.kind is TokenKind.INT_LITERAL:
            self._advance()
            return Literal(LiteralKind.INT, tok.text, _int_value(tok.text), tok.span)
        if tok.kind is TokenKind.REAL_LITERAL:
            self._advance()
            return Literal(LiteralKind.REAL, tok.text, float(tok.text), tok.span)
        if tok.kind is TokenKind.BOOL_LITERAL:
            self._advance()
            return Literal(LiteralKind.BOOL, tok.text, tok.upper == "TRUE", tok.span)
        if tok.kind is TokenKind.TIME_LITERAL:
            self._advance()
            return Literal(LiteralKind.TIME, tok.text, time_value_ms(tok.text), tok.span)
        if tok.kind is TokenKind.STRING_LITERAL:
            self._advance()
            return Literal(LiteralKind.STRING, tok.text, _string_value(tok.text), tok.span)

        if self._at_punct("("):
            self._advance()
            inner = self._parse_expression()
            self._expect_punct(")")
            return inner

        if tok.kind is TokenKind.IDENTIFIER:
            name = self._advance()
            if self._at_punct("("):
                args = self._parse_call_args()
                return FunctionCall(name.text, args, name.span.merge(self._here()))
            return self._parse_ref_suffix(name)

        raise self._error({"expression"})

    def _parse_ref_suffix(self, name: Token) -> VariableRef:
        indices: list[Expression] = []
        end_span = name.span
        if self._at_punct("["):
            self._advance()
            indices.append(self._parse_expression())
            while self._eat_punct(","):
                indices.append(self._parse_expression())
            end_span = self._expect_punct("]").span
        members: list[str] = []
        while self._at_punct("."):
            self._advance()
            member = self._expect_identifier("member name")
            members.append(member.text)
            end_span = member.span
        return VariableRef(name.text, indices, members, name.span.merge(end_span))


# -- literal values -----------------------------------------------------

def _int_value(text: str) -> int:
    if "#" in text:
        base_text, digits = text.split("#", 1)
        return int(digits.replace("_", ""), int(base_text))
    return int(text)


def time_value_ms(text: str) -> float:
    """Milliseconds represented by a T#/TIME# literal."""
    body = text.split("#", 1)[1].lower()
    # 'ms' before 'm'/'s' so the two-letter unit wins.
    components = re.findall(r"(\d+(?:\.\d+)?)(ms|s|m|h)", body)
    return sum(float(num) * _TIME_MS[unit] for num, unit in components)


def _string_value(text: str) -> str:
    body = text[1:-1]
    return body.replace("$$", "$").replace("$'", "'")


def _expr_span(expr: Expression) -> SourceSpan:
    return expr.span


def parse(tokens: list[Token]) -> CompilationUnit:
    """Parse a token stream; raises :class:`ParseFailure` on syntax errors."""
    parser = Parser(tokens)
    unit = parser.run()
    if parser.issues:
        raise ParseFailure(parser.issues, unit)
    return unit


def parse_source(source: str) -> CompilationUnit:
    """Tokenize and parse in one step."""
    return parse(tokenize(source))


def try_parse_source(source: str) -> tuple[CompilationUnit, list[ParseIssue]]:
    """Best-effort parse returning the partial unit and all recovered issues."""
    parser = Parser(tokenize(source))
    unit = parser.run()
    return unit, parser.issues
