"""Tokenizer for the supported ST dialect subset.

Lexing is lossless: every token records the exact source slice it covers
plus its character offsets, so token texts joined with the intervening
whitespace reconstruct the input byte for byte.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .spans import SourceSpan

# Grammar keywords.  Matched case-insensitively; reserved words that are not
# part of the grammar (vendor blacklists) stay ordinary identifiers and are
# handled by the validator instead.
KEYWORDS = frozenset({
    "PROGRAM", "END_PROGRAM",
    "FUNCTION", "END_FUNCTION",
    "FUNCTION_BLOCK", "END_FUNCTION_BLOCK",
    "VAR", "VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR_EXTERNAL",
    "VAR_CONSTANT", "CONSTANT", "END_VAR",
    "IF", "THEN", "ELSIF", "ELSE", "END_IF",
    "CASE", "OF", "END_CASE",
    "FOR", "TO", "BY", "DO", "END_FOR",
    "WHILE", "END_WHILE",
    "REPEAT", "UNTIL", "END_REPEAT",
    "EXIT", "RETURN",
    "ARRAY",
    "AND", "OR", "XOR", "NOT", "MOD",
})

BOOL_LITERALS = frozenset({"TRUE", "FALSE"})

# Longest first so ':=' wins over ':' and '**' over '*'.
_OPERATORS = (":=", "=>", "**", "<=", ">=", "<>", "=", "<", ">", "+", "-", "*", "/")
_PUNCTUATION = ("..", "(", ")", "[", "]", ",", ";", ":", ".")

_TIME_UNITS = ("ms", "s", "m", "h")


class TokenKind(enum.Enum):
    IDENTIFIER = "Identifier"
    KEYWORD = "Keyword"
    INT_LITERAL = "IntLiteral"
    REAL_LITERAL = "RealLiteral"
    TIME_LITERAL = "TimeLiteral"
    STRING_LITERAL = "StringLiteral"
    BOOL_LITERAL = "BoolLiteral"
    OPERATOR = "Operator"
    PUNCTUATION = "Punctuation"
    COMMENT = "Comment"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan
    offset: int
    end_offset: int

    @property
    def upper(self) -> str:
        return self.text.upper()

    def is_keyword(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.upper == word

    def __repr__(self) -> str:  # short form for parser error messages
        return f"{self.kind.value}({self.text!r})"


class LexError(Exception):
    """Base class for tokenizer failures; carries the offending span."""

    def __init__(self, message: str, span: SourceSpan) -> None:
        super().__init__(f"{message} at {span}")
        self.message = message
        self.span = span


class UnterminatedString(LexError):
    pass


class UnterminatedComment(LexError):
    pass


class IllegalCharacter(LexError):
    pass


class _Cursor:
    __slots__ = ("source", "pos", "line", "col")

    def __init__(self, source: str) -> None:
        self.source = source
        self.pos = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.pos >= len(self.source)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.source[i] if i < len(self.source) else ""

    def advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.eof():
                return
            if self.source[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def mark(self) -> tuple[int, int, int]:
        return self.pos, self.line, self.col

    def span_from(self, mark: tuple[int, int, int]) -> SourceSpan:
        return SourceSpan(mark[1], mark[2], self.line, self.col)


def tokenize(source: str) -> list[Token]:
    """Produce the full token stream for ``source``, including comments.

    Raises :class:`UnterminatedString`, :class:`UnterminatedComment`, or
    :class:`IllegalCharacter` on malformed input.
    """
    cur = _Cursor(source)
    tokens: list[Token] = []

    def emit(kind: TokenKind, mark: tuple[int, int, int]) -> None:
        start = mark[0]
        tokens.append(Token(kind, source[start:cur.pos], cur.span_from(mark), start, cur.pos))

    while not cur.eof():
        ch = cur.peek()

        if ch in " \t\r\n":
            cur.advance()
            continue

        mark = cur.mark()

        # Comments: '(* ... *)' (single level) and '// ...' to end of line.
        if ch == "(" and cur.peek(1) == "*":
            cur.advance(2)
            while not (cur.peek() == "*" and cur.peek(1) == ")"):
                if cur.eof():
                    raise UnterminatedComment("unterminated block comment", cur.span_from(mark))
                cur.advance()
            cur.advance(2)
            emit(TokenKind.COMMENT, mark)
            continue
        if ch == "/" and cur.peek(1) == "/":
            while not cur.eof() and cur.peek() != "\n":
                cur.advance()
            emit(TokenKind.COMMENT, mark)
            continue

        if ch == "'":
            _scan_string(cur, mark)
            emit(TokenKind.STRING_LITERAL, mark)
            continue

        if ch.isdigit():
            kind = _scan_number(cur, mark)
            emit(kind, mark)
            continue

        if ch.isalpha() or ch == "_":
            kind = _scan_word(cur, mark)
            emit(kind, mark)
            continue

        matched = False
        for op in _OPERATORS:
            if source.startswith(op, cur.pos):
                cur.advance(len(op))
                emit(TokenKind.OPERATOR, mark)
                matched = True
                break
        if matched:
            continue
        for punct in _PUNCTUATION:
            if source.startswith(punct, cur.pos):
                cur.advance(len(punct))
                emit(TokenKind.PUNCTUATION, mark)
                matched = True
                break
        if matched:
            continue

        cur.advance()
        raise IllegalCharacter(f"illegal character {ch!r}", cur.span_from(mark))

    return tokens


def _scan_string(cur: _Cursor, mark: tuple[int, int, int]) -> None:
    cur.advance()  # opening quote
    while True:
        ch = cur.peek()
        if cur.eof() or ch == "\n":
            raise UnterminatedString("unterminated string literal", cur.span_from(mark))
        if ch == "$":
            # '$$' and "$'" escapes; anything else after '$' passes through.
            cur.advance(2 if cur.peek(1) in ("$", "'") else 1)
            continue
        if ch == "'":
            cur.advance()
            return
        cur.advance()


def _scan_number(cur: _Cursor, mark: tuple[int, int, int]) -> TokenKind:
    while cur.peek().isdigit():
        cur.advance()

    # Based literals: 2#1010, 8#17, 16#FF.
    if cur.peek() == "#":
        base_text = cur.source[mark[0]:cur.pos]
        if base_text in ("2", "8", "16"):
            cur.advance()
            digits = 0
            while cur.peek().isalnum() or cur.peek() == "_":
                cur.advance()
                digits += 1
            span = cur.span_from(mark)
            try:
                int(cur.source[mark[0] + len(base_text) + 1:cur.pos].replace("_", ""), int(base_text))
            except ValueError:
                digits = 0
            if digits == 0:
                raise IllegalCharacter("malformed based literal", span)
            return TokenKind.INT_LITERAL
        raise IllegalCharacter(f"unsupported literal base {base_text!r}", cur.span_from(mark))

    # Real literal: '.' must be followed by a digit ('1..5' stays two ints).
    is_real = False
    if cur.peek() == "." and cur.peek(1).isdigit():
        is_real = True
        cur.advance()
        while cur.peek().isdigit():
            cur.advance()
    if cur.peek() in ("e", "E") and (cur.peek(1).isdigit() or (cur.peek(1) in "+-" and cur.peek(2).isdigit())):
        is_real = True
        cur.advance()
        if cur.peek() in "+-":
            cur.advance()
        while cur.peek().isdigit():
            cur.advance()
    return TokenKind.REAL_LITERAL if is_real else TokenKind.INT_LITERAL


def _scan_word(cur: _Cursor, mark: tuple[int, int, int]) -> TokenKind:
    while cur.peek().isalnum() or cur.peek() == "_":
        cur.advance()
    word = cur.source[mark[0]:cur.pos].upper()

    # TIME literals: T#5s, TIME#1h30m, T#100ms.
    if word in ("T", "TIME") and cur.peek() == "#":
        cur.advance()
        _scan_time_body(cur, mark)
        return TokenKind.TIME_LITERAL

    if word in BOOL_LITERALS:
        return TokenKind.BOOL_LITERAL
    if word in KEYWORDS:
        return TokenKind.KEYWORD
    return TokenKind.IDENTIFIER


def _scan_time_body(cur: _Cursor, mark: tuple[int, int, int]) -> None:
    """Components: decimal number + unit (ms|s|m|h), at least one."""
    components = 0
    while True:
        if not cur.peek().isdigit():
            break
        while cur.peek().isdigit():
            cur.advance()
        if cur.peek() == "." and cur.peek(1).isdigit():
            cur.advance()
            while cur.peek().isdigit():
                cur.advance()
        unit = ""
        while cur.peek().isalpha():
            unit += cur.peek()
            cur.advance()
            if unit.lower() in _TIME_UNITS and cur.peek().isdigit():
                break
        if unit.lower() not in _TIME_UNITS:
            raise IllegalCharacter(f"bad time unit {unit!r}", cur.span_from(mark))
        components += 1
    if components == 0:
        raise IllegalCharacter("empty time literal", cur.span_from(mark))


def reconstruct(source: str, tokens: list[Token]) -> str:
    """Rebuild the source from tokens plus the whitespace between them."""
    parts: list[str] = []
    prev_end = 0
    for tok in tokens:
        parts.append(source[prev_end:tok.offset])
        parts.append(tok.text)
        prev_end = tok.end_offset
    parts.append(source[prev_end:])
    return "".join(parts)
