from __future__ import annotations

import pytest

from stforge.dialect.lexer import tokenize
from stforge.dialect.nodes import (
    Assignment, CallStatement, CaseStatement, FbInvocation, ForStatement,
    IfStatement, LiteralKind, PouKind, RepeatStatement, VarBlockKind,
    VariableRef, WhileStatement,
)
from stforge.dialect.parser import (
    ParseFailure, Parser, parse, parse_source, try_parse_source,
)


def test_minimal_program():
    unit = parse(tokenize("PROGRAM Main x := 1; END_PROGRAM"))
    assert len(unit.pous) == 1
    pou = unit.pous[0]
    assert pou.kind is PouKind.PROGRAM and pou.name == "Main"
    assert len(pou.body) == 1 and isinstance(pou.body[0], Assignment)


def test_timer_invocation_and_member_access():
    # Compliant timer usage: declare, invoke with named parameters, read .Q.
    source = """
    PROGRAM TimerDemo
        VAR
            start : BOOL;
            done : BOOL;
            t1 : TON;
        END_VAR
        t1(IN := start, PT := T#5s);
        done := t1.Q;
    END_PROGRAM
    """
    unit = parse_source(source)
    invocation, read = unit.pous[0].body
    assert isinstance(invocation, FbInvocation)
    assert invocation.instance == "t1"
    assert [a.name for a in invocation.args] == ["IN", "PT"]
    assert invocation.args[1].value.kind is LiteralKind.TIME
    assert invocation.args[1].value.value == 5000.0
    assert isinstance(read, Assignment)
    assert isinstance(read.value, VariableRef)
    assert read.value.members == ["Q"]


def test_missing_then_is_a_syntax_error():
    with pytest.raises(ParseFailure) as err:
        parse(tokenize("PROGRAM P IF b END_PROGRAM"))
    issues = err.value.issues
    assert len(issues) == 1
    assert "THEN" in issues[0].expected


def test_recovery_reports_multiple_errors():
    source = """
    PROGRAM P
        VAR a : INT; END_VAR
        IF a END_IF;
        a := ;
        WHILE DO END_WHILE;
    END_PROGRAM
    """
    unit, issues = try_parse_source(source)
    assert len(issues) >= 2
    assert len(unit.pous) == 1  # the POU itself survived recovery


def test_recovery_resumes_after_bad_statement():
    source = """
    PROGRAM P
        VAR a : INT; b : INT; END_VAR
        a := ** 2;
        IF a > 1 THEN
            b := 1;
        END_IF;
        b := 5;
    END_PROGRAM
    """
    unit, issues = try_parse_source(source)
    assert len(issues) == 1
    # Sync swallowed up to END_IF; the trailing assignment still parsed.
    kinds = [type(s).__name__ for s in unit.pous[0].body]
    assert kinds[-1] == "Assignment"


def test_positional_call_statement():
    unit = parse_source("PROGRAM P VAR w : WORD; ok : BOOL; END_VAR ZPUSH(ok, w); END_PROGRAM")
    call = unit.pous[0].body[0]
    assert isinstance(call, CallStatement)
    assert call.callee == "ZPUSH"
    assert all(arg.name is None for arg in call.args)


def test_output_binding_direction():
    unit = parse_source(
        "PROGRAM P VAR d : DECO; w : WORD; s : WORD; n : INT; ok : BOOL; END_VAR "
        "d(EN := ok, S := s, N := n, D => w); END_PROGRAM"
    )
    invocation = unit.pous[0].body[0]
    directions = {arg.name: arg.direction for arg in invocation.args}
    assert directions == {"EN": "in", "S": "in", "N": "in", "D": "out"}


def test_duplicate_call_parameter_rejected():
    with pytest.raises(ParseFailure, match="duplicate parameter"):
        parse_source("PROGRAM P VAR t : TON; b : BOOL; END_VAR t(IN := b, IN := b); END_PROGRAM")


def test_control_statements_parse():
    source = """
    PROGRAM Controls
        VAR i : INT; n : INT; flag : BOOL; END_VAR
        FOR i := 0 TO 9 BY 2 DO n := n + i; END_FOR;
        WHILE n > 0 DO n := n - 1; END_WHILE;
        REPEAT n := n + 1; UNTIL n >= 3 END_REPEAT;
        CASE n OF
            0: flag := TRUE;
            1, 2: flag := FALSE;
            3..5: n := 0;
            ELSE n := -1;
        END_CASE;
        IF flag THEN n := 1; ELSIF n = 2 THEN n := 2; ELSE n := 3; END_IF;
    END_PROGRAM
    """
    body = parse_source(source).pous[0].body
    assert [type(s) for s in body] == [
        ForStatement, WhileStatement, RepeatStatement, CaseStatement, IfStatement,
    ]
    case = body[3]
    assert len(case.arms) == 3 and len(case.else_body) == 1
    assert body[0].step is not None


def test_var_constant_both_spellings():
    unit1 = parse_source("PROGRAM P VAR CONSTANT c : INT := 1; END_VAR ; END_PROGRAM")
    unit2 = parse_source("PROGRAM P VAR_CONSTANT c : INT := 1; END_VAR ; END_PROGRAM")
    assert unit1.pous[0].var_blocks[0].kind is VarBlockKind.VAR_CONSTANT
    assert unit2.pous[0].var_blocks[0].kind is VarBlockKind.VAR_CONSTANT


def test_multi_name_declaration_expands():
    unit = parse_source("PROGRAM P VAR a, b, c : INT; END_VAR ; END_PROGRAM")
    decls = unit.pous[0].var_blocks[0].decls
    assert [d.name for d in decls] == ["a", "b", "c"]
    assert all(d.data_type.base == "INT" for d in decls)


def test_array_bounds_and_inverted_bound():
    unit = parse_source("PROGRAM P VAR a : ARRAY [0..3, -2..2] OF INT; END_VAR ; END_PROGRAM")
    assert unit.pous[0].var_blocks[0].decls[0].data_type.array_bounds == [(0, 3), (-2, 2)]
    with pytest.raises(ParseFailure, match="inverted"):
        parse_source("PROGRAM P VAR a : ARRAY [5..1] OF INT; END_VAR ; END_PROGRAM")


def test_function_header_and_return_type():
    unit = parse_source(
        "FUNCTION Doubler : INT VAR_INPUT x : INT; END_VAR Doubler := x * 2; END_FUNCTION"
    )
    pou = unit.pous[0]
    assert pou.kind is PouKind.FUNCTION
    assert pou.return_type is not None and pou.return_type.base == "INT"


def test_comments_attach_as_trivia_not_statements():
    unit = parse_source("PROGRAM P (* note *) VAR a : INT; END_VAR // x\n a := 1; END_PROGRAM")
    assert len(unit.trivia) == 2
    assert len(unit.pous[0].body) == 1


def test_empty_var_block_rejected():
    with pytest.raises(ParseFailure, match="empty variable block"):
        parse_source("PROGRAM P VAR END_VAR ; END_PROGRAM")


def test_expression_precedence():
    unit = parse_source("PROGRAM P VAR a : BOOL; b : BOOL; n : INT; END_VAR a := b OR a AND n + 1 * 2 > 3; END_PROGRAM")
    expr = unit.pous[0].body[0].value
    # OR binds loosest: top node is OR.
    assert expr.op == "OR"
    assert expr.rhs.op == "AND"
    comparison = expr.rhs.rhs
    assert comparison.op == ">"
    assert comparison.lhs.op == "+"
    assert comparison.lhs.rhs.op == "*"


def test_parser_class_exposes_issues():
    parser = Parser(tokenize("PROGRAM P x := ; END_PROGRAM"))
    unit = parser.run()
    assert len(parser.issues) == 1
    assert unit.pous[0].name == "P"
