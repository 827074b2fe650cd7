"""ST dialect core: lexer, parser, AST, canonical printer, label extraction."""

from .labels import DuplicateLabelError, Label, LabelManifest, extract_labels
from .lexer import (
    IllegalCharacter, LexError, Token, TokenKind, UnterminatedComment,
    UnterminatedString, tokenize,
)
from .nodes import (
    Assignment, Binary, CallArg, CallStatement, CaseArm, CaseRange,
    CaseStatement, CompilationUnit, DataTypeRef, EmptyStatement,
    ExitStatement, Expression, FbInvocation, ForStatement, FunctionCall,
    IfBranch, IfStatement, Literal, LiteralKind, Pou, PouKind,
    RepeatStatement, ReturnStatement, Statement, Unary, VarBlock,
    VarBlockKind, VarDecl, VariableRef, WhileStatement, structural_key,
)
from .parser import (
    ParseFailure, ParseIssue, Parser, parse, parse_source, try_parse_source,
)
from .printer import pretty_print, print_expression
from .spans import SourceSpan

__all__ = [
    "Assignment", "Binary", "CallArg", "CallStatement", "CaseArm",
    "CaseRange", "CaseStatement", "CompilationUnit", "DataTypeRef",
    "DuplicateLabelError", "EmptyStatement", "ExitStatement", "Expression",
    "FbInvocation", "ForStatement", "FunctionCall", "IfBranch", "IfStatement",
    "IllegalCharacter", "Label", "LabelManifest", "LexError", "Literal",
    "LiteralKind", "ParseFailure", "ParseIssue", "Parser", "Pou", "PouKind",
    "RepeatStatement", "ReturnStatement", "SourceSpan", "Statement", "Token",
    "TokenKind", "Unary", "UnterminatedComment", "UnterminatedString",
    "VarBlock", "VarBlockKind", "VarDecl", "VariableRef", "WhileStatement",
    "extract_labels", "parse", "parse_source", "pretty_print",
    "print_expression", "structural_key", "tokenize", "try_parse_source",
]
