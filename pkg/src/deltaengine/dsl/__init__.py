"""Sandboxed role-definition language: parse, print, validate.

Grammar sketch (comments run `#` to end of line):

    program    = roleDef | incrementDef
    roleDef    = "role" IDENT "{" { fieldDef } { methodDef } "}"
    incrementDef = "increment" IDENT "{" methodDef { methodDef } "}"
    fieldDef   = "let" IDENT "=" literal
    methodDef  = "fn" IDENT "(" [ IDENT { "," IDENT } ] ")" block
    stmt       = "let" IDENT "=" expr | lvalue "=" expr
               | "if" expr block [ "else" block ]
               | "return" [ expr ] | expr

Expressions cover literals (int, decimal, string, true/false), local
names, `self.`/`foe.` attribute paths, `battle.turn`, builtin and method
calls, arithmetic, comparisons, and `and`/`or`/`not`.
"""

from .ast import (
    Assign,
    BattleAttr,
    BinOp,
    Call,
    DeltaAst,
    Diagnostic,
    Expr,
    ExprStmt,
    FieldDef,
    FoePath,
    If,
    Let,
    Lit,
    MethodDef,
    Name,
    NotOp,
    Origin,
    Program,
    Return,
    RoleAst,
    SelfPath,
    Severity,
    SourceText,
    Stmt,
)
from .builtins import (
    BUILTINS,
    HOOK_NAMES,
    HOOK_SIGNATURES,
    STAT_NAMES,
    builtin_cheatsheet,
    is_move_slot,
)
from .errors import ParseError, ValidationError
from .parser import parse
from .printer import format_expr, format_method, to_source
from .validate import collect_calls, validate

__all__ = [
    "Assign", "BattleAttr", "BinOp", "Call", "DeltaAst", "Diagnostic",
    "Expr", "ExprStmt", "FieldDef", "FoePath", "If", "Let", "Lit",
    "MethodDef", "Name", "NotOp", "Origin", "Program", "Return", "RoleAst",
    "SelfPath", "Severity", "SourceText", "Stmt",
    "BUILTINS", "HOOK_NAMES", "HOOK_SIGNATURES", "STAT_NAMES",
    "builtin_cheatsheet", "is_move_slot",
    "ParseError", "ValidationError",
    "parse", "to_source", "format_expr", "format_method",
    "validate", "collect_calls",
]
