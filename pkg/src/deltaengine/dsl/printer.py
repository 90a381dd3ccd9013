"""Canonical pretty-printer. parse(to_source(ast)) is structurally equal
to ast, and declaration order is preserved.
"""

from __future__ import annotations

from typing import List, Union

from .ast import (
    Assign,
    BattleAttr,
    BinOp,
    Call,
    DeltaAst,
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
    Program,
    Return,
    SelfPath,
    Stmt,
)

_INDENT = "    "

# binding strength, loosest first; unary `not` sits between `and` and
# the comparison tier
_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_NOT_PRECEDENCE = 3
_ATOM = 100


def _escape(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def format_literal(lit: Lit) -> str:
    if lit.kind == "bool":
        return "true" if lit.value else "false"
    if lit.kind == "string":
        return _escape(str(lit.value))
    if lit.kind == "decimal":
        text = repr(float(lit.value))
        return text if "." in text else text + ".0"
    return str(lit.value)


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PRECEDENCE[e.op]
    if isinstance(e, NotOp):
        return _NOT_PRECEDENCE
    return _ATOM


def format_expr(e: Expr) -> str:
    if isinstance(e, Lit):
        return format_literal(e)
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, SelfPath):
        return "self." + ".".join(e.parts)
    if isinstance(e, FoePath):
        return "foe." + ".".join(e.parts)
    if isinstance(e, BattleAttr):
        return "battle." + e.name
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, NotOp):
        inner = format_expr(e.operand)
        if _prec(e.operand) < _NOT_PRECEDENCE:
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(e, BinOp):
        p = _PRECEDENCE[e.op]
        left = format_expr(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = format_expr(e.right)
        # left-associative: equal-strength right child needs parens
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


def _emit_stmt(s: Stmt, depth: int, lines: List[str]):
    pad = _INDENT * depth
    if isinstance(s, Let):
        lines.append(f"{pad}let {s.name} = {format_expr(s.value)}")
    elif isinstance(s, Assign):
        lines.append(f"{pad}{format_expr(s.target)} = {format_expr(s.value)}")
    elif isinstance(s, If):
        lines.append(f"{pad}if {format_expr(s.cond)} {{")
        for t in s.then:
            _emit_stmt(t, depth + 1, lines)
        if s.orelse is None:
            lines.append(f"{pad}}}")
        else:
            lines.append(f"{pad}}} else {{")
            for t in s.orelse:
                _emit_stmt(t, depth + 1, lines)
            lines.append(f"{pad}}}")
    elif isinstance(s, Return):
        lines.append(f"{pad}return" if s.value is None else f"{pad}return {format_expr(s.value)}")
    elif isinstance(s, ExprStmt):
        lines.append(f"{pad}{format_expr(s.expr)}")
    else:
        raise TypeError(f"not a statement node: {s!r}")


def format_method(m: MethodDef, depth: int = 1) -> str:
    pad = _INDENT * depth
    lines = [f"{pad}fn {m.name}({', '.join(m.params)}) {{"]
    for s in m.body:
        _emit_stmt(s, depth + 1, lines)
    lines.append(f"{pad}}}")
    return "\n".join(lines)


def to_source(ast: Union[Program, MethodDef, FieldDef]) -> str:
    """Render the canonical textual form."""
    if isinstance(ast, MethodDef):
        return format_method(ast, depth=0)
    if isinstance(ast, FieldDef):
        return f"let {ast.name} = {format_literal(ast.value)}"
    lines: List[str] = []
    if isinstance(ast, DeltaAst):
        lines.append(f"increment {ast.target} {{")
    else:
        lines.append(f"role {ast.name} {{")
        for f in ast.fields:
            lines.append(f"{_INDENT}let {f.name} = {format_literal(f.value)}")
    for m in ast.methods:
        lines.append(format_method(m))
    lines.append("}")
    return "\n".join(lines) + "\n"
