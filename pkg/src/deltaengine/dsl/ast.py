"""AST for the sandboxed role-definition language.

Nodes are frozen dataclasses. Source spans ride along for diagnostics but
are excluded from equality, so two parses of equivalent text compare equal
regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

# (line, column, length), 1-based line and column
Span = Tuple[int, int, int]


def _span_field():
    return field(default=None, compare=False, repr=False, kw_only=True)


class Origin(Enum):
    SEED = "seed"
    PROXY_RESPONSE = "proxy-response"
    FILE = "file"
    API = "api"


@dataclass(frozen=True)
class SourceText:
    text: str
    origin: Origin = Origin.FILE


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    span: Span
    message: str
    # stable machine-readable category, e.g. "unknown-identifier"
    code: str = "generic"

    def __str__(self):
        line, col, _ = self.span
        return f"{self.severity.value} at {line}:{col}: {self.message}"


# --- expressions ---------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: Union[int, float, str, bool]
    # "int" | "decimal" | "string" | "bool"; kept explicit so Lit(True)
    # and Lit(1) never compare equal
    kind: str
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Name:
    ident: str
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class SelfPath:
    parts: Tuple[str, ...]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class FoePath:
    parts: Tuple[str, ...]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class BattleAttr:
    name: str
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class NotOp:
    operand: "Expr"
    span: Optional[Span] = _span_field()


Expr = Union[Lit, Name, SelfPath, FoePath, BattleAttr, Call, BinOp, NotOp]


# --- statements ----------------------------------------------------------

@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Assign:
    target: Union[Name, SelfPath]
    value: Expr
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    orelse: Optional[Tuple["Stmt", ...]]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    span: Optional[Span] = _span_field()


Stmt = Union[Let, Assign, If, Return, ExprStmt]


# --- definitions ---------------------------------------------------------

@dataclass(frozen=True)
class FieldDef:
    name: str
    value: Lit
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class MethodDef:
    name: str
    params: Tuple[str, ...]
    body: Tuple[Stmt, ...]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class RoleAst:
    name: str
    fields: Tuple[FieldDef, ...]
    methods: Tuple[MethodDef, ...]
    span: Optional[Span] = _span_field()

    def method(self, name: str) -> Optional[MethodDef]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class DeltaAst:
    target: str
    methods: Tuple[MethodDef, ...]
    span: Optional[Span] = _span_field()

    def method(self, name: str) -> Optional[MethodDef]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


Program = Union[RoleAst, DeltaAst]
