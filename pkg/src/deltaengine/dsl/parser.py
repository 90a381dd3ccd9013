"""Recursive descent parser producing RoleAst or DeltaAst.

A source starting with `role` yields a RoleAst, `increment` a DeltaAst.
Operator precedence, loosest first: or, and, not, comparisons, additive,
multiplicative. Binary operators are left-associative.

`parse` also validates the result. Roles are closed units, so every rule
is enforced here; a delta may legitimately call methods that only exist
on its target role, so its call targets are re-checked at merge time
against the real name union.
"""

from __future__ import annotations

from typing import List, Optional, Tuple, Union

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
    Program,
    Return,
    RoleAst,
    SelfPath,
    Severity,
    SourceText,
    Stmt,
)
from .errors import ParseError, ValidationError
from .lexer import Token, tokenize
from .validate import validate

# token types that can begin an expression (drives optional `return` operand)
_EXPR_START = {
    "INT", "DECIMAL", "STRING", "true", "false",
    "IDENT", "self", "foe", "battle", "not", "LPAREN",
}

_COMPARISONS = {"EQ": "==", "NE": "!=", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}
_ADDITIVE = {"PLUS": "+", "MINUS": "-"}
_MULTIPLICATIVE = {"STAR": "*", "SLASH": "/", "PERCENT": "%"}

_PARAM_TOKENS = {"IDENT", "self", "foe", "battle"}


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "EOF":
            self.pos += 1
        return tok

    def error(self, msg: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(Diagnostic(Severity.ERROR, tok.span, msg, "syntax"))

    def expect(self, ttype: str, what: str) -> Token:
        tok = self.peek()
        if tok.type != ttype:
            shown = tok.value or tok.type
            raise self.error(f"expected {what}, got {shown!r}")
        return self.advance()

    # --- program ---------------------------------------------------------

    def parse_program(self) -> Program:
        tok = self.peek()
        if tok.type == "role":
            node = self.parse_role()
        elif tok.type == "increment":
            node = self.parse_increment()
        else:
            raise self.error("expected 'role' or 'increment'")
        self.expect("EOF", "end of input")
        return node

    def parse_role(self) -> RoleAst:
        start = self.expect("role", "'role'")
        name = self.expect("IDENT", "role name")
        self.expect("LBRACE", "'{'")
        fields: List[FieldDef] = []
        while self.peek().type == "let":
            fields.append(self.parse_field())
        methods: List[MethodDef] = []
        while self.peek().type == "fn":
            methods.append(self.parse_method())
        self.expect("RBRACE", "'}'")
        return RoleAst(name.value, tuple(fields), tuple(methods), span=start.span)

    def parse_increment(self) -> DeltaAst:
        start = self.expect("increment", "'increment'")
        name = self.expect("IDENT", "target role name")
        self.expect("LBRACE", "'{'")
        methods: List[MethodDef] = []
        while self.peek().type == "fn":
            methods.append(self.parse_method())
        if not methods:
            raise self.error("an increment must define at least one method")
        self.expect("RBRACE", "'}'")
        return DeltaAst(name.value, tuple(methods), span=start.span)

    def parse_field(self) -> FieldDef:
        start = self.expect("let", "'let'")
        name = self.expect("IDENT", "field name")
        self.expect("ASSIGN", "'='")
        value = self.parse_literal()
        return FieldDef(name.value, value, span=start.span)

    def parse_method(self) -> MethodDef:
        start = self.expect("fn", "'fn'")
        name = self.expect("IDENT", "method name")
        self.expect("LPAREN", "'('")
        params: List[str] = []
        if self.peek().type != "RPAREN":
            while True:
                tok = self.peek()
                if tok.type not in _PARAM_TOKENS:
                    raise self.error("expected parameter name")
                params.append(self.advance().value)
                if self.peek().type == "COMMA":
                    self.advance()
                    continue
                break
        self.expect("RPAREN", "')'")
        body = self.parse_block()
        return MethodDef(name.value, tuple(params), body, span=start.span)

    # --- statements ------------------------------------------------------

    def parse_block(self) -> Tuple[Stmt, ...]:
        self.expect("LBRACE", "'{'")
        stmts: List[Stmt] = []
        while self.peek().type not in ("RBRACE", "EOF"):
            stmts.append(self.parse_stmt())
        self.expect("RBRACE", "'}'")
        return tuple(stmts)

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.type == "let":
            self.advance()
            name = self.expect("IDENT", "binding name")
            self.expect("ASSIGN", "'='")
            value = self.parse_expr()
            return Let(name.value, value, span=tok.span)
        if tok.type == "if":
            return self.parse_if()
        if tok.type == "return":
            self.advance()
            # the operand must start on the same line, otherwise a bare
            # return would swallow the next statement
            nxt = self.peek()
            value = self.parse_expr() if nxt.type in _EXPR_START and nxt.line == tok.line else None
            return Return(value, span=tok.span)
        expr = self.parse_expr()
        if self.peek().type == "ASSIGN":
            if not isinstance(expr, (Name, SelfPath)):
                raise self.error("only names and self.<field> paths are assignable")
            self.advance()
            value = self.parse_expr()
            return Assign(expr, value, span=tok.span)
        return ExprStmt(expr, span=tok.span)

    def parse_if(self) -> If:
        start = self.expect("if", "'if'")
        cond = self.parse_expr()
        then = self.parse_block()
        orelse: Optional[Tuple[Stmt, ...]] = None
        if self.peek().type == "else":
            self.advance()
            orelse = self.parse_block()
        return If(cond, then, orelse, span=start.span)

    # --- expressions -----------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.peek().type == "or":
            op = self.advance()
            left = BinOp("or", left, self.parse_and(), span=op.span)
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.peek().type == "and":
            op = self.advance()
            left = BinOp("and", left, self.parse_not(), span=op.span)
        return left

    def parse_not(self) -> Expr:
        if self.peek().type == "not":
            op = self.advance()
            return NotOp(self.parse_not(), span=op.span)
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_additive()
        while self.peek().type in _COMPARISONS:
            op = self.advance()
            left = BinOp(_COMPARISONS[op.type], left, self.parse_additive(), span=op.span)
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_multiplicative()
        while self.peek().type in _ADDITIVE:
            op = self.advance()
            left = BinOp(_ADDITIVE[op.type], left, self.parse_multiplicative(), span=op.span)
        return left

    def parse_multiplicative(self) -> Expr:
        left = self.parse_primary()
        while self.peek().type in _MULTIPLICATIVE:
            op = self.advance()
            left = BinOp(_MULTIPLICATIVE[op.type], left, self.parse_primary(), span=op.span)
        return left

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.type in ("INT", "DECIMAL", "STRING", "true", "false"):
            return self.parse_literal()
        if tok.type == "LPAREN":
            self.advance()
            inner = self.parse_expr()
            self.expect("RPAREN", "')'")
            return inner
        if tok.type == "self":
            self.advance()
            return SelfPath(self.parse_dotted_path("self"), span=tok.span)
        if tok.type == "foe":
            self.advance()
            return FoePath(self.parse_dotted_path("foe"), span=tok.span)
        if tok.type == "battle":
            self.advance()
            self.expect("DOT", "'.' after 'battle'")
            attr = self.expect("IDENT", "battle attribute")
            return BattleAttr(attr.value, span=tok.span)
        if tok.type == "IDENT":
            self.advance()
            # a call's opening paren binds only on the same line; this keeps
            # `x` followed by a parenthesized statement unambiguous
            if self.peek().type == "LPAREN" and self.peek().line == tok.line:
                self.advance()
                args: List[Expr] = []
                if self.peek().type != "RPAREN":
                    while True:
                        args.append(self.parse_expr())
                        if self.peek().type == "COMMA":
                            self.advance()
                            continue
                        break
                self.expect("RPAREN", "')'")
                return Call(tok.value, tuple(args), span=tok.span)
            return Name(tok.value, span=tok.span)
        shown = tok.value or tok.type
        raise self.error(f"expected an expression, got {shown!r}")

    def parse_dotted_path(self, head: str) -> Tuple[str, ...]:
        self.expect("DOT", f"'.' after '{head}'")
        parts = [self.expect("IDENT", "attribute name").value]
        while self.peek().type == "DOT":
            self.advance()
            parts.append(self.expect("IDENT", "attribute name").value)
        return tuple(parts)

    def parse_literal(self) -> Lit:
        tok = self.advance()
        if tok.type == "INT":
            return Lit(int(tok.value), "int", span=tok.span)
        if tok.type == "DECIMAL":
            return Lit(float(tok.value), "decimal", span=tok.span)
        if tok.type == "STRING":
            return Lit(tok.value, "string", span=tok.span)
        if tok.type == "true":
            return Lit(True, "bool", span=tok.span)
        if tok.type == "false":
            return Lit(False, "bool", span=tok.span)
        shown = tok.value or tok.type
        raise self.error(f"expected a literal, got {shown!r}", tok)


def parse(src: Union[str, SourceText]) -> Program:
    """Parse and validate one program.

    Raises ParseError on grammar violations and ValidationError when the
    tree breaks a language rule. Pure: same input, same tree.
    """
    text = src.text if isinstance(src, SourceText) else src
    if not text.strip():
        raise ParseError(Diagnostic(Severity.ERROR, (1, 1, 1), "empty source", "syntax"))
    program = _Parser(tokenize(text)).parse_program()
    # a role is a closed unit; a delta may call methods that only exist on
    # its target role, so unknown call targets and dangling helpers are
    # re-checked at merge time against the real name union
    diagnostics = validate(program, allow_foreign_calls=isinstance(program, DeltaAst))
    errors = [d for d in diagnostics if d.severity is Severity.ERROR and d.code != "dangling-method"]
    if errors:
        raise ValidationError(errors)
    return program
