"""Random program generator for property tests.

Programs are valid by construction: every name is declared before use,
helpers get called by another method, hook overrides keep their arity,
and call targets resolve. The parser must therefore accept 100% of the
generated text.

Two renderings are available: the canonical printer, and a "noisy" token
renderer that fully parenthesizes expressions and sprays random
whitespace and comments between tokens, stressing the lexer/parser
without changing structure.
"""

from __future__ import annotations

import random
from typing import List, Optional, Tuple

from ..dsl import (
    Assign,
    BattleAttr,
    BinOp,
    Call,
    DeltaAst,
    Expr,
    ExprStmt,
    FieldDef,
    FoePath,
    HOOK_SIGNATURES,
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
    Stmt,
)
from ..engine import EngineState

_WORDS = ("swift", "ember", "guard", "fang", "surge", "echo", "thorn", "drift")
_TYPES = ("Normal", "Fire", "Water", "Grass", "Electric", "Rock", "Bug", "Ghost")
_STATS = ("atk", "def", "spa", "spd", "spe")
_SELF_READS = (("hp",), ("max_hp",), ("level",), ("atk",), ("spe",), ("stage", "atk"), ("stage", "spe"))
_VAR_NAMES = ("counter", "charge", "fury", "memo", "tempo")
_PURE_BUILTINS = (
    ("min", 2), ("max", 2), ("abs", 1), ("floor", 1),
    ("has_flag", 1), ("foe_has_flag", 1), ("has_type", 1), ("chance", 1),
)


class ProgramGen:
    def __init__(self, rng: random.Random):
        self.rng = rng

    # --- expressions -----------------------------------------------------

    def literal(self) -> Lit:
        r = self.rng.random()
        if r < 0.45:
            return Lit(self.rng.randrange(0, 200), "int")
        if r < 0.6:
            return Lit(round(self.rng.uniform(0, 9), 2), "decimal")
        if r < 0.8:
            return Lit(self.rng.choice(_WORDS + _TYPES + _STATS), "string")
        return Lit(self.rng.random() < 0.5, "bool")

    def expr(self, scope: Tuple[str, ...], callables: Tuple[Tuple[str, int], ...], depth: int) -> Expr:
        roll = self.rng.random()
        if depth <= 0 or roll < 0.35:
            return self.atom(scope, callables, depth)
        if roll < 0.75:
            op = self.rng.choice(("+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "and", "or"))
            return BinOp(op, self.expr(scope, callables, depth - 1), self.expr(scope, callables, depth - 1))
        if roll < 0.85:
            return NotOp(self.expr(scope, callables, depth - 1))
        return self.atom(scope, callables, depth)

    def atom(self, scope, callables, depth) -> Expr:
        choices = ["lit", "self", "foe", "battle"]
        if scope:
            choices += ["name", "name"]
        if depth > 0:
            choices += ["call"]
        kind = self.rng.choice(choices)
        if kind == "lit":
            return self.literal()
        if kind == "name":
            return Name(self.rng.choice(scope))
        if kind == "self":
            return SelfPath(self.rng.choice(_SELF_READS))
        if kind == "foe":
            return FoePath(self.rng.choice(_SELF_READS))
        if kind == "battle":
            return BattleAttr("turn")
        name, arity = self.rng.choice(list(callables) + list(_PURE_BUILTINS))
        args = tuple(self.expr(scope, callables, 0) for _ in range(arity))
        return Call(name, args)

    # --- statements ------------------------------------------------------

    def side_effect_call(self, scope, callables) -> Call:
        table = [
            ("apply_boost", (Lit(self.rng.choice(_STATS), "string"), Lit(self.rng.randrange(1, 3), "int"))),
            ("foe_boost", (Lit(self.rng.choice(_STATS), "string"), Lit(0, "int"))),
            ("deal_damage", (Lit(self.rng.randrange(0, 90), "int"), Lit(self.rng.choice(("physical", "special")), "string"), Lit(self.rng.choice(_TYPES), "string"))),
            ("set_flag", (Lit(self.rng.choice(_WORDS), "string"), Lit(self.rng.randrange(1, 4), "int"))),
            ("heal", (Lit(self.rng.randrange(0, 40), "int"),)),
            ("set_types", (Lit(self.rng.choice(_TYPES), "string"),)),
        ]
        name, args = self.rng.choice(table)
        return Call(name, args)

    def block(self, scope: List[str], callables, depth: int, allow_return: bool) -> Tuple[Stmt, ...]:
        scope = list(scope)
        stmts: List[Stmt] = []
        for _ in range(self.rng.randrange(1, 5)):
            stmts.append(self.stmt(scope, callables, depth))
        if allow_return and self.rng.random() < 0.6:
            value = None if self.rng.random() < 0.2 else self.expr(tuple(scope), callables, 1)
            stmts.append(Return(value))
        return tuple(stmts)

    def stmt(self, scope: List[str], callables, depth: int) -> Stmt:
        roll = self.rng.random()
        if roll < 0.3 or not scope:
            name = f"v{len(scope)}"
            s = Let(name, self.expr(tuple(scope), callables, depth))
            scope.append(name)
            return s
        if roll < 0.45:
            return Assign(Name(self.rng.choice(scope)), self.expr(tuple(scope), callables, depth))
        if roll < 0.55:
            return Assign(SelfPath((self.rng.choice(_VAR_NAMES),)), self.expr(tuple(scope), callables, depth))
        if roll < 0.7 and depth > 0:
            cond = self.expr(tuple(scope), callables, depth - 1)
            then = self.block(scope, callables, depth - 1, allow_return=False)
            orelse = self.block(scope, callables, depth - 1, allow_return=False) if self.rng.random() < 0.4 else None
            return If(cond, then, orelse)
        if roll < 0.85:
            return ExprStmt(self.side_effect_call(tuple(scope), callables))
        return ExprStmt(self.expr(tuple(scope), callables, depth))

    # --- programs --------------------------------------------------------

    def method(self, name: str, params: Tuple[str, ...], callables) -> MethodDef:
        # params named like keywords (e.g. the customary `foe`) cannot be
        # referenced as bare names, so keep them out of the usable scope
        scope = [p for p in params if p not in ("self", "foe", "battle")]
        body = self.block(scope, callables, depth=2, allow_return=True)
        return MethodDef(name, params, body)

    def role(self, name: Optional[str] = None) -> RoleAst:
        name = name or f"Fuzz{self.rng.randrange(10000)}"
        fields = []
        used = set()
        for _ in range(self.rng.randrange(0, 4)):
            fname = self.rng.choice(_VAR_NAMES)
            if fname in used:
                continue
            used.add(fname)
            fields.append(FieldDef(fname, self.literal()))

        n_moves = self.rng.randrange(1, 5)
        n_helpers = self.rng.randrange(0, 3)
        helpers = [f"helper_{i}" for i in range(n_helpers)]
        hook_overrides = [h for h in HOOK_SIGNATURES if self.rng.random() < 0.3]

        # helpers and hooks are callable from any other method
        callables = tuple((h, self.rng.randrange(0, 3)) for h in helpers)
        helper_arity = dict(callables)

        methods: List[MethodDef] = []
        for h in helpers:
            params = tuple(f"p{i}" for i in range(helper_arity[h]))
            methods.append(self.method(h, params, ()))
        for hook in hook_overrides:
            methods.append(self.method(hook, HOOK_SIGNATURES[hook], callables))
        for i in range(1, n_moves + 1):
            methods.append(self.method(f"move_{i}", ("foe",), callables))

        # guarantee every helper is called by some other method; prepend so
        # a trailing bare `return` cannot swallow the inserted call
        move_names = [m.name for m in methods if m.name.startswith("move_")]
        for h in helpers:
            called = any(h in _calls(m) for m in methods if m.name != h)
            if not called:
                target = self.rng.choice(move_names)
                for idx, m in enumerate(methods):
                    if m.name == target:
                        args = tuple(Lit(self.rng.randrange(5), "int") for _ in range(helper_arity[h]))
                        methods[idx] = MethodDef(m.name, m.params, (ExprStmt(Call(h, args)),) + m.body)
                        break
        self.rng.shuffle(methods)
        return RoleAst(name, tuple(fields), tuple(methods))

    def delta(self, state: EngineState) -> DeltaAst:
        """An increment valid against the given state: overrides, new move
        slots, or new helpers that the delta itself calls."""
        existing = list(state.resolvable_names())
        methods: List[MethodDef] = []
        used = set()
        slot_numbers = [int(s[5:]) for s in state.move_slots()] or [0]
        next_slot = max(slot_numbers) + 1

        callables = tuple((n, len(state.lookup(n).params)) for n in existing)
        n = self.rng.randrange(1, 4)
        for _ in range(n):
            roll = self.rng.random()
            if roll < 0.45 and existing:
                name = self.rng.choice(existing)
                if name in used:
                    continue
                params = HOOK_SIGNATURES.get(name) or state.lookup(name).params
                methods.append(self.method(name, tuple(params), callables))
                used.add(name)
                from ..dsl import HOOK_NAMES
                from ..dsl.builtins import is_move_slot

                if name not in HOOK_NAMES and not is_move_slot(name):
                    # redefining a plain helper: earlier merges may have
                    # overridden its last caller, so ship one alongside
                    caller = f"move_{next_slot}"
                    next_slot += 1
                    args = tuple(Lit(1, "int") for _ in params)
                    methods.append(MethodDef(caller, ("foe",), (ExprStmt(Call(name, args)),)))
                    used.add(caller)
            elif roll < 0.8:
                name = f"move_{next_slot}"
                next_slot += 1
                methods.append(self.method(name, ("foe",), callables))
                used.add(name)
            else:
                helper = f"extra_{self.rng.randrange(1000)}"
                if helper in used:
                    continue
                arity = self.rng.randrange(0, 2)
                methods.append(self.method(helper, tuple(f"p{i}" for i in range(arity)), callables))
                caller = f"move_{next_slot}"
                next_slot += 1
                args = tuple(Lit(1, "int") for _ in range(arity))
                body = (ExprStmt(Call(helper, args)), ExprStmt(self.side_effect_call((), ())))
                methods.append(MethodDef(caller, ("foe",), body))
                used.add(helper)
                used.add(caller)
        # drop accidental duplicate names, keep first
        seen = set()
        unique = []
        for m in methods:
            if m.name not in seen:
                seen.add(m.name)
                unique.append(m)
        return DeltaAst(state.role.name, tuple(unique))

    def program(self) -> Program:
        if self.rng.random() < 0.7:
            return self.role()
        base = self.role()
        return self.delta(EngineState(role=base))


def _calls(method: MethodDef):
    from ..dsl import collect_calls

    return collect_calls(method.body)


# --- noisy rendering --------------------------------------------------------

# token kinds steer line handling in render_noisy: a call's "(" must stay
# on its name's line; a grouping "(" must never follow an identifier on
# the same line (it would re-parse as a call); a valued return keeps its
# operand on the same line, a bare one must not absorb the next statement
_PLAIN = "plain"
_CALL_OPEN = "call_open"
_GROUP_OPEN = "group_open"
_RETURN_VALUED = "return_valued"
_RETURN_BARE = "return_bare"

Tok = Tuple[str, str]


def _expr_tokens(e: Expr, out: List[Tok]):
    from ..dsl.printer import format_literal

    if isinstance(e, Lit):
        out.append((format_literal(e), _PLAIN))
    elif isinstance(e, Name):
        out.append((e.ident, _PLAIN))
    elif isinstance(e, SelfPath):
        out.append(("self." + ".".join(e.parts), _PLAIN))
    elif isinstance(e, FoePath):
        out.append(("foe." + ".".join(e.parts), _PLAIN))
    elif isinstance(e, BattleAttr):
        out.append(("battle." + e.name, _PLAIN))
    elif isinstance(e, Call):
        out.append((e.name, _PLAIN))
        out.append(("(", _CALL_OPEN))
        for i, a in enumerate(e.args):
            if i:
                out.append((",", _PLAIN))
            _expr_tokens(a, out)
        out.append((")", _PLAIN))
    elif isinstance(e, NotOp):
        out.append(("not", _PLAIN))
        out.append(("(", _GROUP_OPEN))
        _expr_tokens(e.operand, out)
        out.append((")", _PLAIN))
    elif isinstance(e, BinOp):
        out.append(("(", _GROUP_OPEN))
        _expr_tokens(e.left, out)
        out.append((")", _PLAIN))
        out.append((e.op, _PLAIN))
        out.append(("(", _GROUP_OPEN))
        _expr_tokens(e.right, out)
        out.append((")", _PLAIN))
    else:
        raise TypeError(e)


def _stmt_tokens(s: Stmt, out: List[Tok]):
    if isinstance(s, Let):
        out += [("let", _PLAIN), (s.name, _PLAIN), ("=", _PLAIN)]
        _expr_tokens(s.value, out)
    elif isinstance(s, Assign):
        _expr_tokens(s.target, out)
        out.append(("=", _PLAIN))
        _expr_tokens(s.value, out)
    elif isinstance(s, If):
        out.append(("if", _PLAIN))
        _expr_tokens(s.cond, out)
        out.append(("{", _PLAIN))
        for t in s.then:
            _stmt_tokens(t, out)
        out.append(("}", _PLAIN))
        if s.orelse is not None:
            out += [("else", _PLAIN), ("{", _PLAIN)]
            for t in s.orelse:
                _stmt_tokens(t, out)
            out.append(("}", _PLAIN))
    elif isinstance(s, Return):
        if s.value is not None:
            out.append(("return", _RETURN_VALUED))
            _expr_tokens(s.value, out)
        else:
            out.append(("return", _RETURN_BARE))
    elif isinstance(s, ExprStmt):
        _expr_tokens(s.expr, out)
    else:
        raise TypeError(s)


def program_tokens(p: Program) -> List[Tok]:
    from ..dsl.printer import format_literal

    out: List[Tok] = []
    if isinstance(p, RoleAst):
        out += [("role", _PLAIN), (p.name, _PLAIN), ("{", _PLAIN)]
        for f in p.fields:
            out += [("let", _PLAIN), (f.name, _PLAIN), ("=", _PLAIN), (format_literal(f.value), _PLAIN)]
    else:
        out += [("increment", _PLAIN), (p.target, _PLAIN), ("{", _PLAIN)]
    for m in p.methods:
        out += [("fn", _PLAIN), (m.name, _PLAIN), ("(", _CALL_OPEN)]
        for i, param in enumerate(m.params):
            if i:
                out.append((",", _PLAIN))
            out.append((param, _PLAIN))
        out += [(")", _PLAIN), ("{", _PLAIN)]
        for s in m.body:
            _stmt_tokens(s, out)
        out.append(("}", _PLAIN))
    out.append(("}", _PLAIN))
    return out


_IDENT_RE = __import__("re").compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def render_noisy(p: Program, rng: random.Random) -> str:
    """Grammar-conforming text with randomized whitespace and comments,
    respecting the parser's two line-sensitivity rules."""
    tokens = program_tokens(p)
    parts: List[str] = []
    for i, (tok, kind) in enumerate(tokens):
        parts.append(tok)
        if i + 1 == len(tokens):
            break
        nxt, nxt_kind = tokens[i + 1]
        force_newline = (
            (nxt_kind == _GROUP_OPEN and _IDENT_RE.match(tok) and tok not in ("if", "not", "else", "or", "and", "return"))
            or kind == _RETURN_BARE
        )
        same_line_only = nxt_kind == _CALL_OPEN or kind == _RETURN_VALUED
        r = rng.random()
        if force_newline:
            parts.append("\n" + " " * rng.randrange(0, 9))
        elif same_line_only:
            parts.append(" " if r < 0.7 else "  ")
        elif r < 0.08:
            parts.append(" # " + rng.choice(_WORDS) + "\n")
        elif r < 0.25:
            parts.append("\n" + " " * rng.randrange(0, 9))
        elif r < 0.35:
            parts.append("  ")
        else:
            parts.append(" ")
    return "".join(parts)
