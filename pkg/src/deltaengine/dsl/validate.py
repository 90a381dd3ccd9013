"""Static validation of parsed programs.

Rules enforced:
  - field / method / parameter names unique within their unit
  - bare names in bodies resolve to parameters or prior `let` bindings
  - call targets resolve to builtins, hooks, unit methods, or (for deltas
    without context) move slots; arity checked where the target is known
  - method names may not shadow builtins
  - hook overrides keep the hook's arity
  - attribute paths stay on the readable/writable surface
  - a method that is not a hook or move slot must be called by some other
    method in the unit-plus-context union ("dangling-method")

A delta validated standalone cannot see its target role, so calls to
unknown names are errors by default (rejection soundness). Merge re-runs
validation with `context_methods`/`context_called` built from the real
name union; `allow_foreign_calls=True` defers unknown call targets to
that later pass.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .ast import (
    Assign,
    BattleAttr,
    BinOp,
    Call,
    DeltaAst,
    Diagnostic,
    Expr,
    ExprStmt,
    FoePath,
    If,
    Let,
    MethodDef,
    Name,
    NotOp,
    Program,
    Return,
    RoleAst,
    SelfPath,
    Severity,
    Stmt,
)
from .builtins import (
    BATTLE_ATTRS,
    BUILTINS,
    HOOK_SIGNATURES,
    RESERVED_WRITE,
    STAT_NAMES,
    is_move_slot,
)

_NO_SPAN = (1, 1, 1)


def _err(span, message: str, code: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, span or _NO_SPAN, message, code)


def collect_calls(stmts: Iterable[Stmt]) -> Set[str]:
    """All call target names appearing anywhere under the statements."""
    found: Set[str] = set()

    def walk_expr(e: Expr):
        if isinstance(e, Call):
            found.add(e.name)
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, BinOp):
            walk_expr(e.left)
            walk_expr(e.right)
        elif isinstance(e, NotOp):
            walk_expr(e.operand)

    def walk_stmt(s: Stmt):
        if isinstance(s, Let):
            walk_expr(s.value)
        elif isinstance(s, Assign):
            walk_expr(s.value)
        elif isinstance(s, If):
            walk_expr(s.cond)
            for t in s.then:
                walk_stmt(t)
            for t in s.orelse or ():
                walk_stmt(t)
        elif isinstance(s, Return):
            if s.value is not None:
                walk_expr(s.value)
        elif isinstance(s, ExprStmt):
            walk_expr(s.expr)

    for s in stmts:
        walk_stmt(s)
    return found


class _MethodChecker:
    def __init__(
        self,
        method: MethodDef,
        callable_arity: Mapping[str, Optional[Tuple[int, int]]],
        allow_foreign_calls: bool,
        out: List[Diagnostic],
    ):
        self.method = method
        self.callable_arity = callable_arity
        self.allow_foreign_calls = allow_foreign_calls
        self.out = out

    def check(self):
        m = self.method
        seen = set()
        for p in m.params:
            if p in seen:
                self.out.append(_err(m.span, f"duplicate parameter {p!r} in {m.name!r}", "duplicate-parameter"))
            seen.add(p)
        self.check_block(m.body, set(m.params))

    def check_block(self, stmts: Iterable[Stmt], scope: Set[str]):
        scope = set(scope)
        for s in stmts:
            self.check_stmt(s, scope)

    def check_stmt(self, s: Stmt, scope: Set[str]):
        if isinstance(s, Let):
            self.check_expr(s.value, scope)
            scope.add(s.name)
        elif isinstance(s, Assign):
            self.check_expr(s.value, scope)
            if isinstance(s.target, Name):
                if s.target.ident not in scope:
                    self.out.append(
                        _err(s.target.span, f"assignment to undeclared name {s.target.ident!r}", "unknown-identifier")
                    )
            else:
                self.check_self_write(s.target)
        elif isinstance(s, If):
            self.check_expr(s.cond, scope)
            self.check_block(s.then, scope)
            if s.orelse is not None:
                self.check_block(s.orelse, scope)
        elif isinstance(s, Return):
            if s.value is not None:
                self.check_expr(s.value, scope)
        elif isinstance(s, ExprStmt):
            self.check_expr(s.expr, scope)

    def check_self_write(self, target: SelfPath):
        if len(target.parts) != 1:
            self.out.append(_err(target.span, "only single-level self attributes are assignable", "bad-write"))
            return
        if target.parts[0] in RESERVED_WRITE:
            self.out.append(
                _err(target.span, f"self.{target.parts[0]} is engine-managed and read-only", "reserved-write")
            )

    def check_path(self, parts: Tuple[str, ...], span, owner: str):
        if parts[0] == "stage":
            if len(parts) != 2 or parts[1] not in STAT_NAMES:
                self.out.append(_err(span, f"{owner}.stage requires a stat name from {STAT_NAMES}", "bad-path"))
            return
        if len(parts) > 1:
            self.out.append(_err(span, f"{owner}.{'.'.join(parts)}: nested attribute paths are limited to stage.<stat>", "bad-path"))

    def check_expr(self, e: Expr, scope: Set[str]):
        if isinstance(e, Name):
            if e.ident not in scope:
                self.out.append(_err(e.span, f"unknown identifier {e.ident!r}", "unknown-identifier"))
        elif isinstance(e, SelfPath):
            self.check_path(e.parts, e.span, "self")
        elif isinstance(e, FoePath):
            self.check_path(e.parts, e.span, "foe")
        elif isinstance(e, BattleAttr):
            if e.name not in BATTLE_ATTRS:
                self.out.append(_err(e.span, f"unknown battle attribute {e.name!r}", "unknown-identifier"))
        elif isinstance(e, Call):
            self.check_call(e, scope)
        elif isinstance(e, BinOp):
            self.check_expr(e.left, scope)
            self.check_expr(e.right, scope)
        elif isinstance(e, NotOp):
            self.check_expr(e.operand, scope)

    def check_call(self, e: Call, scope: Set[str]):
        for a in e.args:
            self.check_expr(a, scope)
        if e.name in self.callable_arity:
            arity = self.callable_arity[e.name]
            if arity is not None:
                lo, hi = arity
                if not (lo <= len(e.args) <= hi):
                    want = str(lo) if lo == hi else f"{lo}..{hi}"
                    self.out.append(
                        _err(e.span, f"{e.name}() takes {want} argument(s), got {len(e.args)}", "bad-arity")
                    )
            return
        if not self.allow_foreign_calls:
            self.out.append(_err(e.span, f"call to unknown method or builtin {e.name!r}", "unknown-call"))


def validate(
    program: Program,
    context_methods: Optional[Mapping[str, int]] = None,
    context_called: Optional[Set[str]] = None,
    allow_foreign_calls: bool = False,
) -> List[Diagnostic]:
    """Check one program, returning diagnostics (empty sequence means valid).

    context_methods maps externally resolvable method names to their arity
    (the merge-time name union); context_called lists names already called
    somewhere in that context.
    """
    out: List[Diagnostic] = []

    methods = program.methods
    unit_names: Dict[str, MethodDef] = {}
    for m in methods:
        if m.name in unit_names:
            out.append(_err(m.span, f"duplicate method {m.name!r}", "duplicate-method"))
        unit_names[m.name] = m
        if m.name in BUILTINS:
            out.append(_err(m.span, f"method name {m.name!r} shadows a builtin", "reserved-name"))
        if m.name in HOOK_SIGNATURES and len(m.params) != len(HOOK_SIGNATURES[m.name]):
            expected = len(HOOK_SIGNATURES[m.name])
            out.append(
                _err(m.span, f"hook {m.name!r} takes {expected} parameter(s), got {len(m.params)}", "bad-arity")
            )

    if isinstance(program, RoleAst):
        seen_fields = set()
        for f in program.fields:
            if f.name in seen_fields:
                out.append(_err(f.span, f"duplicate field {f.name!r}", "duplicate-field"))
            seen_fields.add(f.name)

    # callable universe: builtins + hooks + unit methods (+ merge context);
    # a delta validated standalone may also call any move slot
    callable_arity: Dict[str, Optional[Tuple[int, int]]] = {
        name: (b.min_args, b.max_args) for name, b in BUILTINS.items()
    }
    for name, params in HOOK_SIGNATURES.items():
        callable_arity[name] = (len(params), len(params))
    if context_methods:
        for name, arity in context_methods.items():
            callable_arity[name] = (arity, arity)
    for m in methods:
        callable_arity[m.name] = (len(m.params), len(m.params))

    standalone_delta = isinstance(program, DeltaAst) and context_methods is None

    class _DeltaArity(dict):
        def __contains__(self, key):
            return dict.__contains__(self, key) or (standalone_delta and is_move_slot(key))

        def __getitem__(self, key):
            if dict.__contains__(self, key):
                return dict.__getitem__(self, key)
            return None  # optimistic move slot, arity unknown

    lookup = _DeltaArity(callable_arity)

    for m in methods:
        _MethodChecker(m, lookup, allow_foreign_calls, out).check()

    # dangling check: every non-hook, non-move-slot method must be called
    # by some *other* method in the unit/context union
    external_calls: Set[str] = set(context_called or ())
    calls_by_method = {m.name: collect_calls(m.body) for m in methods}
    for m in methods:
        if m.name in HOOK_SIGNATURES or is_move_slot(m.name):
            continue
        called = m.name in external_calls or any(
            m.name in calls for owner, calls in calls_by_method.items() if owner != m.name
        )
        if not called:
            out.append(
                _err(m.span, f"method {m.name!r} is defined but never called", "dangling-method")
            )

    return out
