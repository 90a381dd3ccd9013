"""Tree-walking interpreter for role code, with a hard execution budget.

Values are int, float, bool, str, or unit (Python None). Typing is
strict: arithmetic wants numbers, logic wants booleans, `==` across
different kinds is False rather than an error. Every evaluated node costs
one budget step and every call one depth level, so no role code can hang
a battle: the budget raises instead.

The interpreter is host-agnostic. A bridge object supplies method lookup,
builtin implementations, attribute reads/writes and battle attributes;
the battle host wires those to real battle state.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from ..dsl import (
    Assign,
    BattleAttr,
    BinOp,
    Call,
    ExprStmt,
    FoePath,
    If,
    Let,
    Lit,
    MethodDef,
    Name,
    NotOp,
    Return,
    SelfPath,
)

MAX_STEPS = 10_000
MAX_DEPTH = 32


class ErrorKind(Enum):
    UNKNOWN_IDENTIFIER = "unknownIdentifier"
    TYPE_MISMATCH = "typeMismatch"
    DIVIDE_BY_ZERO = "divideByZero"
    BUDGET_EXCEEDED = "budgetExceeded"
    DEPTH_EXCEEDED = "depthExceeded"
    DOMAIN_VIOLATION = "domainViolation"


class RoleRuntimeError(Exception):
    """A role's own code failed while executing."""

    def __init__(self, kind: ErrorKind, method: str, message: str, span=None):
        super().__init__(f"{kind.value} in {method}: {message}")
        self.kind = kind
        self.method = method
        self.message = message
        self.span = span


class Budget:
    def __init__(self, max_steps: int = MAX_STEPS, max_depth: int = MAX_DEPTH):
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.steps = 0
        self.depth = 0


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


def value_kind(v: Any) -> str:
    if v is None:
        return "unit"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "decimal"
    if isinstance(v, str):
        return "string"
    return type(v).__name__


def is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def values_equal(a: Any, b: Any) -> bool:
    if is_number(a) and is_number(b):
        return a == b
    if type(a) is not type(b):
        return False
    return a == b


class Interpreter:
    def __init__(self, bridge, budget: Optional[Budget] = None):
        self.bridge = bridge
        self.budget = budget or Budget()
        self.action_name: Optional[str] = None  # depth-0 method being executed
        self._method_stack: List[str] = []

    # --- errors ----------------------------------------------------------

    @property
    def current_method(self) -> str:
        return self._method_stack[-1] if self._method_stack else (self.action_name or "?")

    def fail(self, kind: ErrorKind, message: str, span=None):
        raise RoleRuntimeError(kind, self.current_method, message, span)

    def tick(self, span=None):
        self.budget.steps += 1
        if self.budget.steps > self.budget.max_steps:
            self.fail(ErrorKind.BUDGET_EXCEEDED, f"exceeded {self.budget.max_steps} evaluation steps", span)

    # --- calls -----------------------------------------------------------

    def run_action(self, method: MethodDef, args: Sequence[Any]):
        """Execute a top-level action (a move slot chosen by a policy)."""
        self.action_name = method.name
        return self._call_method(method, list(args))

    def call_by_name(self, name: str, args: Sequence[Any], span=None):
        """Invoke a method through lookup (used by builtins for hooks)."""
        method = self.bridge.lookup(name)
        if method is None:
            self.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"no method named {name!r}", span)
        return self._call_method(method, list(args), span)

    def _call_method(self, method: MethodDef, args: List[Any], span=None):
        if len(args) != len(method.params):
            self.fail(
                ErrorKind.TYPE_MISMATCH,
                f"{method.name}() takes {len(method.params)} argument(s), got {len(args)}",
                span,
            )
        self.budget.depth += 1
        if self.budget.depth > self.budget.max_depth:
            self.budget.depth -= 1
            self.fail(ErrorKind.DEPTH_EXCEEDED, f"call depth exceeded {self.budget.max_depth}", span)
        self._method_stack.append(method.name)
        scopes: List[Dict[str, Any]] = [dict(zip(method.params, args))]
        try:
            self._exec_block(method.body, scopes)
            return None
        except _ReturnSignal as ret:
            return ret.value
        finally:
            self._method_stack.pop()
            self.budget.depth -= 1

    # --- statements ------------------------------------------------------

    def _exec_block(self, stmts, scopes: List[Dict[str, Any]]):
        scopes.append({})
        try:
            for s in stmts:
                self._exec_stmt(s, scopes)
        finally:
            scopes.pop()

    def _exec_stmt(self, s, scopes):
        self.tick(getattr(s, "span", None))
        if isinstance(s, Let):
            scopes[-1][s.name] = self._eval(s.value, scopes)
        elif isinstance(s, Assign):
            value = self._eval(s.value, scopes)
            if isinstance(s.target, Name):
                for scope in reversed(scopes):
                    if s.target.ident in scope:
                        scope[s.target.ident] = value
                        break
                else:
                    self.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"assignment to undeclared {s.target.ident!r}", s.span)
            else:
                self.bridge.write_self(self, s.target.parts, value, s.span)
        elif isinstance(s, If):
            cond = self._eval(s.cond, scopes)
            if not isinstance(cond, bool):
                self.fail(ErrorKind.TYPE_MISMATCH, f"if condition must be bool, got {value_kind(cond)}", s.span)
            if cond:
                self._exec_block(s.then, scopes)
            elif s.orelse is not None:
                self._exec_block(s.orelse, scopes)
        elif isinstance(s, Return):
            raise _ReturnSignal(None if s.value is None else self._eval(s.value, scopes))
        elif isinstance(s, ExprStmt):
            self._eval(s.expr, scopes)
        else:
            raise TypeError(f"unknown statement node {s!r}")

    # --- expressions -----------------------------------------------------

    def _eval(self, e, scopes):
        self.tick(getattr(e, "span", None))
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Name):
            for scope in reversed(scopes):
                if e.ident in scope:
                    return scope[e.ident]
            self.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"unknown name {e.ident!r}", e.span)
        if isinstance(e, SelfPath):
            return self.bridge.read_path(self, "self", e.parts, e.span)
        if isinstance(e, FoePath):
            return self.bridge.read_path(self, "foe", e.parts, e.span)
        if isinstance(e, BattleAttr):
            return self.bridge.battle_attr(self, e.name, e.span)
        if isinstance(e, Call):
            return self._eval_call(e, scopes)
        if isinstance(e, NotOp):
            v = self._eval(e.operand, scopes)
            if not isinstance(v, bool):
                self.fail(ErrorKind.TYPE_MISMATCH, f"'not' wants bool, got {value_kind(v)}", e.span)
            return not v
        if isinstance(e, BinOp):
            return self._eval_binop(e, scopes)
        raise TypeError(f"unknown expression node {e!r}")

    def _eval_call(self, e: Call, scopes):
        builtin = self.bridge.builtin(e.name)
        if builtin is not None:
            args = [self._eval(a, scopes) for a in e.args]
            return builtin(self, args, e.span)
        method = self.bridge.lookup(e.name)
        if method is None:
            self.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"no method or builtin named {e.name!r}", e.span)
        args = [self._eval(a, scopes) for a in e.args]
        return self._call_method(method, args, e.span)

    def _eval_binop(self, e: BinOp, scopes):
        op = e.op
        if op in ("and", "or"):
            left = self._eval(e.left, scopes)
            if not isinstance(left, bool):
                self.fail(ErrorKind.TYPE_MISMATCH, f"{op!r} wants bool operands, got {value_kind(left)}", e.span)
            if op == "and" and not left:
                return False
            if op == "or" and left:
                return True
            right = self._eval(e.right, scopes)
            if not isinstance(right, bool):
                self.fail(ErrorKind.TYPE_MISMATCH, f"{op!r} wants bool operands, got {value_kind(right)}", e.span)
            return right

        left = self._eval(e.left, scopes)
        right = self._eval(e.right, scopes)
        if op == "==":
            return values_equal(left, right)
        if op == "!=":
            return not values_equal(left, right)
        if op in ("<", "<=", ">", ">="):
            if not (is_number(left) and is_number(right)):
                self.fail(
                    ErrorKind.TYPE_MISMATCH,
                    f"{op!r} wants numbers, got {value_kind(left)} and {value_kind(right)}",
                    e.span,
                )
            return {"<": left < right, "<=": left <= right, ">": left > right, ">=": left >= right}[op]
        if not (is_number(left) and is_number(right)):
            self.fail(
                ErrorKind.TYPE_MISMATCH,
                f"{op!r} wants numbers, got {value_kind(left)} and {value_kind(right)}",
                e.span,
            )
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                self.fail(ErrorKind.DIVIDE_BY_ZERO, "division by zero", e.span)
            return left / right
        if op == "%":
            if right == 0:
                self.fail(ErrorKind.DIVIDE_BY_ZERO, "modulo by zero", e.span)
            return left % right
        raise TypeError(f"unknown operator {op!r}")
