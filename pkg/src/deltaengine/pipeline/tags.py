"""Interest tagging: a fixed registry of statically minable code features.

The tagger looks at every method body the role has ever carried - current
methods plus every increment in its history - so a later overwrite cannot
un-demonstrate a feature. That makes the vector monotone under merge
(bitwise OR dominance), order-insensitive, and purely static.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Set, Tuple

from ..dsl import (
    Assign,
    BinOp,
    Call,
    ExprStmt,
    FoePath,
    HOOK_NAMES,
    If,
    Let,
    Lit,
    MethodDef,
    Name,
    NotOp,
    Return,
    SelfPath,
)
from ..engine import EngineState

TAGS: Tuple[str, ...] = (
    "power_boost",
    "stat_boost",
    "type_change",
    "protect",
    "multi_turn_state",
    "heal",
    "recoil",
    "priority",
    "status_inflict",
    "conditional_logic",
    "rng_use",
    "cross_hook_interaction",
)


@dataclass(frozen=True)
class InterestVector:
    bits: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) != len(TAGS):
            raise ValueError(f"interest vector needs {len(TAGS)} bits")

    @property
    def magnitude(self) -> int:
        return sum(self.bits)

    def tags(self) -> Tuple[str, ...]:
        return tuple(t for t, b in zip(TAGS, self.bits) if b)

    def dominates(self, other: "InterestVector") -> bool:
        return all(a or not b for a, b in zip(self.bits, other.bits))

    def to_dict(self) -> dict:
        return {t: int(b) for t, b in zip(TAGS, self.bits)}

    def to_list(self) -> List[int]:
        return [int(b) for b in self.bits]

    @classmethod
    def from_list(cls, bits: Iterable[int]) -> "InterestVector":
        return cls(tuple(bool(b) for b in bits))


class _BodyFacts:
    """Everything the rules need from one method body."""

    def __init__(self, method: MethodDef):
        self.method = method
        self.calls: List[Call] = []
        self.self_writes: List[str] = []
        self.has_if = False
        for s in method.body:
            self._stmt(s)

    def _stmt(self, s):
        if isinstance(s, Let):
            self._expr(s.value)
        elif isinstance(s, Assign):
            if isinstance(s.target, SelfPath):
                self.self_writes.append(s.target.parts[0])
            self._expr(s.value)
        elif isinstance(s, If):
            self.has_if = True
            self._expr(s.cond)
            for t in s.then:
                self._stmt(t)
            for t in s.orelse or ():
                self._stmt(t)
        elif isinstance(s, Return):
            if s.value is not None:
                self._expr(s.value)
        elif isinstance(s, ExprStmt):
            self._expr(s.expr)

    def _expr(self, e):
        if isinstance(e, Call):
            self.calls.append(e)
            for a in e.args:
                self._expr(a)
        elif isinstance(e, BinOp):
            self._expr(e.left)
            self._expr(e.right)
        elif isinstance(e, NotOp):
            self._expr(e.operand)

    def calls_to(self, *names: str) -> List[Call]:
        return [c for c in self.calls if c.name in names]


def _is_identity_get_power(method: MethodDef) -> bool:
    if len(method.params) != 2 or len(method.body) != 1:
        return False
    stmt = method.body[0]
    return (
        isinstance(stmt, Return)
        and isinstance(stmt.value, Name)
        and stmt.value.ident == method.params[1]
    )


def _flag_calls_with(facts_list, builtin: str, flag: str) -> bool:
    for facts in facts_list:
        for call in facts.calls_to(builtin):
            if call.args and isinstance(call.args[0], Lit) and call.args[0].value == flag:
                return True
    return False


def tag_interest(state: EngineState) -> InterestVector:
    """Mine the interest bits from the state's accumulated code.

    Every method body the state has ever carried is either part of its
    initial role or arrived in some increment, so that union (which only
    grows under merge) is what gets analyzed."""
    methods: List[MethodDef] = list((state.initial_role or state.role).methods)
    for entry in state.history:
        methods.extend(entry.delta.methods)

    facts = [_BodyFacts(m) for m in methods]
    overridden_hooks: Set[str] = {m.name for m in methods if m.name in HOOK_NAMES}

    power_boost = any(
        m.name == "get_power" and not _is_identity_get_power(m) for m in methods
    )
    stat_boost = (
        any(f.calls_to("apply_boost", "foe_boost", "set_boost") for f in facts)
        or "set_boost" in overridden_hooks
    )
    type_change = (
        any(f.calls_to("set_types", "type_change") for f in facts)
        or "type_change" in overridden_hooks
    )
    protect = _flag_calls_with(facts, "set_flag", "protected")
    multi_turn = any(f.self_writes for f in facts) or any(
        len(c.args) > 1 and isinstance(c.args[1], Lit) and isinstance(c.args[1].value, int)
        and not isinstance(c.args[1].value, bool) and c.args[1].value > 1
        for f in facts
        for c in f.calls_to("set_flag")
    )
    heal = any(f.calls_to("heal") for f in facts)
    recoil = any(f.calls_to("recoil") for f in facts)
    priority = _flag_calls_with(facts, "set_flag", "priority")
    status_inflict = any(f.calls_to("set_foe_flag") for f in facts)
    conditional = any(f.has_if for f in facts)
    rng_use = any(f.calls_to("chance") for f in facts)

    cross_hook = False
    for f in facts:
        for hook in overridden_hooks:
            if f.method.name != hook and f.calls_to(hook):
                cross_hook = True
        if f.method.name in HOOK_NAMES:
            others = [h for h in HOOK_NAMES if h != f.method.name]
            if f.calls_to(*others):
                cross_hook = True

    return InterestVector(
        (
            power_boost,
            stat_boost,
            type_change,
            protect,
            multi_turn,
            heal,
            recoil,
            priority,
            status_inflict,
            conditional,
            rng_use,
            cross_hook,
        )
    )
