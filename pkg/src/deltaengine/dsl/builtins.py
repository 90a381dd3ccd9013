"""Registry of builtin callables and overridable hook methods.

This is the single source of truth for what role code may call. The
validator checks names and arity against it; the battle interpreter binds
the implementations; the generation prompt renders it as a cheat-sheet.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Tuple


@dataclass(frozen=True)
class BuiltinSig:
    name: str
    min_args: int
    max_args: int
    doc: str


_B = BuiltinSig

BUILTINS: Dict[str, BuiltinSig] = {
    b.name: b
    for b in [
        _B("deal_damage", 3, 3, 'deal_damage(power, category, move_type) -> int damage dealt to the foe; category is "physical" or "special"'),
        _B("apply_boost", 2, 2, 'apply_boost(stat, amount) -> own stat stage change, clamped to [-6, 6]; stat in "atk" "def" "spa" "spd" "spe"'),
        _B("foe_boost", 2, 2, "foe_boost(stat, amount) -> change the foe's stat stage"),
        _B("set_types", 1, 2, 'set_types(type_1) or set_types(type_1, type_2) -> replace own types'),
        _B("set_flag", 1, 2, 'set_flag(name) or set_flag(name, turns) -> set a named flag on self (default 1 turn)'),
        _B("set_foe_flag", 1, 2, "set_foe_flag(name) or set_foe_flag(name, turns) -> set a named flag on the foe"),
        _B("has_flag", 1, 1, "has_flag(name) -> true if self has the flag active"),
        _B("foe_has_flag", 1, 1, "foe_has_flag(name) -> true if the foe has the flag active"),
        _B("heal", 1, 1, "heal(amount) -> restore own hp, clamped at max_hp"),
        _B("recoil", 1, 1, "recoil(amount) -> damage self, hp floors at 0"),
        _B("chance", 1, 1, "chance(p) -> true with probability p in [0, 1]; the only random builtin"),
        _B("has_type", 1, 1, "has_type(t) -> true if t is one of own types"),
        _B("foe_has_type", 1, 1, "foe_has_type(t) -> true if t is one of the foe's types"),
        _B("min", 2, 2, "min(a, b)"),
        _B("max", 2, 2, "max(a, b)"),
        _B("abs", 1, 1, "abs(x)"),
        _B("floor", 1, 1, "floor(x) -> integer part"),
    ]
}

# Overridable hook methods; every engine state resolves these.
HOOK_SIGNATURES: Dict[str, Tuple[str, ...]] = {
    "get_power": ("move", "power"),
    "set_boost": ("stat", "amount"),
    "type_change": ("new_type",),
}

HOOK_NAMES = tuple(HOOK_SIGNATURES)

# move_1, move_2, ... are invoked by the battle host and count as called.
MOVE_SLOT_RE = re.compile(r"^move_[1-9][0-9]*$")

# Attribute paths readable through `self.` / `foe.`; `stage` nests one level.
READABLE_ATTRS = frozenset({"hp", "max_hp", "level", "atk", "def", "spa", "spd", "spe", "species"})
STAT_NAMES = ("atk", "def", "spa", "spd", "spe")
# Assignment through `self.` may not touch engine-managed names.
RESERVED_WRITE = frozenset(
    {"hp", "max_hp", "level", "stage", "species", "hp_base", "type_1", "type_2", *STAT_NAMES}
)
BATTLE_ATTRS = frozenset({"turn", "max_turns"})


def is_move_slot(name: str) -> bool:
    return bool(MOVE_SLOT_RE.match(name))


def builtin_cheatsheet() -> str:
    return "\n".join(f"- {b.doc}" for b in BUILTINS.values())
