"""Deterministic turn-based battle host.

Two roles built from engine states fight by executing their own role code
through the budgeted interpreter. All randomness flows through the
battle's seeded stream and is visible in the log as rng_draw events
(chance() calls and speed-tie breaks only). Same roles, same policies,
same seed: byte-identical logs.

A runtime error in role code is attributed to the side whose code was
executing. By default it ends the battle with an error outcome; with
continue_on_error the event is recorded and play goes on.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..dsl import STAT_NAMES
from .damage import clamp_stage, damage_amount, stage_adjusted
from .interpreter import Budget, ErrorKind, Interpreter, RoleRuntimeError, is_number
from .typechart import is_type, type_multiplier

if TYPE_CHECKING:
    from ..engine import EngineState

LEVEL = 50
MAX_TURNS_DEFAULT = 100

PROTECTED_FLAG = "protected"
PRIORITY_FLAG = "priority"


class InvalidRoleError(Exception):
    pass


class UnknownMoveError(LookupError):
    pass


class Outcome(Enum):
    WIN_A = "win_a"
    WIN_B = "win_b"
    DRAW = "draw"
    ERROR_A = "error_a"
    ERROR_B = "error_b"


@dataclass(frozen=True)
class Event:
    turn: int
    actor: str  # "A", "B", or "battle"
    kind: str   # move_used, damage, boost, type_change, flag_set, heal,
                # status, faint, runtime_error, rng_draw
    payload: Dict[str, Any]

    def to_json(self) -> str:
        doc = {"turn": self.turn, "actor": self.actor, "kind": self.kind, "payload": self.payload}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Event":
        doc = json.loads(line)
        return cls(doc["turn"], doc["actor"], doc["kind"], doc["payload"])


class BattleRole:
    def __init__(self, engine: EngineState, side: str):
        self.engine = engine
        self.side = side
        fields = {f.name: f.value.value for f in engine.role.fields}
        self.species = str(fields.get("species", engine.role.name))
        for key in ("hp_base", "atk", "def", "spa", "spd", "spe"):
            v = fields.get(key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise InvalidRoleError(f"role {engine.role.name} lacks a positive integer field {key!r}")
        types = []
        for key in ("type_1", "type_2"):
            if key in fields:
                t = fields[key]
                if not isinstance(t, str) or not is_type(t):
                    raise InvalidRoleError(f"role {engine.role.name}: {key} is not a known type")
                types.append(t)
        if not types:
            raise InvalidRoleError(f"role {engine.role.name} declares no type_1")
        self.level = LEVEL
        self.max_hp = 2 * fields["hp_base"] + 10
        self.hp = self.max_hp
        self.stats = {k: fields[k] for k in STAT_NAMES}
        self.stages = {k: 0 for k in STAT_NAMES}
        self.types: List[str] = types
        self.flags: Dict[str, int] = {}
        self.vars: Dict[str, Any] = dict(fields)

    def effective_stat(self, stat: str) -> int:
        return stage_adjusted(self.stats[stat], self.stages[stat])

    def has_active_flag(self, name: str) -> bool:
        return self.flags.get(name, 0) > 0


@dataclass
class BattleLog:
    outcome: Outcome
    events: Tuple[Event, ...]
    turns: int
    seed: int
    errors: Tuple[Tuple[str, str], ...] = ()  # (side, error message)

    def to_jsonl(self) -> str:
        return "\n".join(e.to_json() for e in self.events) + "\n"


class BattleState:
    def __init__(self, a: EngineState, b: EngineState, seed: int,
                 max_turns: int = MAX_TURNS_DEFAULT, continue_on_error: bool = False):
        self.side_a = BattleRole(a, "A")
        self.side_b = BattleRole(b, "B")
        self.turn = 1
        self.seed = seed
        self.rng = random.Random(seed)
        self.max_turns = max_turns
        self.continue_on_error = continue_on_error
        self.events: List[Event] = []
        self.outcome: Optional[Outcome] = None
        self.rng_draws = 0
        self.runtime_errors: List[Tuple[str, RoleRuntimeError]] = []

    def role(self, side: str) -> BattleRole:
        return self.side_a if side == "A" else self.side_b

    def foe_of(self, side: str) -> BattleRole:
        return self.side_b if side == "A" else self.side_a

    def emit(self, actor: str, kind: str, /, **payload):
        self.events.append(Event(self.turn, actor, kind, payload))

    def draw(self, purpose: str) -> float:
        value = self.rng.random()
        self.rng_draws += 1
        self.emit("battle", "rng_draw", purpose=purpose, draw=value)
        return value


# --- builtin implementations ----------------------------------------------

class _SideContext:
    """Bridge between the interpreter and one side of a battle."""

    def __init__(self, battle: BattleState, side: str):
        self.battle = battle
        self.side = side
        self.me = battle.role(side)
        self.foe = battle.foe_of(side)
        self._builtins: Dict[str, Callable] = {
            "deal_damage": self.b_deal_damage,
            "apply_boost": self.b_apply_boost,
            "foe_boost": self.b_foe_boost,
            "set_types": self.b_set_types,
            "set_flag": self.b_set_flag,
            "set_foe_flag": self.b_set_foe_flag,
            "has_flag": self.b_has_flag,
            "foe_has_flag": self.b_foe_has_flag,
            "heal": self.b_heal,
            "recoil": self.b_recoil,
            "chance": self.b_chance,
            "has_type": self.b_has_type,
            "foe_has_type": self.b_foe_has_type,
            "min": self.b_min,
            "max": self.b_max,
            "abs": self.b_abs,
            "floor": self.b_floor,
        }

    # bridge interface ------------------------------------------------------

    def lookup(self, name: str):
        return self.me.engine.lookup(name)

    def builtin(self, name: str):
        return self._builtins.get(name)

    def read_path(self, interp: Interpreter, owner: str, parts: Tuple[str, ...], span):
        role = self.me if owner == "self" else self.foe
        head = parts[0]
        if head == "stage":
            if len(parts) != 2 or parts[1] not in STAT_NAMES:
                interp.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"{owner}.stage wants a stat name", span)
            return role.stages[parts[1]]
        if len(parts) != 1:
            interp.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"no attribute path {owner}.{'.'.join(parts)}", span)
        if head == "hp":
            return role.hp
        if head == "max_hp":
            return role.max_hp
        if head == "level":
            return role.level
        if head == "species":
            return role.species
        if head in STAT_NAMES:
            return role.stats[head]
        if head in role.vars:
            return role.vars[head]
        interp.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"{owner}.{head} is not set", span)

    def write_self(self, interp: Interpreter, parts: Tuple[str, ...], value, span):
        from ..dsl.builtins import RESERVED_WRITE

        if len(parts) != 1:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, "only single-level self attributes are assignable", span)
        name = parts[0]
        if name in RESERVED_WRITE:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, f"self.{name} is engine-managed and read-only", span)
        self.me.vars[name] = value

    def battle_attr(self, interp: Interpreter, name: str, span):
        if name == "turn":
            return self.battle.turn
        if name == "max_turns":
            return self.battle.max_turns
        interp.fail(ErrorKind.UNKNOWN_IDENTIFIER, f"no battle attribute {name!r}", span)

    # argument checking -------------------------------------------------------

    def _int(self, interp, v, what, span) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            interp.fail(ErrorKind.TYPE_MISMATCH, f"{what} must be an integer")
        return v

    def _number(self, interp, v, what, span) -> float:
        if not is_number(v):
            interp.fail(ErrorKind.TYPE_MISMATCH, f"{what} must be a number")
        return v

    def _str(self, interp, v, what, span) -> str:
        if not isinstance(v, str):
            interp.fail(ErrorKind.TYPE_MISMATCH, f"{what} must be a string")
        return v

    def _stat(self, interp, v, span) -> str:
        name = self._str(interp, v, "stat name", span)
        if name not in STAT_NAMES:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, f"unknown stat {name!r}")
        return name

    # builtins ---------------------------------------------------------------

    def b_deal_damage(self, interp: Interpreter, args, span) -> int:
        power = self._number(interp, args[0], "power", span)
        category = self._str(interp, args[1], "category", span)
        move_type = self._str(interp, args[2], "move type", span)
        if category not in ("physical", "special"):
            interp.fail(ErrorKind.DOMAIN_VIOLATION, f"category must be 'physical' or 'special', got {category!r}")
        if not is_type(move_type):
            interp.fail(ErrorKind.DOMAIN_VIOLATION, f"unknown move type {move_type!r}")
        move_name = interp.action_name or interp.current_method

        if self.foe.has_active_flag(PROTECTED_FLAG):
            self.foe.flags[PROTECTED_FLAG] -= 1
            if self.foe.flags[PROTECTED_FLAG] <= 0:
                del self.foe.flags[PROTECTED_FLAG]
            self.battle.emit(self.side, "damage", move=move_name, amount=0,
                             protected=True, target=self.foe.side)
            return 0

        # the attacker's own get_power hook decides the effective power
        hook_power = interp.call_by_name("get_power", [move_name, power], span)
        if not is_number(hook_power):
            interp.fail(ErrorKind.TYPE_MISMATCH, "get_power must return a number")
        eff_power = max(0, int(hook_power))

        if category == "physical":
            attack = stage_adjusted(self.me.stats["atk"], self.me.stages["atk"])
            defense = stage_adjusted(self.foe.stats["def"], self.foe.stages["def"])
        else:
            attack = stage_adjusted(self.me.stats["spa"], self.me.stages["spa"])
            defense = stage_adjusted(self.foe.stats["spd"], self.foe.stages["spd"])
        stab = move_type in self.me.types
        mult = type_multiplier(move_type, self.foe.types)
        amount = damage_amount(eff_power, attack, defense, stab, mult)
        self.foe.hp = max(0, self.foe.hp - amount)
        self.battle.emit(self.side, "damage", move=move_name, amount=amount,
                         power_used=eff_power, category=category, move_type=move_type,
                         type_mult=f"{mult.numerator}/{mult.denominator}",
                         stab=stab, target=self.foe.side, target_hp=self.foe.hp)
        return amount

    def _boost(self, interp, role: BattleRole, args, span) -> int:
        stat = self._stat(interp, args[0], span)
        amount = self._int(interp, args[1], "stage amount", span)
        new_stage = clamp_stage(role.stages[stat] + amount)
        role.stages[stat] = new_stage
        self.battle.emit(self.side, "boost", stat=stat, amount=amount,
                         stage=new_stage, target=role.side)
        return new_stage

    def b_apply_boost(self, interp, args, span):
        return self._boost(interp, self.me, args, span)

    def b_foe_boost(self, interp, args, span):
        return self._boost(interp, self.foe, args, span)

    def b_set_types(self, interp, args, span):
        names = [self._str(interp, a, "type", span) for a in args]
        for t in names:
            if not is_type(t):
                interp.fail(ErrorKind.DOMAIN_VIOLATION, f"unknown type {t!r}")
        self.me.types = list(dict.fromkeys(names))
        self.battle.emit(self.side, "type_change", types=list(self.me.types), target=self.side)
        return None

    def _flag(self, interp, role: BattleRole, kind: str, args, span):
        name = self._str(interp, args[0], "flag name", span)
        turns = self._int(interp, args[1], "flag turns", span) if len(args) > 1 else 1
        if turns < 0:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, "flag turns must be >= 0")
        if turns == 0:
            role.flags.pop(name, None)
        else:
            role.flags[name] = turns
        self.battle.emit(self.side, kind, name=name, turns=turns, target=role.side)
        return None

    def b_set_flag(self, interp, args, span):
        return self._flag(interp, self.me, "flag_set", args, span)

    def b_set_foe_flag(self, interp, args, span):
        return self._flag(interp, self.foe, "status", args, span)

    def b_has_flag(self, interp, args, span) -> bool:
        return self.me.has_active_flag(self._str(interp, args[0], "flag name", span))

    def b_foe_has_flag(self, interp, args, span) -> bool:
        return self.foe.has_active_flag(self._str(interp, args[0], "flag name", span))

    def b_heal(self, interp, args, span):
        amount = self._number(interp, args[0], "heal amount", span)
        if amount < 0:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, "heal amount must be >= 0")
        healed = min(self.me.max_hp - self.me.hp, int(amount))
        self.me.hp += healed
        self.battle.emit(self.side, "heal", amount=healed, hp=self.me.hp, target=self.side)
        return None

    def b_recoil(self, interp, args, span):
        amount = self._number(interp, args[0], "recoil amount", span)
        if amount < 0:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, "recoil amount must be >= 0")
        dealt = min(self.me.hp, int(amount))
        self.me.hp -= dealt
        self.battle.emit(self.side, "damage", recoil=True, amount=dealt,
                         target=self.side, target_hp=self.me.hp)
        return None

    def b_chance(self, interp, args, span) -> bool:
        p = self._number(interp, args[0], "probability", span)
        if not 0 <= p <= 1:
            interp.fail(ErrorKind.DOMAIN_VIOLATION, f"chance() wants p in [0, 1], got {p}")
        return self.battle.draw("chance") < p

    def b_has_type(self, interp, args, span) -> bool:
        return self._str(interp, args[0], "type", span) in self.me.types

    def b_foe_has_type(self, interp, args, span) -> bool:
        return self._str(interp, args[0], "type", span) in self.foe.types

    def b_min(self, interp, args, span):
        a = self._number(interp, args[0], "min() argument", span)
        b = self._number(interp, args[1], "min() argument", span)
        return min(a, b)

    def b_max(self, interp, args, span):
        a = self._number(interp, args[0], "max() argument", span)
        b = self._number(interp, args[1], "max() argument", span)
        return max(a, b)

    def b_abs(self, interp, args, span):
        return abs(self._number(interp, args[0], "abs() argument", span))

    def b_floor(self, interp, args, span) -> int:
        import math

        return math.floor(self._number(interp, args[0], "floor() argument", span))


# --- turn machinery ---------------------------------------------------------

def execute_action(battle: BattleState, side: str, move_index: int) -> Optional[RoleRuntimeError]:
    """Run one side's chosen move slot. Returns the runtime error if the
    side's code failed, None otherwise. Faint checking is the caller's job."""
    role = battle.role(side)
    name = f"move_{move_index}"
    method = role.engine.lookup(name)
    if method is None or not name.startswith("move_"):
        raise UnknownMoveError(f"{role.species} has no move slot {move_index}")
    battle.emit(side, "move_used", move=name, index=move_index)
    ctx = _SideContext(battle, side)
    interp = Interpreter(ctx, Budget())
    args: List[Any] = []
    if method.params:
        args = [battle.foe_of(side).species] + [0] * (len(method.params) - 1)
    try:
        interp.run_action(method, args)
        return None
    except RoleRuntimeError as err:
        battle.emit(side, "runtime_error", kind=err.kind.value, method=err.method, message=err.message)
        battle.runtime_errors.append((side, err))
        return err


def _acting_order(battle: BattleState) -> Tuple[str, str]:
    a, b = battle.side_a, battle.side_b
    pa, pb = a.has_active_flag(PRIORITY_FLAG), b.has_active_flag(PRIORITY_FLAG)
    if pa != pb:
        return ("A", "B") if pa else ("B", "A")
    sa, sb = a.effective_stat("spe"), b.effective_stat("spe")
    if sa != sb:
        return ("A", "B") if sa > sb else ("B", "A")
    return ("A", "B") if battle.draw("order") < 0.5 else ("B", "A")


def step(battle: BattleState, action_a: int, action_b: int) -> BattleState:
    """Play one full turn: order by priority flag, then stage-adjusted
    speed, breaking ties with one rng draw; each living side executes its
    chosen move; faints are checked after each action; flags tick down at
    end of turn."""
    if battle.outcome is not None:
        raise ValueError("battle already decided")
    actions = {"A": action_a, "B": action_b}
    for side in _acting_order(battle):
        if battle.outcome is not None:
            break
        err = execute_action(battle, side, actions[side])
        if err is not None and not battle.continue_on_error:
            battle.outcome = Outcome.ERROR_A if side == "A" else Outcome.ERROR_B
            break
        me, foe = battle.role(side), battle.foe_of(side)
        if foe.hp <= 0:
            battle.emit(foe.side, "faint", target=foe.side)
            battle.outcome = Outcome.WIN_A if side == "A" else Outcome.WIN_B
        elif me.hp <= 0:
            battle.emit(side, "faint", target=side)
            battle.outcome = Outcome.WIN_A if side == "B" else Outcome.WIN_B
    if battle.outcome is None:
        for role in (battle.side_a, battle.side_b):
            for name in list(role.flags):
                role.flags[name] -= 1
                if role.flags[name] <= 0:
                    del role.flags[name]
        battle.turn += 1
    return battle


Policy = Callable[[BattleState, str], int]


def make_random_policy(seed: int) -> Policy:
    """Uniform over the side's own move slots, fresh draw each turn. Uses
    its own stream derived from the given seed so the battle log's rng
    draw count stays auditable."""
    rng = random.Random(seed)

    def policy(battle: BattleState, side: str) -> int:
        slots = battle.role(side).engine.move_slots()
        if not slots:
            raise UnknownMoveError("role has no move slots")
        return int(rng.choice(slots)[5:])

    return policy


def make_scripted_policy(indices: Sequence[int]) -> Policy:
    """Cycle through a fixed move index list."""
    counters: Dict[str, int] = {}

    def policy(battle: BattleState, side: str) -> int:
        i = counters.get(side, 0)
        counters[side] = i + 1
        return indices[i % len(indices)]

    return policy


def run_battle(a: EngineState, b: EngineState, policy_a: Policy, policy_b: Policy,
               seed: int, max_turns: int = MAX_TURNS_DEFAULT,
               continue_on_error: bool = False) -> BattleLog:
    """Loop step() until a side faints, a runtime error ends it, or the
    turn cap is hit (draw)."""
    battle = BattleState(a, b, seed, max_turns=max_turns, continue_on_error=continue_on_error)
    for _ in range(max_turns):
        if battle.outcome is not None:
            break
        step(battle, policy_a(battle, "A"), policy_b(battle, "B"))
    outcome = battle.outcome or Outcome.DRAW
    return BattleLog(
        outcome=outcome,
        events=tuple(battle.events),
        turns=min(battle.turn, max_turns),
        seed=seed,
        errors=tuple((side, str(err)) for side, err in battle.runtime_errors),
    )
