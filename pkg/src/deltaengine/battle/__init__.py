from .damage import clamp_stage, damage_amount, stage_adjusted
from .host import (
    BattleLog,
    BattleRole,
    BattleState,
    Event,
    InvalidRoleError,
    Outcome,
    UnknownMoveError,
    execute_action,
    make_random_policy,
    make_scripted_policy,
    run_battle,
    step,
)
from .interpreter import Budget, ErrorKind, Interpreter, RoleRuntimeError
from .typechart import all_types, is_type, type_multiplier

__all__ = [
    "BattleLog", "BattleRole", "BattleState", "Event", "InvalidRoleError",
    "Outcome", "UnknownMoveError", "execute_action", "make_random_policy",
    "make_scripted_policy", "run_battle", "step",
    "Budget", "ErrorKind", "Interpreter", "RoleRuntimeError",
    "all_types", "is_type", "type_multiplier",
    "clamp_stage", "damage_amount", "stage_adjusted",
]
