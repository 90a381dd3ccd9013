"""Execution-rate metric.

A role passes if its code raises no runtime error in any battle against
the shared pool of synthesized opponents, both sides picking uniformly
random moves each turn. Errors by the opponent never count against the
tested role. The whole computation is a pure function of (roles,
n_opponents, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from ..engine import EngineState
from ..battle import Outcome, make_random_policy, run_battle
from .opponents import load_move_db, synth_opponent

RolesInput = Union[Mapping[str, EngineState], Sequence[Tuple[str, EngineState]]]


@dataclass(frozen=True)
class ExeRoleResult:
    passed: bool
    opponents_fought: int
    first_error: Optional[str] = None
    first_error_kind: Optional[str] = None


@dataclass(frozen=True)
class ExeReport:
    per_role: Dict[str, ExeRoleResult]
    exe_percent: float
    n_opponents: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "exe_percent": self.exe_percent,
            "n_opponents": self.n_opponents,
            "seed": self.seed,
            "per_role": {
                rid: {
                    "passed": r.passed,
                    "opponents_fought": r.opponents_fought,
                    "first_error": r.first_error,
                    "first_error_kind": r.first_error_kind,
                }
                for rid, r in sorted(self.per_role.items())
            },
        }


def _normalize(roles: RolesInput) -> Sequence[Tuple[str, EngineState]]:
    if isinstance(roles, Mapping):
        return sorted(roles.items())
    return list(roles)


def exe_rate(roles: RolesInput, n_opponents: int = 100, seed: int = 0) -> ExeReport:
    items = _normalize(roles)
    if not items:
        raise ValueError("no roles to evaluate")
    db = load_move_db()
    opponents = [synth_opponent(seed * 7919 + i, db) for i in range(n_opponents)]
    per_role: Dict[str, ExeRoleResult] = {}
    passed_count = 0
    for role_index, (role_id, state) in enumerate(items):
        fought = 0
        first_error = None
        first_kind = None
        for opp_index, opp in enumerate(opponents):
            battle_seed = seed * 1_000_003 + role_index * 10_007 + opp_index
            log = run_battle(
                state, opp,
                make_random_policy(battle_seed * 2 + 1),
                make_random_policy(battle_seed * 2 + 2),
                seed=battle_seed,
            )
            fought += 1
            if log.outcome is Outcome.ERROR_A:
                side, message = log.errors[0]
                first_error = message
                first_kind = message.split(" ", 1)[0]
                break
        ok = first_error is None
        passed_count += ok
        per_role[role_id] = ExeRoleResult(ok, fought, first_error, first_kind)
    return ExeReport(
        per_role=per_role,
        exe_percent=100.0 * passed_count / len(items),
        n_opponents=n_opponents,
        seed=seed,
    )
