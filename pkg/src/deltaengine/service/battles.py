"""Battle sessions for the HTTP API.

Non-interactive battles (random or scripted policies on both sides) run
to completion at creation time under a concurrency bound. Interactive
sides submit actions per turn; the turn advances once every side's action
is known, and an interactive side that stays silent past the timeout is
given a random action. Advancement is lazy - driven by submissions and
log reads - so sessions hold no threads.
"""

from __future__ import annotations

import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..battle import BattleState, Outcome, step
from ..engine import EngineState


@dataclass(frozen=True)
class PolicySpec:
    kind: str  # "random" | "scripted" | "interactive"
    moves: tuple = ()

    @classmethod
    def from_dict(cls, raw) -> "PolicySpec":
        if raw is None:
            return cls("random")
        if isinstance(raw, str):
            return cls(raw)
        kind = raw.get("kind", "random")
        return cls(kind, tuple(raw.get("moves", ())))


class DoubleSubmissionError(Exception):
    pass


class BattleSession:
    def __init__(self, battle_id: str, a: EngineState, b: EngineState, seed: int,
                 policy_a: PolicySpec, policy_b: PolicySpec,
                 max_turns: int, interactive_timeout: float):
        self.battle_id = battle_id
        self.battle = BattleState(a, b, seed, max_turns=max_turns)
        self.policies = {"A": policy_a, "B": policy_b}
        self.interactive_timeout = interactive_timeout
        self.pending: Dict[str, int] = {}
        self.turn_deadline: Optional[float] = None
        self._policy_rngs = {"A": random.Random(seed * 2 + 1), "B": random.Random(seed * 2 + 2)}
        self._scripted_pos = {"A": 0, "B": 0}
        self._fallback_rng = random.Random(seed ^ 0xD3A17)
        self._lock = threading.Lock()
        self.interactive = any(p.kind == "interactive" for p in self.policies.values())

    # --- policy actions ----------------------------------------------------

    def _auto_action(self, side: str) -> Optional[int]:
        spec = self.policies[side]
        role = self.battle.role(side)
        slots = [int(s[5:]) for s in role.engine.move_slots()]
        if spec.kind == "random":
            return self._policy_rngs[side].choice(slots)
        if spec.kind == "scripted":
            if not spec.moves:
                return slots[0]
            i = self._scripted_pos[side]
            self._scripted_pos[side] += 1
            return spec.moves[i % len(spec.moves)]
        return None  # interactive: must be submitted

    def submit_action(self, side: str, move: int):
        with self._lock:
            if self.battle.outcome is not None:
                raise ValueError("battle already finished")
            if self.policies[side].kind != "interactive":
                raise DoubleSubmissionError(f"side {side} is not interactive")
            if side in self.pending:
                raise DoubleSubmissionError(f"side {side} already acted this turn")
            slots = [int(s[5:]) for s in self.battle.role(side).engine.move_slots()]
            if move not in slots:
                raise LookupError(f"side {side} has no move slot {move}")
            self.pending[side] = move
            self._advance_locked()

    def advance(self):
        with self._lock:
            self._advance_locked()

    def _advance_locked(self):
        while self.battle.outcome is None:
            if self.battle.turn > self.battle.max_turns:
                self.battle.outcome = Outcome.DRAW
                break
            actions: Dict[str, int] = {}
            waiting = False
            for side in ("A", "B"):
                if side in self.pending:
                    actions[side] = self.pending[side]
                    continue
                auto = self._auto_action(side)
                if auto is not None:
                    actions[side] = auto
                    continue
                # interactive side without a submission
                if self.turn_deadline is None:
                    self.turn_deadline = time.monotonic() + self.interactive_timeout
                if time.monotonic() < self.turn_deadline:
                    waiting = True
                    break
                slots = [int(s[5:]) for s in self.battle.role(side).engine.move_slots()]
                actions[side] = self._fallback_rng.choice(slots)
            if waiting:
                break
            self.pending = {}
            self.turn_deadline = None
            step(self.battle, actions["A"], actions["B"])
            if self.interactive:
                break  # one turn per full action set; wait for the next round

    # --- views -------------------------------------------------------------

    def view(self) -> dict:
        b = self.battle
        return {
            "battle_id": self.battle_id,
            "turn": b.turn,
            "outcome": b.outcome.value if b.outcome else None,
            "interactive": self.interactive,
            "awaiting": [
                s for s in ("A", "B")
                if self.policies[s].kind == "interactive" and s not in self.pending and b.outcome is None
            ],
            "sides": {
                s: {
                    "species": b.role(s).species,
                    "hp": b.role(s).hp,
                    "max_hp": b.role(s).max_hp,
                    "types": list(b.role(s).types),
                    "move_slots": [int(m[5:]) for m in b.role(s).engine.move_slots()],
                }
                for s in ("A", "B")
            },
            "events": len(b.events),
        }


class BattleManager:
    def __init__(self, max_concurrent: int, interactive_timeout: float):
        self.sessions: Dict[str, BattleSession] = {}
        self._sem = threading.Semaphore(max_concurrent)
        self._lock = threading.Lock()
        self.interactive_timeout = interactive_timeout

    def create(self, a: EngineState, b: EngineState, seed: int,
               policy_a: PolicySpec, policy_b: PolicySpec, max_turns: int = 100) -> BattleSession:
        battle_id = uuid.uuid4().hex[:12]
        session = BattleSession(battle_id, a, b, seed, policy_a, policy_b,
                                max_turns, self.interactive_timeout)
        with self._lock:
            self.sessions[battle_id] = session
        if not session.interactive:
            with self._sem:
                while session.battle.outcome is None:
                    session.advance()
        else:
            session.advance()
        return session

    def get(self, battle_id: str) -> BattleSession:
        try:
            return self.sessions[battle_id]
        except KeyError:
            raise KeyError(battle_id) from None
