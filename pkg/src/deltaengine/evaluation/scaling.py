"""Scaling experiment: grow one role until the proxy's response stops
being executable.

Each run starts from a seeded synthetic role. At every step a random
move/ability description sampled from the database becomes the
instruction. A response is non-executable when it fails to parse, fails
validation, or the merged role fails a smoke battle (one fixed battle
exercising every move slot once against a passive reference dummy).
steps_completed counts the step at which scaling stopped, i.e. the
failing attempt (or max_steps when nothing failed). The patchwork role is
kept on the trace for inspection.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..engine import (
    EngineState,
    Instruction,
    Author,
    NonExecutableDeltaError,
    UnknownEntryError,
    evolve_step,
    retrieve,
    token_count,
)
from ..script import RoleScript
from ..battle.host import BattleState, execute_action
from ..battle.interpreter import RoleRuntimeError
from .opponents import MoveDatabase, load_move_db, synth_opponent, synth_script

SIZE_BUCKET = 1000

_SMOKE_DUMMY_SCRIPT = {
    "species": "Smoke-Dummy",
    "types": ["Normal"],
    "stats": {"hp": 200, "atk": 50, "def": 50, "spa": 50, "spd": 50, "spe": 1},
    "moves": [{"name": "Poke", "description": "A harmless poke.", "base_power": 0}],
}


def smoke_battle(state: EngineState, seed: int = 0) -> Optional[RoleRuntimeError]:
    """Execute every move slot of the role once against a passive dummy,
    restoring hit points between slots. Returns the first runtime error
    attributed to the role, or None."""
    from ..engine import init_engine

    dummy = init_engine(RoleScript.from_dict(_SMOKE_DUMMY_SCRIPT))
    battle = BattleState(state, dummy, seed=seed)
    for slot in state.move_slots():
        err = execute_action(battle, "A", int(slot[5:]))
        if err is not None:
            return err
        battle.side_a.hp = battle.side_a.max_hp
        battle.side_b.hp = battle.side_b.max_hp
    return None


@dataclass(frozen=True)
class StepStat:
    step: int
    context_tokens: int
    full_tokens: int
    method_count: int


@dataclass(frozen=True)
class ScalingTrace:
    run_id: int
    steps_completed: int
    engine_size_at_failure: int
    failure_kind: str  # "parse" | "validate" | "smoke_battle" | "maxed"
    steps: Tuple[StepStat, ...]
    final_state: EngineState = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "steps_completed": self.steps_completed,
            "engine_size_at_failure": self.engine_size_at_failure,
            "failure_kind": self.failure_kind,
            "steps": [
                {
                    "step": s.step,
                    "context_tokens": s.context_tokens,
                    "full_tokens": s.full_tokens,
                    "method_count": s.method_count,
                }
                for s in self.steps
            ],
        }


def scaling_run(proxy, database: Optional[MoveDatabase] = None, seed: int = 0,
                max_steps: int = 40, run_id: int = 0) -> ScalingTrace:
    db = database or load_move_db()
    pool = db.instruction_pool()
    if not pool:
        raise ValueError("instruction database is empty")
    rng = random.Random(seed)
    state = synth_opponent(seed, db)
    stats: List[StepStat] = []
    for attempt in range(1, max_steps + 1):
        text = rng.choice(pool)
        instruction = Instruction(text, Author.FUZZER)
        before = state
        try:
            _, state = evolve_step(state, instruction, proxy)
        except NonExecutableDeltaError as exc:
            return ScalingTrace(run_id, attempt, token_count(before), exc.phase, tuple(stats), before)
        except UnknownEntryError:
            return ScalingTrace(run_id, attempt, token_count(before), "validate", tuple(stats), before)
        entry = state.history[-1]
        names = entry.names or state.resolvable_names()
        context = retrieve(before, list(names))
        stats.append(
            StepStat(
                step=attempt,
                context_tokens=len(context.render().split()),
                full_tokens=token_count(before),
                method_count=len(before.resolvable_names()),
            )
        )
        if smoke_battle(state) is not None:
            return ScalingTrace(run_id, attempt, token_count(state), "smoke_battle", tuple(stats), state)
    return ScalingTrace(run_id, max_steps, token_count(state), "maxed", tuple(stats), state)


@dataclass(frozen=True)
class ScalingHistogram:
    by_steps: Tuple[Tuple[int, int], ...]       # (steps_completed, count) over failed runs
    by_size: Tuple[Tuple[int, int], ...]        # (bucket start, count) over failed runs
    maxed_count: int
    total: int

    def steps_csv(self) -> str:
        return _csv(("steps", "count"), self.by_steps)

    def size_csv(self) -> str:
        return _csv(("size_bucket_start", "count"), self.by_size)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def scaling_histogram(traces: Sequence[ScalingTrace]) -> ScalingHistogram:
    """Marginal failure histograms by step and by engine-size bucket.
    Runs that reached max_steps without failing are counted separately."""
    if not traces:
        raise ValueError("no traces")
    steps: Dict[int, int] = {}
    sizes: Dict[int, int] = {}
    maxed = 0
    for t in traces:
        if t.failure_kind == "maxed":
            maxed += 1
            continue
        steps[t.steps_completed] = steps.get(t.steps_completed, 0) + 1
        bucket = (t.engine_size_at_failure // SIZE_BUCKET) * SIZE_BUCKET
        sizes[bucket] = sizes.get(bucket, 0) + 1
    return ScalingHistogram(
        by_steps=tuple(sorted(steps.items())),
        by_size=tuple(sorted(sizes.items())),
        maxed_count=maxed,
        total=len(traces),
    )
