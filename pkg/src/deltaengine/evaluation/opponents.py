"""Rule-based opponent synthesis and the bundled move/ability database.

Opponents are plain rule-initialized roles: random types, stats uniform
in [40, 120], 2-4 moves sampled from the database. Fully deterministic
per seed, no model involved. The database's descriptions double as the
instruction pool for the scaling experiment.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from typing import List, Tuple

from ..engine import EngineState, init_engine
from ..script import MoveSpec, Provenance, RoleScript
from ..battle.typechart import all_types

STAT_RANGE = (40, 120)


@dataclass(frozen=True)
class MoveDbEntry:
    name: str
    description: str
    base_power: int
    category: str


@dataclass(frozen=True)
class AbilityDbEntry:
    name: str
    description: str


@dataclass(frozen=True)
class MoveDatabase:
    moves: Tuple[MoveDbEntry, ...]
    abilities: Tuple[AbilityDbEntry, ...]

    def instruction_pool(self) -> List[str]:
        pool = [
            f"Learn a new move {m.name}: {m.description}" for m in self.moves
        ]
        pool += [
            f"Gain the ability {a.name}: {a.description}" for a in self.abilities
        ]
        return pool


def load_move_db() -> MoveDatabase:
    ref = resources.files("deltaengine.evaluation").joinpath("data/move_db.json")
    with ref.open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    moves = tuple(
        MoveDbEntry(m["name"], m["description"], m["base_power"], m["category"])
        for m in raw["moves"]
    )
    abilities = tuple(AbilityDbEntry(a["name"], a["description"]) for a in raw["abilities"])
    return MoveDatabase(moves, abilities)


def synth_script(seed: int, database: MoveDatabase | None = None) -> RoleScript:
    db = database or load_move_db()
    rng = random.Random(seed)
    types = rng.sample(all_types(), rng.choice((1, 1, 2)))
    stats = {k: rng.randint(*STAT_RANGE) for k in ("hp", "atk", "def", "spa", "spd", "spe")}
    picks = rng.sample(db.moves, rng.randint(2, 4))
    moves = tuple(
        MoveSpec(name=m.name, description=m.description, base_power=m.base_power, category=m.category)
        for m in picks
    )
    return RoleScript(
        species=f"Synth-{seed}",
        types=tuple(types),
        stats=stats,
        moves=moves,
        provenance=Provenance.SYNTHETIC,
    )


def synth_opponent(seed: int, database: MoveDatabase | None = None) -> EngineState:
    return init_engine(synth_script(seed, database))
