"""Role scripts: the structured natural-language description of a role.

A script is what a player (or the design pipeline) provides before any
code exists: species, types, the six base stats, move and ability
descriptions. Serialized as a JSON document with snake_case keys.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .battle.typechart import is_type

STAT_KEYS = ("hp", "atk", "def", "spa", "spd", "spe")


class ScriptError(Exception):
    pass


class Provenance(Enum):
    SEED = "seed"
    SYNTHETIC = "synthetic"
    CODESIGN = "codesign"
    VOLUNTEER = "volunteer"


@dataclass(frozen=True)
class MoveSpec:
    name: str
    description: str = ""
    base_power: Optional[int] = None
    category: Optional[str] = None  # "physical" | "special"


@dataclass(frozen=True)
class AbilitySpec:
    name: str
    description: str = ""


@dataclass(frozen=True)
class RoleScript:
    species: str
    types: Tuple[str, ...]
    stats: dict  # all six of STAT_KEYS -> positive int
    moves: Tuple[MoveSpec, ...]
    abilities: Tuple[AbilitySpec, ...] = ()
    provenance: Provenance = Provenance.SEED

    def to_dict(self) -> dict:
        d = asdict(self)
        d["types"] = list(self.types)
        d["moves"] = [
            {k: v for k, v in m.items() if v is not None} for m in d["moves"]
        ]
        d["provenance"] = self.provenance.value
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RoleScript":
        if not isinstance(data, dict):
            raise ScriptError("role script must be a JSON object")
        try:
            species = data["species"]
            types = data["types"]
            stats = data["stats"]
            moves = data["moves"]
        except KeyError as exc:
            raise ScriptError(f"role script missing field {exc.args[0]!r}") from None
        move_specs = []
        for i, m in enumerate(moves if isinstance(moves, list) else []):
            if not isinstance(m, dict) or "name" not in m:
                raise ScriptError(f"move #{i + 1} must be an object with a name")
            move_specs.append(
                MoveSpec(
                    name=str(m["name"]),
                    description=str(m.get("description", "")),
                    base_power=m.get("base_power"),
                    category=m.get("category"),
                )
            )
        abilities = tuple(
            AbilitySpec(name=str(a["name"]), description=str(a.get("description", "")))
            for a in data.get("abilities", [])
        )
        try:
            provenance = Provenance(data.get("provenance", "seed"))
        except ValueError:
            raise ScriptError(f"unknown provenance {data.get('provenance')!r}") from None
        script = cls(
            species=str(species),
            types=tuple(types) if isinstance(types, list) else (),
            stats=dict(stats) if isinstance(stats, dict) else {},
            moves=tuple(move_specs),
            abilities=abilities,
            provenance=provenance,
        )
        validate_script(script)
        return script

    @classmethod
    def from_json(cls, text: str) -> "RoleScript":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


def validate_script(script: RoleScript) -> None:
    """Raise ScriptError unless the script can initialize an engine."""
    if not script.species.strip():
        raise ScriptError("species must be non-empty")
    if not 1 <= len(script.types) <= 2:
        raise ScriptError("a role has 1 or 2 types")
    for t in script.types:
        if not is_type(t):
            raise ScriptError(f"unknown type {t!r}")
    missing = [k for k in STAT_KEYS if k not in script.stats]
    if missing:
        raise ScriptError(f"missing stats: {', '.join(missing)}")
    for k in STAT_KEYS:
        v = script.stats[k]
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ScriptError(f"stat {k!r} must be a positive integer")
    if not script.moves:
        raise ScriptError("a role needs at least one move")
    for m in script.moves:
        if not m.name.strip():
            raise ScriptError("move names must be non-empty")
        if m.base_power is not None and (not isinstance(m.base_power, int) or m.base_power < 0):
            raise ScriptError(f"move {m.name!r}: base_power must be a non-negative integer")
        if m.category is not None and m.category not in ("physical", "special"):
            raise ScriptError(f"move {m.name!r}: category must be 'physical' or 'special'")


def role_identifier(species: str) -> str:
    """Turn a species label into a role identifier: 'Green-Bug' -> 'GreenBug'."""
    chunks = re.split(r"[^0-9A-Za-z]+", species)
    ident = "".join(c[:1].upper() + c[1:] for c in chunks if c)
    if not ident:
        raise ScriptError(f"species {species!r} yields no identifier")
    if ident[0].isdigit():
        ident = "R" + ident
    return ident
