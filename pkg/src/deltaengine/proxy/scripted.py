"""Deterministic stand-in proxy driven by an instruction-pattern table.

Patterns match instruction text exactly, or by prefix when they end with
`*`. Each pattern maps to the entry names to select and the increment
source to return. Unmatched instructions fall back to either an identity
increment (re-stating the first retrieved method verbatim) or, when
fallback="fail", deliberately unparseable text so failure paths can be
exercised.
"""

from __future__ import annotations

import json
from typing import TYPE_CHECKING, Dict, Sequence, Tuple

from ..dsl import format_method

if TYPE_CHECKING:
    from ..engine import Instruction, RetrievedContext, Skeleton

NON_EXECUTABLE_TEXT = "this is prose, definitely not an increment {"


class ScriptedProxy:
    def __init__(self, table: Dict[str, Tuple[Sequence[str], str]], fallback: str = "identity"):
        if not table and fallback not in ("identity", "fail"):
            raise ValueError("scripted proxy needs a table or a valid fallback")
        if fallback not in ("identity", "fail"):
            raise ValueError(f"unknown fallback {fallback!r}")
        self.table = dict(table)
        self.fallback = fallback

    @classmethod
    def from_file(cls, path: str, fallback: str = "identity") -> "ScriptedProxy":
        """Table file: JSON list of {pattern, names, delta} objects."""
        with open(path, "r", encoding="utf-8") as fh:
            rows = json.load(fh)
        table = {row["pattern"]: (row["names"], row["delta"]) for row in rows}
        return cls(table, fallback=fallback)

    def _match(self, text: str):
        if text in self.table:
            return self.table[text]
        for pattern, value in self.table.items():
            if pattern.endswith("*") and text.startswith(pattern[:-1]):
                return value
        return None

    def select_entries(self, sk: "Skeleton", instruction: "Instruction") -> Sequence[str]:
        hit = self._match(instruction.text)
        if hit is not None:
            return list(hit[0])
        names = sk.names()
        if "move_1" in names:
            return ["move_1"]
        return [names[0]] if names else []

    def generate_delta(self, context: "RetrievedContext", instruction: "Instruction") -> str:
        hit = self._match(instruction.text)
        if hit is not None:
            return hit[1].replace("{role}", context.role_name)
        if self.fallback == "fail":
            return NON_EXECUTABLE_TEXT
        first = context.entries[0]
        body = format_method(first, depth=1)
        return f"```\nincrement {context.role_name} {{\n{body}\n}}\n```"
