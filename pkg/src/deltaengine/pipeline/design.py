"""Script design and role coding with a text generator.

Designing a script samples exactly ONE pool instance as reference - more
in-context scripts would pull the result toward the examples instead of
the prototype. Coding samples FIVE, because programming rewards accuracy
over creativity. Both calls reprompt once on unusable output, then raise
GenerationError.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import replace
from typing import List, Optional, Protocol, Tuple

from ..dsl import DeltaAst, ParseError, RoleAst, ValidationError, parse, to_source
from ..engine import Author, EngineState, Instruction, init_engine, merge
from ..script import Provenance, RoleScript, ScriptError, role_identifier
from .pool import PoolInstance, SamplePool
from .prototypes import Prototype

DESIGN_TEMPLATE_VERSION = "design-v1"
CODE_TEMPLATE_VERSION = "code-v1"

# rule-based initialization covers the first two moves; everything beyond
# arrives as one increment per move/ability
RULE_BASED_MOVES = 2

_SCRIPT_SCHEMA = """{
  "species": "<name, may contain spaces/hyphens>",
  "types": ["<one or two of the 18 standard types>"],
  "stats": {"hp": <int>, "atk": <int>, "def": <int>, "spa": <int>, "spd": <int>, "spe": <int>},
  "moves": [{"name": "...", "description": "...", "base_power": <int>, "category": "physical|special"}],
  "abilities": [{"name": "...", "description": "..."}]
}"""


class GenerationError(Exception):
    pass


class TextGenerator(Protocol):
    def complete(self, system: str, user: str, temperature: float, max_tokens: int) -> str:
        ...


_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


def _first_block(text: str) -> str:
    m = _FENCE_RE.search(text or "")
    return m.group(1).strip() if m else (text or "").strip()


def _all_blocks(text: str) -> List[str]:
    blocks = [b.strip() for b in _FENCE_RE.findall(text or "")]
    return blocks if blocks else ([_.strip()] if (_ := (text or "").strip()) else [])


def design_role(
    proto: Prototype,
    pool: SamplePool,
    generator: TextGenerator,
    rng: Optional[random.Random] = None,
    provenance: Provenance = Provenance.CODESIGN,
) -> RoleScript:
    """One prototype plus one pool reference in, one parsed script out."""
    if len(pool) < 1:
        raise GenerationError("pool must hold at least one instance")
    rng = rng or random.Random(0)
    reference = pool.sample(rng, 1)[0]
    system = (
        "You design battle roles as JSON scripts. Given a descriptive "
        "prototype, invent a novel role grounded in its notable features. "
        "Respond with exactly one fenced code block containing JSON that "
        "matches this schema:\n" + _SCRIPT_SCHEMA
    )
    user = (
        f"Prototype ({proto.source.value}): {proto.name}\n\n{proto.description}\n\n"
        f"One reference script for format only (do not imitate its content):\n"
        f"```\n{reference.script.to_json()}\n```\n\n"
        "Design the new role script."
    )
    last_error = None
    for attempt in range(2):
        prompt_user = user if attempt == 0 else f"{user}\n\nYour previous answer was unusable ({last_error}); emit valid JSON."
        response = generator.complete(system, prompt_user, temperature=0.7, max_tokens=1024)
        try:
            data = json.loads(_first_block(response))
            data.setdefault("provenance", provenance.value)
            data["provenance"] = provenance.value
            return RoleScript.from_dict(data)
        except (json.JSONDecodeError, ScriptError) as exc:
            last_error = str(exc)
    raise GenerationError(f"script generation failed twice: {last_error}")


def _increment_tasks(script: RoleScript) -> List[Tuple[str, str]]:
    """(kind, instruction) for every scripted feature beyond the rule-based
    initial moves, in script order."""
    tasks = []
    for move in script.moves[RULE_BASED_MOVES:]:
        tasks.append(("move", f"Learn the move {move.name}: {move.description}"))
    for ability in script.abilities:
        tasks.append(("ability", f"Gain the ability {ability.name}: {ability.description}"))
    return tasks


def code_role(
    script: RoleScript,
    pool: SamplePool,
    generator: TextGenerator,
    rng: Optional[random.Random] = None,
) -> EngineState:
    """Program a script: rule-based base for the first two moves, then one
    generated increment per remaining move/ability, folded in order."""
    if len(pool) < 5:
        raise GenerationError("coding needs at least five pool instances")
    rng = rng or random.Random(0)
    references = pool.sample(rng, 5)
    base_script = replace(script, moves=script.moves[:RULE_BASED_MOVES])
    state = init_engine(base_script)
    tasks = _increment_tasks(script)
    if not tasks:
        return state

    role_name = role_identifier(script.species)
    ref_text = "\n\n".join(
        f"Script:\n{r.script.to_json()}\nCode:\n{r.code()}" for r in references
    )
    system = (
        "You program battle role scripts into role code by writing "
        "increments. For each requested feature respond with one fenced "
        "code block containing an `increment` program, in the same order "
        "as requested. New moves fill the next free move_<n> slot."
    )
    feature_list = "\n".join(f"{i + 1}. {text}" for i, (_, text) in enumerate(tasks))
    user = (
        f"Five reference script/code pairs:\n\n{ref_text}\n\n"
        f"Target script:\n{script.to_json()}\n\n"
        f"The role {role_name} already has its first {RULE_BASED_MOVES} moves coded:\n"
        f"```\n{to_source(state.role)}\n```\n\n"
        f"Write one increment per feature, {len(tasks)} blocks total:\n{feature_list}"
    )

    last_error = None
    for attempt in range(2):
        prompt_user = user if attempt == 0 else f"{user}\n\nYour previous answer was unusable ({last_error}); follow the format exactly."
        response = generator.complete(system, prompt_user, temperature=0.2, max_tokens=4096)
        blocks = _all_blocks(response)
        try:
            return _fold_blocks(state, blocks, tasks, role_name)
        except (GenerationError, ParseError, ValidationError) as exc:
            last_error = str(exc)
    raise GenerationError(f"role coding failed twice: {last_error}")


def _fold_blocks(base: EngineState, blocks: List[str], tasks, role_name: str) -> EngineState:
    # tolerate a leading full role restatement, then fold the increments
    if blocks:
        try:
            first = parse(blocks[0])
        except (ParseError, ValidationError):
            first = None
        if isinstance(first, RoleAst):
            if first.name != role_name:
                raise GenerationError(f"role block names {first.name!r}, expected {role_name!r}")
            blocks = blocks[1:]
    if len(blocks) != len(tasks):
        raise GenerationError(f"expected {len(tasks)} increment blocks, got {len(blocks)}")
    state = base
    for block, (_, instruction_text) in zip(blocks, tasks):
        program = parse(block)
        if not isinstance(program, DeltaAst):
            raise GenerationError("expected an increment block")
        state = merge(program, state, Instruction(instruction_text, Author.PIPELINE))
    return state
