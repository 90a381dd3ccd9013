"""Prompt construction for the two-phase protocol, and response extraction.

Phase A sees the skeleton (names and signatures only) and must answer
with a bare list of method names. Phase B sees only the retrieved
implementations plus a grammar cheat-sheet and must answer with exactly
one fenced code block holding an `increment` program.

Rendering is pure: the same inputs and template version produce the same
bytes. Bundles record their template version so runs can be compared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from ..dsl import builtin_cheatsheet

if TYPE_CHECKING:
    from ..engine import Instruction, RetrievedContext, Skeleton

ENTRY_TEMPLATE_VERSION = "entries-v1"
DELTA_TEMPLATE_VERSION = "delta-v1"

_GRAMMAR_CHEATSHEET = """\
increment <RoleName> {
    fn <name>(<params>) {
        <statements>
    }
    ... more fn blocks ...
}

Statements: `let x = expr`, `x = expr`, `self.attr = expr`,
`if expr { ... } else { ... }`, `return expr`, or a bare call.
Expressions: integers, decimals, "strings", true/false, local names,
self.<attr>, foe.<attr>, self.stage.<stat>, foe.stage.<stat>,
battle.turn, arithmetic (+ - * / %), comparisons, and/or/not, calls.
There are no loops and no negative literals (write 0 - 1).
Readable attributes: hp, max_hp, level, atk, def, spa, spd, spe, species.
Redefining an existing method replaces it; new methods are appended.
A new helper method must be called by another method.
New moves must be named move_<next free slot number>.

Builtins:
"""


class EmptyResponseError(Exception):
    pass


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    max_tokens: int
    temperature: float
    template_version: str


def build_entry_prompt(sk: "Skeleton", x: "Instruction") -> PromptBundle:
    """Phase A: which entries matter for this instruction."""
    if not sk.entries:
        raise ValueError("skeleton has no entries")
    system = (
        "You maintain the code of a battle role. Given the structural overview "
        "of the role's methods and a change request, list the method names whose "
        "implementations are needed as context to write the change. Respond with "
        "method names only, one per line, nothing else."
    )
    user = (
        f"Structural overview of role {sk.role_name} (bodies omitted):\n\n"
        f"{sk.render()}\n\n"
        f"Change request: {x.text}\n\n"
        "Method names, one per line:"
    )
    return PromptBundle(system, user, max_tokens=128, temperature=0.0,
                        template_version=ENTRY_TEMPLATE_VERSION)


def build_delta_prompt(ctx: "RetrievedContext", x: "Instruction") -> PromptBundle:
    """Phase B: generate the increment on top of the retrieved methods."""
    if not ctx.entries:
        raise ValueError("retrieved context is empty")
    system = (
        "You grow the code of a battle role by writing increments in its role "
        "language. Reply with exactly one fenced code block containing an "
        "`increment` program and no other code blocks.\n\n"
        "Language reference:\n\n" + _GRAMMAR_CHEATSHEET + builtin_cheatsheet()
    )
    user = (
        f"Current implementations retrieved from role {ctx.role_name}:\n\n"
        f"```\n{ctx.render()}\n```\n\n"
        f"Change request: {x.text}\n\n"
        f"Write the increment for role {ctx.role_name}."
    )
    return PromptBundle(system, user, max_tokens=1024, temperature=0.2,
                        template_version=DELTA_TEMPLATE_VERSION)


_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


def extract_delta(response_text: str) -> str:
    """Content of the first fenced code block; the whole trimmed response
    when there is no fence. Raises EmptyResponseError on blank input."""
    if response_text is None or not response_text.strip():
        raise EmptyResponseError("proxy returned an empty response")
    m = _FENCE_RE.search(response_text)
    if m:
        return m.group(1).strip()
    return response_text.strip()


def parse_entry_response(response_text: str) -> list:
    """Phase-A output: one method name per line. Bullets, backticks and a
    trailing comma are tolerated; anything else on the line disqualifies
    it (prose is not a name). Unresolvable names get dropped by the
    caller, so leniency here would only hide model noise."""
    names = []
    for line in (response_text or "").splitlines():
        cleaned = line.strip().strip("-*").strip().strip("`").rstrip(",").strip()
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", cleaned):
            names.append(cleaned)
    return names
