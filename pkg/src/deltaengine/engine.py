"""Engine state and the grow-by-increment cycle.

A state is the full code of one role: the role AST plus the three default
base hooks (get_power, set_boost, type_change). Method lookup resolves
role methods over hooks. Growth is a two-phase protocol against a neural
proxy: the proxy first picks which method entries matter for the
instruction from a bodies-omitted skeleton, then generates an increment
given only those implementations. The increment is merged: existing names
are overloaded, new names appended, and the instruction/selection/delta
triple is recorded so every state can be replayed from its initial code.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Set, Tuple

from .dsl import (
    DeltaAst,
    HOOK_NAMES,
    MethodDef,
    Origin,
    ParseError,
    RoleAst,
    SourceText,
    ValidationError,
    collect_calls,
    format_method,
    parse,
    to_source,
    validate,
)
from .script import RoleScript, role_identifier, validate_script

DEFAULT_MOVE_POWER = 40

_BASE_HOOKS_SOURCE = """
role BaseHooks {
    fn get_power(move, power) {
        return power
    }
    fn set_boost(stat, amount) {
        apply_boost(stat, amount)
    }
    fn type_change(new_type) {
        set_types(new_type)
    }
}
"""


class TargetMismatchError(Exception):
    def __init__(self, target: str, role: str):
        super().__init__(f"increment targets {target!r} but the role is {role!r}")
        self.target = target
        self.role = role


class UnknownEntryError(Exception):
    def __init__(self, names: Sequence[str]):
        super().__init__(f"no such method entries: {', '.join(names) or '(none)'}")
        self.names = list(names)


class NonExecutableDeltaError(Exception):
    """The proxy's response could not be turned into a merged increment.

    phase is "parse" or "validate"; the raw response is kept so failures
    can be inspected and counted rather than retried.
    """

    def __init__(self, phase: str, detail: str, response_text: str = ""):
        super().__init__(f"non-executable increment ({phase}): {detail}")
        self.phase = phase
        self.detail = detail
        self.response_text = response_text


class Author(Enum):
    PLAYER = "player"
    PIPELINE = "pipeline"
    FUZZER = "fuzzer"


@dataclass(frozen=True)
class Instruction:
    text: str
    author: Author = Author.PLAYER

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("instruction text must be non-empty")


@dataclass(frozen=True)
class HistoryEntry:
    instruction: Instruction
    delta: DeltaAst
    # phase-A selection that produced the delta; None when the increment
    # was merged directly (dense context)
    names: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class Skeleton:
    role_name: str
    entries: Tuple[Tuple[str, Tuple[str, ...]], ...]  # (method name, params)

    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def render(self) -> str:
        lines = [f"role {self.role_name} {{"]
        lines += [f"    fn {name}({', '.join(params)})" for name, params in self.entries]
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class RetrievedContext:
    role_name: str
    entries: Tuple[MethodDef, ...]
    source_step: int

    def render(self) -> str:
        return "\n".join(format_method(m, depth=0) for m in self.entries)


@functools.lru_cache(maxsize=1)
def default_hooks() -> Tuple[MethodDef, ...]:
    container = parse(_BASE_HOOKS_SOURCE)
    return container.methods


@dataclass(frozen=True)
class EngineState:
    role: RoleAst
    base_hooks: Tuple[MethodDef, ...] = field(default_factory=default_hooks)
    step: int = 0
    history: Tuple[HistoryEntry, ...] = ()
    # the step-0 role, kept so replay is self-contained
    initial_role: Optional[RoleAst] = None

    def __post_init__(self):
        if self.initial_role is None:
            object.__setattr__(self, "initial_role", self.role)

    def lookup(self, name: str) -> Optional[MethodDef]:
        found = self.role.method(name)
        if found is not None:
            return found
        for h in self.base_hooks:
            if h.name == name:
                return h
        return None

    def resolvable_names(self) -> Tuple[str, ...]:
        names = [h.name for h in self.base_hooks]
        names += [m.name for m in self.role.methods if m.name not in HOOK_NAMES]
        return tuple(names)

    def move_slots(self) -> Tuple[str, ...]:
        """move_<n> methods in slot order."""
        slots = [m.name for m in self.role.methods if m.name.startswith("move_") and m.name[5:].isdigit()]
        return tuple(sorted(slots, key=lambda n: int(n[5:])))


def init_engine(script: RoleScript) -> EngineState:
    """Rule-based initial code: one move_<i> per scripted move, stats and
    types as fields, default hooks installed. No model involved."""
    validate_script(script)
    name = role_identifier(script.species)
    lines = [f"role {name} {{"]
    esc = script.species.replace("\\", "\\\\").replace('"', '\\"')
    lines.append(f'    let species = "{esc}"')
    lines.append(f"    let hp_base = {script.stats['hp']}")
    for key in ("atk", "def", "spa", "spd", "spe"):
        lines.append(f"    let {key} = {script.stats[key]}")
    for i, t in enumerate(script.types, start=1):
        lines.append(f'    let type_{i} = "{t}"')
    primary_type = script.types[0]
    for i, move in enumerate(script.moves, start=1):
        power = move.base_power if move.base_power is not None else DEFAULT_MOVE_POWER
        category = move.category or "physical"
        lines.append(f"    fn move_{i}(foe) {{")
        lines.append(f'        deal_damage({power}, "{category}", "{primary_type}")')
        lines.append("    }")
    lines.append("}")
    role = parse(SourceText("\n".join(lines), Origin.SEED))
    assert isinstance(role, RoleAst)
    return EngineState(role=role)


def _union_context(state: EngineState) -> Tuple[Dict[str, int], Set[str]]:
    arity: Dict[str, int] = {h.name: len(h.params) for h in state.base_hooks}
    called: Set[str] = set()
    for h in state.base_hooks:
        called |= collect_calls(h.body)
    for m in state.role.methods:
        arity[m.name] = len(m.params)
        called |= collect_calls(m.body)
    return arity, called


def merge(
    delta: DeltaAst,
    state: EngineState,
    instruction: Optional[Instruction] = None,
    names: Optional[Sequence[str]] = None,
) -> EngineState:
    """Combine an increment with the current state.

    Methods whose names already resolve replace the previous definition at
    lookup; new names are appended in increment order. Untouched methods
    are carried over structurally unchanged. Raises TargetMismatchError or
    ValidationError (the increment is checked against the real name
    union, dangling helpers included).
    """
    if delta.target != state.role.name:
        raise TargetMismatchError(delta.target, state.role.name)
    arity, called = _union_context(state)
    diagnostics = validate(delta, context_methods=arity, context_called=called)
    if diagnostics:
        raise ValidationError(diagnostics)

    methods = list(state.role.methods)
    index = {m.name: i for i, m in enumerate(methods)}
    for dm in delta.methods:
        if dm.name in index:
            methods[index[dm.name]] = dm
        else:
            # overriding a base hook appends a role-level method, which
            # shadows the hook at lookup without changing the name set
            index[dm.name] = len(methods)
            methods.append(dm)
    new_role = replace(state.role, methods=tuple(methods))
    entry = HistoryEntry(
        instruction=instruction or Instruction("unattributed merge", Author.PIPELINE),
        delta=delta,
        names=tuple(names) if names is not None else None,
    )
    return replace(state, role=new_role, step=state.step + 1, history=state.history + (entry,))


def replay(initial_role: RoleAst, history: Sequence[HistoryEntry]) -> EngineState:
    """Fold merge over a history; the result must equal the live state."""
    state = EngineState(role=initial_role)
    for entry in history:
        state = merge(entry.delta, state, entry.instruction, entry.names)
    return state


def skeleton(state: EngineState) -> Skeleton:
    """Structure-and-signatures view, bodies omitted. Hooks come first in
    their fixed order (showing the overriding signature when shadowed),
    then role methods in declaration order."""
    entries = []
    for hook in HOOK_NAMES:
        resolved = state.lookup(hook)
        entries.append((hook, resolved.params))
    for m in state.role.methods:
        if m.name not in HOOK_NAMES:
            entries.append((m.name, m.params))
    return Skeleton(role_name=state.role.name, entries=tuple(entries))


def retrieve(state: EngineState, names: Sequence[str]) -> RetrievedContext:
    """Full implementations of exactly the named methods (role definitions
    win over base hooks). Raises UnknownEntryError listing every
    unresolvable name."""
    if not names:
        raise UnknownEntryError([])
    unresolved = [n for n in names if state.lookup(n) is None]
    if unresolved:
        raise UnknownEntryError(unresolved)
    seen = set()
    entries = []
    for n in names:
        if n in seen:
            continue
        seen.add(n)
        entries.append(state.lookup(n))
    return RetrievedContext(role_name=state.role.name, entries=tuple(entries), source_step=state.step)


def full_listing(state: EngineState) -> str:
    """The dense view: the whole role program plus any hooks not shadowed
    by it. This is what retrieval is sparse relative to."""
    parts = [to_source(state.role)]
    role_names = {m.name for m in state.role.methods}
    for h in state.base_hooks:
        if h.name not in role_names:
            parts.append(format_method(h, depth=0))
    return "\n".join(parts)


def token_count(state: EngineState) -> int:
    """Engine size as whitespace-delimited lexeme count of the full state."""
    return len(full_listing(state).split())


def evolve_step(state: EngineState, x: Instruction, proxy) -> Tuple[DeltaAst, EngineState]:
    """One growth step: select entries, retrieve, generate, merge.

    proxy implements select_entries(skeleton, instruction) and
    generate_delta(context, instruction). Unresolvable phase-A names are
    dropped once; if nothing survives, UnknownEntryError surfaces. A
    response that fails to parse or validate raises
    NonExecutableDeltaError and leaves the state untouched (no retry, so
    callers can observe first failure).
    """
    from .proxy.prompts import extract_delta

    sk = skeleton(state)
    selected = list(proxy.select_entries(sk, x))
    resolvable = [n for n in selected if state.lookup(n) is not None]
    if not resolvable:
        raise UnknownEntryError(selected)
    context = retrieve(state, resolvable)
    response = proxy.generate_delta(context, x)
    source = extract_delta(response)
    try:
        program = parse(SourceText(source, Origin.PROXY_RESPONSE))
    except ParseError as exc:
        raise NonExecutableDeltaError("parse", str(exc), source) from exc
    except ValidationError as exc:
        raise NonExecutableDeltaError("validate", str(exc), source) from exc
    if not isinstance(program, DeltaAst):
        raise NonExecutableDeltaError("parse", "response is a full role, not an increment", source)
    try:
        new_state = merge(program, state, instruction=x, names=resolvable)
    except TargetMismatchError as exc:
        raise NonExecutableDeltaError("validate", str(exc), source) from exc
    except ValidationError as exc:
        raise NonExecutableDeltaError("validate", str(exc), source) from exc
    return program, new_state
