import random

import pytest

from deltaengine.dsl import DeltaAst, ValidationError, parse, to_source
from deltaengine.engine import (
    Author,
    EngineState,
    Instruction,
    NonExecutableDeltaError,
    TargetMismatchError,
    UnknownEntryError,
    default_hooks,
    evolve_step,
    full_listing,
    init_engine,
    merge,
    replay,
    retrieve,
    skeleton,
    token_count,
)
from deltaengine.evaluation import ProgramGen
from deltaengine.proxy import NON_EXECUTABLE_TEXT, ScriptedProxy
from deltaengine.script import RoleScript, ScriptError

RAYQUAZALIZE = (
    "learn a move Rayquazalize that switches my type to Dragon and protects me from the next attack"
)
RAYQUAZALIZE_DELTA = """increment {role} {
    fn move_3(foe) {
        rayquazalize()
    }
    fn rayquazalize() {
        type_change("Dragon")
        set_flag("protected", 1)
    }
}"""


def rayquaza_proxy():
    return ScriptedProxy({
        RAYQUAZALIZE + "*": (["get_power", "set_boost"], RAYQUAZALIZE_DELTA),
    })


# --- init_engine -----------------------------------------------------------

def test_init_engine_two_moves(green_bug_script):
    state = init_engine(green_bug_script)
    assert state.step == 0 and state.history == ()
    assert [m.name for m in state.role.methods] == ["move_1", "move_2"]
    assert state.role.name == "GreenBug"


def test_init_engine_four_moves(green_bug_script):
    from dataclasses import replace as dc_replace
    from deltaengine.script import MoveSpec

    script = dc_replace(
        green_bug_script,
        moves=tuple(MoveSpec(f"M{i}", base_power=10 * i) for i in range(1, 5)),
    )
    state = init_engine(script)
    assert state.move_slots() == ("move_1", "move_2", "move_3", "move_4")


def test_init_engine_no_moves_fails(green_bug_script):
    from dataclasses import replace as dc_replace

    with pytest.raises(ScriptError):
        init_engine(dc_replace(green_bug_script, moves=()))


def test_init_engine_missing_stats():
    with pytest.raises(ScriptError, match="missing stats"):
        RoleScript.from_dict({
            "species": "X", "types": ["Bug"], "stats": {"hp": 1},
            "moves": [{"name": "m"}],
        })


# --- merge -----------------------------------------------------------------

def test_merge_appends_new_methods(green_bug_state):
    delta = parse(RAYQUAZALIZE_DELTA.replace("{role}", "GreenBug"))
    merged = merge(delta, green_bug_state, Instruction(RAYQUAZALIZE))
    names = [m.name for m in merged.role.methods]
    assert names == ["move_1", "move_2", "move_3", "rayquazalize"]
    assert merged.step == 1 and len(merged.history) == 1
    assert green_bug_state.step == 0  # original untouched


def test_merge_overload_wins_at_lookup(green_bug_state):
    delta = parse("increment GreenBug { fn get_power(m, b) { return b * 2 } }")
    merged = merge(delta, green_bug_state)
    assert merged.lookup("get_power") is delta.methods[0]
    # name set unchanged: the hook was already resolvable
    assert set(merged.resolvable_names()) == set(green_bug_state.resolvable_names())


def test_merge_idempotent_on_content(green_bug_state):
    delta = parse('increment GreenBug { fn move_3(foe) { heal(5) } }')
    once = merge(delta, green_bug_state)
    twice = merge(delta, once)
    assert to_source(once.role) == to_source(twice.role)
    assert twice.step == 2  # history still advances


def test_merge_untouched_methods_byte_identical(green_bug_state):
    delta = parse("increment GreenBug { fn move_1(foe) { heal(1) } }")
    merged = merge(delta, green_bug_state)
    from deltaengine.dsl import format_method

    assert format_method(merged.role.method("move_2")) == format_method(
        green_bug_state.role.method("move_2")
    )


def test_merge_target_mismatch(green_bug_state):
    delta = parse("increment SomebodyElse { fn move_3(foe) { heal(1) } }")
    with pytest.raises(TargetMismatchError):
        merge(delta, green_bug_state)


def test_merge_validates_against_union(green_bug_state):
    dangling = parse("increment GreenBug { fn orphan() { return 1 } }")
    with pytest.raises(ValidationError):
        merge(dangling, green_bug_state)
    unknown_call = parse("increment GreenBug { fn move_3(foe) { not_a_thing() } }")
    with pytest.raises(ValidationError):
        merge(unknown_call, green_bug_state)


def test_replay_reproduces_role(green_bug_state):
    state = green_bug_state
    for i, src in enumerate([
        "increment GreenBug { fn move_3(foe) { heal(5) } }",
        "increment GreenBug { fn get_power(m, b) { return b + 1 } }",
        'increment GreenBug { fn move_4(foe) { deal_damage(10, "special", "Bug") } }',
    ]):
        state = merge(parse(src), state, Instruction(f"step {i}"))
    rebuilt = replay(state.initial_role, state.history)
    assert rebuilt.role == state.role
    assert state.step == len(state.history) == 3


# --- skeleton / retrieve -----------------------------------------------------

def test_skeleton_entries(green_bug_state):
    sk = skeleton(green_bug_state)
    assert sk.names() == ("get_power", "set_boost", "type_change", "move_1", "move_2")
    assert all("{" not in line for line in sk.render().splitlines()[1:-1])


def test_skeleton_gains_merged_entry(green_bug_state):
    merged = merge(parse(RAYQUAZALIZE_DELTA.replace("{role}", "GreenBug")), green_bug_state)
    assert "rayquazalize" in skeleton(merged).names()


def test_skeleton_smaller_than_full_print(green_bug_state):
    assert len(skeleton(green_bug_state).render()) < len(full_listing(green_bug_state))


def test_retrieve_default_hooks(green_bug_state):
    ctx = retrieve(green_bug_state, ["get_power", "set_boost"])
    assert [m.name for m in ctx.entries] == ["get_power", "set_boost"]
    assert "return power" in ctx.render()


def test_retrieve_everything_is_dense(green_bug_state):
    names = green_bug_state.resolvable_names()
    ctx = retrieve(green_bug_state, list(names))
    assert len(ctx.render().split()) <= token_count(green_bug_state)
    assert {m.name for m in ctx.entries} == set(names)


def test_retrieve_override_wins(green_bug_state):
    merged = merge(parse('increment GreenBug { fn type_change(new_type) { set_types("Fire") } }'),
                   green_bug_state)
    ctx = retrieve(merged, ["type_change"])
    assert '"Fire"' in ctx.render()


def test_retrieve_unknown_entry(green_bug_state):
    with pytest.raises(UnknownEntryError) as exc:
        retrieve(green_bug_state, ["move_1", "ghost_method", "other"])
    assert set(exc.value.names) == {"ghost_method", "other"}
    with pytest.raises(UnknownEntryError):
        retrieve(green_bug_state, [])


def test_sparsity_all_names(green_bug_state):
    rng = random.Random(3)
    gen = ProgramGen(rng)
    state = EngineState(role=gen.role())
    names = state.resolvable_names()
    full = token_count(state)
    for k in range(1, len(names) + 1):
        ctx = retrieve(state, list(names[:k]))
        assert len(ctx.render().split()) <= full


# --- evolve_step -------------------------------------------------------------

def test_evolve_step_two_phase(green_bug_state):
    delta, after = evolve_step(green_bug_state, Instruction(RAYQUAZALIZE), rayquaza_proxy())
    assert isinstance(delta, DeltaAst)
    assert {m.name for m in delta.methods} == {"move_3", "rayquazalize"}
    assert after.step == 1
    assert after.history[-1].names == ("get_power", "set_boost")


def test_evolve_step_deterministic(green_bug_state):
    a = evolve_step(green_bug_state, Instruction(RAYQUAZALIZE), rayquaza_proxy())
    b = evolve_step(green_bug_state, Instruction(RAYQUAZALIZE), rayquaza_proxy())
    assert a[0] == b[0]
    assert to_source(a[1].role) == to_source(b[1].role)


def test_evolve_step_non_executable(green_bug_state):
    proxy = ScriptedProxy({}, fallback="fail")
    with pytest.raises(NonExecutableDeltaError) as exc:
        evolve_step(green_bug_state, Instruction("anything"), proxy)
    assert exc.value.phase == "parse"
    assert exc.value.response_text.startswith("this is prose")


def test_evolve_step_validate_failure(green_bug_state):
    proxy = ScriptedProxy({"x*": (["move_1"], "increment GreenBug { fn orphan() { return 1 } }")})
    with pytest.raises(NonExecutableDeltaError) as exc:
        evolve_step(green_bug_state, Instruction("x please"), proxy)
    assert exc.value.phase == "validate"


def test_evolve_step_target_mismatch_is_non_executable(green_bug_state):
    proxy = ScriptedProxy({"x*": (["move_1"], "increment Wrong { fn move_3(foe) { heal(1) } }")})
    with pytest.raises(NonExecutableDeltaError) as exc:
        evolve_step(green_bug_state, Instruction("x please"), proxy)
    assert exc.value.phase == "validate"


def test_evolve_step_repairs_unresolvable_names(green_bug_state):
    proxy = ScriptedProxy({
        RAYQUAZALIZE + "*": (["hallucinated", "get_power"], RAYQUAZALIZE_DELTA),
    })
    _, after = evolve_step(green_bug_state, Instruction(RAYQUAZALIZE), proxy)
    assert after.history[-1].names == ("get_power",)


def test_evolve_step_all_names_unresolvable(green_bug_state):
    proxy = ScriptedProxy({"x*": (["nope", "nada"], RAYQUAZALIZE_DELTA)})
    with pytest.raises(UnknownEntryError):
        evolve_step(green_bug_state, Instruction("x please"), proxy)


def test_identity_fallback_restates_move_1(green_bug_state):
    proxy = ScriptedProxy({})
    delta, after = evolve_step(green_bug_state, Instruction("unmatched instruction"), proxy)
    assert [m.name for m in delta.methods] == ["move_1"]
    assert to_source(after.role) == to_source(green_bug_state.role)


def test_default_hooks_are_fixed():
    hooks = default_hooks()
    assert tuple(h.name for h in hooks) == ("get_power", "set_boost", "type_change")


def test_instruction_requires_text():
    with pytest.raises(ValueError):
        Instruction("   ")
    assert Instruction("go", Author.FUZZER).author is Author.FUZZER
