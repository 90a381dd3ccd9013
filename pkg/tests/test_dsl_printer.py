import random

from deltaengine.dsl import Lit, MethodDef, Return, RoleAst, parse, to_source
from deltaengine.engine import init_engine
from deltaengine.evaluation import ProgramGen, render_noisy
from deltaengine.pipeline import load_seed_instances


def test_roundtrip_on_handwritten_source():
    src = """
role GreenBug {
    let hp_base = 45
    fn move_1(foe) {
        deal_damage(40, "physical", "Bug")
        if chance(0.5) { apply_boost("atk", 1) } else { heal(3) }
    }
}
"""
    ast = parse(src)
    assert parse(to_source(ast)) == ast


def test_declaration_order_preserved():
    ast = RoleAst(
        "X",
        (),
        (
            MethodDef("move_2", ("foe",), (Return(Lit(1, "int")),)),
            MethodDef("move_1", ("foe",), (Return(Lit(2, "int")),)),
        ),
    )
    text = to_source(ast)
    assert text.index("move_2") < text.index("move_1")
    assert parse(text) == ast


def test_field_line_appears_exactly_once(green_bug_state):
    text = to_source(green_bug_state.role)
    assert text.count("let hp_base = 45") == 1


def test_golden_files(golden_dir):
    """Frozen canonical prints of three seed roles, initial and evolved."""
    instances = {i.instance_id: i for i in load_seed_instances()}
    for seed_id in ("seed_00", "seed_04", "seed_11"):
        inst = instances[seed_id]
        initial = to_source(init_engine(inst.script).role)
        evolved = to_source(inst.state.role)
        assert initial == (golden_dir / f"{seed_id}_initial.role").read_text(encoding="utf-8")
        assert evolved == (golden_dir / f"{seed_id}_evolved.role").read_text(encoding="utf-8")


def test_literal_forms():
    ast = parse('role X { let a = 1 let b = 2.5 let c = "s" let d = true let e = false }')
    text = to_source(ast)
    for token in ("= 1", "= 2.5", '= "s"', "= true", "= false"):
        assert token in text
    assert parse(text) == ast


def test_fuzzed_roundtrip_small():
    rng = random.Random(7)
    gen = ProgramGen(rng)
    for _ in range(200):
        program = gen.program()
        noisy = render_noisy(program, rng)
        first = parse(noisy)
        assert first == program
        assert parse(to_source(first)) == first
