from deltaengine.dsl import parse, validate
from deltaengine.dsl.parser import _Parser
from deltaengine.dsl.lexer import tokenize


def _raw(src):
    """Parse without the validation pass, for feeding validate directly."""
    return _Parser(tokenize(src)).parse_program()


def test_clean_role_has_no_diagnostics(green_bug_state):
    assert validate(green_bug_state.role) == []


def test_dangling_helper_in_delta():
    ast = _raw("increment X { fn rage() { return 1 } }")
    diags = validate(ast)
    assert [d.code for d in diags] == ["dangling-method"]
    assert "never called" in diags[0].message


def test_hook_override_is_implicitly_called():
    ast = _raw("increment X { fn get_power(m, b) { return b } }")
    assert validate(ast) == []


def test_move_slot_is_implicitly_called():
    ast = _raw('increment X { fn move_7(foe) { deal_damage(1, "physical", "Bug") } }')
    assert validate(ast) == []


def test_helper_called_by_sibling_is_fine():
    ast = _raw(
        "increment X { fn helper() { return 2 } fn move_3(foe) { let p = helper() "
        'deal_damage(p, "physical", "Bug") } }'
    )
    assert validate(ast) == []


def test_self_recursion_is_still_dangling():
    ast = _raw("increment X { fn loop_it() { loop_it() } }")
    assert any(d.code == "dangling-method" for d in validate(ast))


def test_unknown_identifier():
    ast = _raw("role X { fn f() { return q } }")
    assert any(d.code == "unknown-identifier" for d in validate(ast))


def test_block_scoping_of_let():
    ast = _raw("role X { fn f(c) { if c { let a = 1 } return a } }")
    assert any(d.code == "unknown-identifier" for d in validate(ast))


def test_assignment_to_undeclared_name():
    ast = _raw("role X { fn f() { a = 1 } }")
    assert any(d.code == "unknown-identifier" for d in validate(ast))


def test_duplicate_field_and_param():
    ast = _raw("role X { let a = 1 let a = 2 }")
    assert any(d.code == "duplicate-field" for d in validate(ast))
    ast = _raw("role X { fn f(a, a) { return a } }")
    assert any(d.code == "duplicate-parameter" for d in validate(ast))


def test_builtin_shadowing_rejected():
    ast = _raw("role X { fn chance(p) { return true } fn move_1(foe) { chance(0.1) } }")
    assert any(d.code == "reserved-name" for d in validate(ast))


def test_hook_arity_enforced():
    ast = _raw("increment X { fn get_power(m) { return 1 } }")
    assert any(d.code == "bad-arity" for d in validate(ast))


def test_builtin_arity_enforced():
    ast = _raw('role X { fn move_1(foe) { deal_damage(40, "physical") } }')
    assert any(d.code == "bad-arity" for d in validate(ast))


def test_reserved_self_write_flagged():
    ast = _raw("role X { fn move_1(foe) { self.hp = 999 } }")
    assert any(d.code == "reserved-write" for d in validate(ast))


def test_bad_battle_attribute():
    ast = _raw("role X { fn f() { return battle.weather } }")
    assert any(d.code == "unknown-identifier" for d in validate(ast))


def test_bad_stage_path():
    ast = _raw("role X { fn f() { return self.stage.hp } }")
    assert any(d.code == "bad-path" for d in validate(ast))


def test_context_methods_resolve_foreign_calls():
    ast = _raw("increment X { fn move_3(foe) { boost_helper() } }")
    assert any(d.code == "unknown-call" for d in validate(ast))
    assert validate(ast, context_methods={"boost_helper": 0}, context_called=set()) == []


def test_context_arity_checked():
    ast = _raw("increment X { fn move_3(foe) { boost_helper(1, 2) } }")
    diags = validate(ast, context_methods={"boost_helper": 0}, context_called=set())
    assert any(d.code == "bad-arity" for d in diags)


def test_delta_helper_called_from_context_counts():
    ast = _raw("increment X { fn rage() { return 1 } }")
    assert validate(ast, context_methods={}, context_called={"rage"}) == []


def test_validate_returns_rather_than_raises():
    ast = _raw("role X { fn f() { return q } fn f() { return 2 } }")
    diags = validate(ast)
    assert len(diags) >= 2
