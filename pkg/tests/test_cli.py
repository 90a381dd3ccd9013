import json
from pathlib import Path

import pytest

from deltaengine.cli import main

from conftest import GREEN_BUG


@pytest.fixture
def data_dir(tmp_path):
    return str(tmp_path / "dd")


def _create_role(tmp_path, data_dir, capsys) -> str:
    script = tmp_path / "bug.json"
    script.write_text(json.dumps(GREEN_BUG), encoding="utf-8")
    assert main(["role", "create", "--script", str(script), "--data-dir", data_dir]) == 0
    return json.loads(capsys.readouterr().out)["role_id"]


def test_role_create_show_list(tmp_path, data_dir, capsys):
    rid = _create_role(tmp_path, data_dir, capsys)
    assert main(["role", "show", "--id", rid, "--data-dir", data_dir]) == 0
    view = json.loads(capsys.readouterr().out)
    assert view["step"] == 0 and "move_2" in view["code"]
    assert main(["role", "list", "--data-dir", data_dir]) == 0
    assert rid in capsys.readouterr().out


def test_role_evolve_with_table(tmp_path, data_dir, capsys):
    rid = _create_role(tmp_path, data_dir, capsys)
    table = tmp_path / "table.json"
    table.write_text(json.dumps([{
        "pattern": "toughen up*",
        "names": ["set_boost"],
        "delta": 'increment {role} { fn move_3(foe) { apply_boost("def", 1) } }',
    }]), encoding="utf-8")
    rc = main(["role", "evolve", "--id", rid, "--instruction", "toughen up please",
               "--data-dir", data_dir, "--proxy-table", str(table)])
    assert rc == 0
    assert "move_3" in capsys.readouterr().out
    main(["role", "show", "--id", rid, "--data-dir", data_dir])
    assert json.loads(capsys.readouterr().out)["step"] == 1


def test_battle_run(tmp_path, data_dir, capsys):
    rid = _create_role(tmp_path, data_dir, capsys)
    out = tmp_path / "log.jsonl"
    rc = main(["battle", "run", "--role-a", rid, "--synth-seed", "3", "--seed", "5",
               "--data-dir", data_dir, "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines and all(json.loads(l)["kind"] for l in lines)


def test_eval_exe_seed_pool(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["eval", "exe", "--seed-pool", "--opponents", "3", "--seed", "1", "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "exe_report.json").read_text())
    assert report["exe_percent"] == 100.0


def test_eval_acc_mock(tmp_path, capsys):
    pairs = tmp_path / "pairs.jsonl"
    code = 'role X { fn move_1(foe) { deal_damage(40, "physical", "Bug") } }'
    pairs.write_text(json.dumps({"id": "p0", "candidate": code, "reference": code}) + "\n")
    out = tmp_path / "out"
    assert main(["eval", "acc", "--pairs", str(pairs), "--judge", "mock", "--out", str(out)]) == 0
    report = json.loads((out / "acc_report.json").read_text())
    assert report["acc_percent"] == 100.0


def test_eval_scale(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["eval", "scale", "--runs", "2", "--max-steps", "3", "--seed", "2", "--out", str(out)])
    assert rc == 0
    assert (out / "steps_hist.csv").exists()
    assert (out / "size_hist.csv").exists()
    report = json.loads((out / "scale_report.json").read_text())
    assert report["total"] == 2


def test_data_tag(tmp_path, capsys):
    roles = tmp_path / "roles"
    roles.mkdir()
    (roles / "a.role").write_text(
        'role A { fn move_1(foe) { if chance(0.5) { heal(1) } } }', encoding="utf-8")
    assert main(["data", "tag", "--roles", str(roles)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert set(result["a.role"]["tags"]) == {"conditional_logic", "rng_use", "heal"}


def test_data_split(tmp_path, data_dir, capsys):
    rid = _create_role(tmp_path, data_dir, capsys)
    table = tmp_path / "table.json"
    table.write_text(json.dumps([{
        "pattern": "toughen up*",
        "names": ["set_boost"],
        "delta": 'increment {role} { fn move_3(foe) { apply_boost("def", 1) } }',
    }]), encoding="utf-8")
    main(["role", "evolve", "--id", rid, "--instruction", "toughen up please",
          "--data-dir", data_dir, "--proxy-table", str(table)])
    capsys.readouterr()
    out = tmp_path / "samples.jsonl"
    assert main(["data", "split", "--roles", data_dir, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 1
    sample = json.loads(lines[0])
    assert sample["role_id"] == rid and "move_3" in sample["delta_source"]


def test_data_generate_mock(tmp_path, capsys):
    from importlib import resources

    corpus = resources.files("deltaengine.pipeline").joinpath("data/corpus")
    pool_dir = tmp_path / "pool"
    rc = main(["data", "generate", "--prototypes", str(corpus), "--pool", str(pool_dir),
               "--count", "1", "--mode", "synthetic", "--generator", "mock", "--seed", "4"])
    assert rc == 0
    assert "admitted 1/1" in capsys.readouterr().out
    assert (pool_dir / "admissions.jsonl").exists()


def test_fsck_cli(tmp_path, data_dir, capsys):
    _create_role(tmp_path, data_dir, capsys)
    assert main(["fsck", "--data-dir", data_dir]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all(v["ok"] for v in report.values())


def test_missing_script_file_errors(tmp_path, data_dir, capsys):
    assert main(["role", "create", "--script", str(tmp_path / "nope.json"),
                 "--data-dir", data_dir]) == 1
    assert "error:" in capsys.readouterr().err
