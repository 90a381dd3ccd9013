import json
import threading
import time
from importlib import resources
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from deltaengine.dsl import parse
from deltaengine.engine import Instruction, init_engine, merge
from deltaengine.script import RoleScript
from deltaengine.service import RoleStore, ServiceConfig, create_app

from conftest import GREEN_BUG

RAY_TABLE = {
    "learn Rayquazalize*": (
        ["get_power", "set_boost"],
        """increment {role} {
    fn move_3(foe) {
        rayquazalize()
    }
    fn rayquazalize() {
        type_change("Dragon")
        set_flag("protected", 1)
    }
}""",
    ),
}


def _schema(name: str) -> dict:
    ref = resources.files("deltaengine.service").joinpath(f"schemas/{name}.json")
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def _check(payload: dict, schema_name: str):
    from referencing import Registry, Resource
    from referencing.jsonschema import DRAFT7

    schema = _schema(schema_name)
    registry = Registry().with_resource(
        "role.json", Resource.from_contents(_schema("role"), default_specification=DRAFT7))
    jsonschema.Draft7Validator(schema, registry=registry).validate(payload)


@pytest.fixture
def client(tmp_path, monkeypatch):
    import deltaengine.service.app as app_mod
    from deltaengine.proxy import ScriptedProxy
    from deltaengine.service.config import ServiceConfig

    config = ServiceConfig(data_dir=str(tmp_path))
    app = create_app(config)
    # swap in a table-backed scripted proxy for evolve tests
    app_after = app
    return TestClient(app)


def _table_client(tmp_path, fallback="identity"):
    from deltaengine.proxy import ScriptedProxy
    import deltaengine.service.config as cfg_mod

    config = ServiceConfig(data_dir=str(tmp_path))
    proxy = ScriptedProxy(RAY_TABLE, fallback=fallback)
    config.build_proxy = lambda: proxy  # type: ignore[method-assign]
    return TestClient(create_app(config))


# --- roles -----------------------------------------------------------------

def test_create_role_and_schema(client):
    r = client.post("/api/roles", json=GREEN_BUG)
    assert r.status_code == 201
    body = r.json()
    _check(body, "role")
    assert body["step"] == 0
    assert [e["name"] for e in body["skeleton"]][:3] == ["get_power", "set_boost", "type_change"]
    assert "move_1" in body["code"] and "move_2" in body["code"]


def test_create_role_missing_stats(client):
    bad = dict(GREEN_BUG, stats={"hp": 45})
    r = client.post("/api/roles", json=bad)
    assert r.status_code == 400
    _check(r.json(), "error")


def test_two_creates_two_ids(client):
    a = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    b = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    assert a != b


def test_get_role_404(client):
    assert client.get("/api/roles/nope").status_code == 404


def test_list_roles(client):
    client.post("/api/roles", json=GREEN_BUG)
    body = client.get("/api/roles").json()
    _check(body, "role_list")
    assert len(body["roles"]) == 1


# --- evolve -----------------------------------------------------------------

def test_evolve_rayquazalize(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    r = client.post(f"/api/roles/{rid}/evolve",
                    json={"instruction": "learn Rayquazalize: switch type and guard"})
    assert r.status_code == 200
    body = r.json()
    _check(body, "evolve_result")
    assert body["delta"].count("fn ") == 2
    assert body["selected_names"] == ["get_power", "set_boost"]
    role = client.get(f"/api/roles/{rid}").json()
    _check(role, "role")
    assert role["step"] == 1
    assert len(role["events"]) == 1
    assert "rayquazalize" in role["code"]
    assert role["toi"]["type_change"] == 1 and role["toi"]["protect"] == 1


def test_evolve_non_executable_is_422_and_atomic(tmp_path):
    client = _table_client(tmp_path, fallback="fail")
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    before = client.get(f"/api/roles/{rid}").json()["code"]
    r = client.post(f"/api/roles/{rid}/evolve", json={"instruction": "unmatched gibberish"})
    assert r.status_code == 422
    _check(r.json(), "error")
    assert r.json()["detail"]["phase"] == "parse"
    after = client.get(f"/api/roles/{rid}").json()
    assert after["code"] == before and after["step"] == 0


def test_evolve_unknown_role_404(client):
    assert client.post("/api/roles/zzz/evolve", json={"instruction": "x"}).status_code == 404


def test_evolve_empty_instruction_400(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    assert client.post(f"/api/roles/{rid}/evolve", json={"instruction": "  "}).status_code == 400


def test_evolve_unknown_author_400(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    r = client.post(f"/api/roles/{rid}/evolve",
                    json={"instruction": "learn Rayquazalize: x", "author": "gremlin"})
    assert r.status_code == 400


def test_evolve_serialized_queueing(tmp_path):
    """Two concurrent evolves: both succeed, history has both, no fork."""
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    results = []

    def hit():
        results.append(client.post(
            f"/api/roles/{rid}/evolve",
            json={"instruction": "learn Rayquazalize: again"}).status_code)

    threads = [threading.Thread(target=hit) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == [200, 200]
    role = client.get(f"/api/roles/{rid}").json()
    assert role["step"] == 2 and len(role["events"]) == 2


def test_evolve_409_when_queueing_disabled(tmp_path):
    from deltaengine.proxy import ScriptedProxy

    release = threading.Event()

    class SlowProxy(ScriptedProxy):
        def generate_delta(self, ctx, instruction):
            release.wait(timeout=5)
            return super().generate_delta(ctx, instruction)

    config = ServiceConfig(data_dir=str(tmp_path), evolve_queueing=False)
    proxy = SlowProxy(RAY_TABLE)
    config.build_proxy = lambda: proxy  # type: ignore[method-assign]
    client = TestClient(create_app(config))
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]

    codes = {}

    def first():
        codes["first"] = client.post(f"/api/roles/{rid}/evolve",
                                     json={"instruction": "learn Rayquazalize: v1"}).status_code

    t = threading.Thread(target=first)
    t.start()
    time.sleep(0.2)  # let the first request take the lock
    second = client.post(f"/api/roles/{rid}/evolve", json={"instruction": "learn Rayquazalize: v2"})
    release.set()
    t.join()
    assert second.status_code == 409
    assert codes["first"] == 200


# --- battles -----------------------------------------------------------------

def test_battle_roundtrip_and_schema(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    r = client.post("/api/battles", json={"role_a": rid, "synth_seed": 4, "seed": 7})
    assert r.status_code == 201
    body = r.json()
    _check(body, "battle")
    assert body["outcome"] in ("win_a", "win_b", "draw")
    log = client.get(f"/api/battles/{body['battle_id']}/log")
    lines = [l for l in log.text.splitlines() if l]
    assert len(lines) == body["events"] + 1  # events plus the outcome line
    for line in lines:
        _check(json.loads(line), "log_event")


def test_battle_determinism_via_api(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    logs = []
    for _ in range(2):
        b = client.post("/api/battles", json={"role_a": rid, "synth_seed": 4, "seed": 7}).json()
        logs.append(client.get(f"/api/battles/{b['battle_id']}/log").text)
    assert logs[0] == logs[1]


def test_battle_requires_opponent(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    assert client.post("/api/battles", json={"role_a": rid, "seed": 1}).status_code == 400
    assert client.post("/api/battles", json={"role_a": "zz", "synth_seed": 1}).status_code == 404


def test_interactive_battle_routing(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    b = client.post("/api/battles", json={
        "role_a": rid, "synth_seed": 4, "seed": 7,
        "policy_a": {"kind": "interactive"},
    }).json()
    assert b["awaiting"] == ["A"]
    bid = b["battle_id"]
    r = client.post(f"/api/battles/{bid}/actions", json={"side": "A", "move": 2})
    assert r.status_code == 200
    log = client.get(f"/api/battles/{bid}/log").text.splitlines()
    uses = [json.loads(l) for l in log if '"move_used"' in l and '"actor":"A"' in l]
    assert uses and uses[0]["payload"]["move"] == "move_2"


def test_interactive_double_submission_409(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    b = client.post("/api/battles", json={
        "role_a": rid, "role_b": rid, "seed": 7,
        "policy_a": {"kind": "interactive"},
        "policy_b": {"kind": "interactive"},
    }).json()
    bid = b["battle_id"]
    assert client.post(f"/api/battles/{bid}/actions", json={"side": "A", "move": 1}).status_code == 200
    assert client.post(f"/api/battles/{bid}/actions", json={"side": "A", "move": 2}).status_code == 409
    # non-interactive side cannot submit either
    b2 = client.post("/api/battles", json={"role_a": rid, "role_b": rid, "seed": 1,
                                           "policy_a": {"kind": "interactive"}}).json()
    assert client.post(f"/api/battles/{b2['battle_id']}/actions",
                       json={"side": "B", "move": 1}).status_code == 409


def test_interactive_timeout_falls_back_to_random(tmp_path):
    from deltaengine.proxy import ScriptedProxy

    config = ServiceConfig(data_dir=str(tmp_path), interactive_timeout=0.05)
    proxy = ScriptedProxy(RAY_TABLE)
    config.build_proxy = lambda: proxy  # type: ignore[method-assign]
    client = TestClient(create_app(config))
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    b = client.post("/api/battles", json={"role_a": rid, "synth_seed": 2, "seed": 5,
                                          "policy_a": {"kind": "interactive"}}).json()
    time.sleep(0.1)
    status = client.get(f"/api/battles/{b['battle_id']}").json()
    assert status["turn"] >= 2 or status["outcome"] is not None


def test_bad_move_index_400(tmp_path):
    client = _table_client(tmp_path)
    rid = client.post("/api/roles", json=GREEN_BUG).json()["role_id"]
    b = client.post("/api/battles", json={"role_a": rid, "role_b": rid, "seed": 1,
                                          "policy_a": {"kind": "interactive"}}).json()
    r = client.post(f"/api/battles/{b['battle_id']}/actions", json={"side": "A", "move": 9})
    assert r.status_code == 400


# --- store / persistence --------------------------------------------------------

def test_store_reload_replays(tmp_path):
    store = RoleStore(tmp_path)
    record = store.create(RoleScript.from_dict(GREEN_BUG))
    state = record.state
    delta = parse("increment GreenBug { fn move_3(foe) { heal(3) } }")
    new_state = merge(delta, state, Instruction("learn healing"), ["move_1"])
    store.append_evolve(record.role_id, Instruction("learn healing"), ["move_1"], delta, new_state)

    again = RoleStore(tmp_path)
    reloaded = again.get(record.role_id)
    assert reloaded.code() == record.code()
    assert reloaded.state.step == 1
    assert reloaded.events[0]["instruction"] == "learn healing"


def test_fsck_clean_and_corrupted(tmp_path):
    store = RoleStore(tmp_path)
    record = store.create(RoleScript.from_dict(GREEN_BUG))
    delta = parse("increment GreenBug { fn move_3(foe) { heal(3) } }")
    new_state = merge(delta, record.state, Instruction("learn healing"))
    store.append_evolve(record.role_id, Instruction("learn healing"), None, delta, new_state)
    assert store.fsck()[record.role_id]["ok"] is True

    events = tmp_path / "roles" / record.role_id / "events.jsonl"
    line = json.loads(events.read_text())
    line["code_hash"] = "0" * 64
    events.write_text(json.dumps(line, sort_keys=True) + "\n")
    fresh = RoleStore(tmp_path)
    report = fresh.fsck()
    assert report[record.role_id]["ok"] is False
    assert "code_hash" in report[record.role_id]["problem"]


def test_snapshot_refresh_on_load(tmp_path):
    store = RoleStore(tmp_path)
    record = store.create(RoleScript.from_dict(GREEN_BUG))
    delta = parse("increment GreenBug { fn move_3(foe) { heal(3) } }")
    new_state = merge(delta, record.state, Instruction("x"))
    store.append_evolve(record.role_id, Instruction("x"), None, delta, new_state)
    snap = tmp_path / "roles" / record.role_id / "snapshot.txt"
    snap.write_text("stale garbage")
    again = RoleStore(tmp_path)
    assert "move_3" in snap.read_text()
    assert again.get(record.role_id).state.step == 1


def test_healthz(client):
    assert client.get("/healthz").json()["ok"] is True
