"""Command-line interface.

    deltaengine serve --config FILE
    deltaengine role create|evolve|show|list ...
    deltaengine battle run ...
    deltaengine eval exe|acc|scale ...
    deltaengine data generate|tag|split|fetch ...
    deltaengine fsck --data-dir DIR
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .dsl import ParseError, ValidationError, parse, to_source
from .engine import Author, EngineState, Instruction, NonExecutableDeltaError, UnknownEntryError, evolve_step
from .script import RoleScript, ScriptError


def _load_store(data_dir: str):
    from .service.store import RoleStore

    return RoleStore(data_dir)


def _build_cli_proxy(args):
    from .proxy import HttpChatProxy, ProxyConfig, ScriptedProxy

    mode = getattr(args, "proxy", "scripted")
    if mode == "http":
        return HttpChatProxy(ProxyConfig.from_env())
    table = getattr(args, "proxy_table", None)
    if table:
        return ScriptedProxy.from_file(table)
    return ScriptedProxy({}, fallback="identity")


# --- serve -------------------------------------------------------------

def cmd_serve(args):
    import uvicorn

    from .service import create_app, load_config

    config = load_config(args.config)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


# --- role --------------------------------------------------------------

def cmd_role_create(args):
    store = _load_store(args.data_dir)
    script = RoleScript.from_json(Path(args.script).read_text(encoding="utf-8"))
    record = store.create(script)
    print(json.dumps({"role_id": record.role_id, "code": record.code()}, indent=2))


def cmd_role_evolve(args):
    store = _load_store(args.data_dir)
    record = store.get(args.id)
    proxy = _build_cli_proxy(args)
    instruction = Instruction(args.instruction, Author.PLAYER)
    try:
        delta, new_state = evolve_step(record.state, instruction, proxy)
    except (NonExecutableDeltaError, UnknownEntryError) as exc:
        print(f"evolve failed: {exc}", file=sys.stderr)
        return 1
    store.append_evolve(args.id, instruction, new_state.history[-1].names, delta, new_state)
    print(to_source(delta))


def cmd_role_show(args):
    store = _load_store(args.data_dir)
    record = store.get(args.id)
    from .service.app import role_view

    print(json.dumps(role_view(record), indent=2))


def cmd_role_list(args):
    store = _load_store(args.data_dir)
    for rid in store.list_ids():
        record = store.get(rid)
        print(f"{rid}  {record.script.species}  step={record.state.step}")


# --- battle ------------------------------------------------------------

def _policy_from_arg(text: str, seed: int):
    from .battle import make_random_policy, make_scripted_policy

    if text == "random":
        return make_random_policy(seed)
    return make_scripted_policy([int(x) for x in text.split(",")])


def cmd_battle_run(args):
    from .battle import run_battle
    from .evaluation import synth_opponent

    store = _load_store(args.data_dir)
    state_a = store.get(args.role_a).state
    if args.role_b:
        state_b = store.get(args.role_b).state
    else:
        state_b = synth_opponent(args.synth_seed)
    log = run_battle(
        state_a, state_b,
        _policy_from_arg(args.policy_a, args.seed * 2 + 1),
        _policy_from_arg(args.policy_b, args.seed * 2 + 2),
        seed=args.seed, max_turns=args.max_turns,
    )
    out = args.out or "-"
    text = log.to_jsonl()
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
    print(f"outcome: {log.outcome.value} in {log.turns} turn(s)", file=sys.stderr)


# --- eval --------------------------------------------------------------

def _roles_for_eval(args) -> dict:
    if getattr(args, "seed_pool", False):
        from .pipeline import load_seed_instances

        return {inst.instance_id: inst.state for inst in load_seed_instances()}
    store = _load_store(args.roles)
    return {rid: store.get(rid).state for rid in store.list_ids()}


def _write_out(out_dir: str, name: str, text: str):
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text, encoding="utf-8")
    print(f"wrote {path / name}")


def cmd_eval_exe(args):
    from .evaluation import exe_rate

    roles = _roles_for_eval(args)
    report = exe_rate(roles, n_opponents=args.opponents, seed=args.seed)
    _write_out(args.out, "exe_report.json", json.dumps(report.to_dict(), indent=2))
    print(f"Exe% = {report.exe_percent:.1f} over {len(roles)} role(s)")


def cmd_eval_acc(args):
    from .evaluation import LlmJudge, MockJudge, acc_rate
    from .proxy import ChatClient, ProxyConfig

    pairs = []
    with open(args.pairs, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            cand = parse(row["candidate"])
            ref = parse(row["reference"])
            pairs.append((row["id"], EngineState(role=cand), EngineState(role=ref)))
    judge = MockJudge() if args.judge == "mock" else LlmJudge(ChatClient(ProxyConfig.from_env()))
    report = acc_rate(pairs, judge)
    _write_out(args.out, "acc_report.json", json.dumps(report.to_dict(), indent=2))
    print(f"Acc% = {report.acc_percent:.1f} over {report.evaluated} pair(s), {len(report.abstained)} abstained")


def cmd_eval_scale(args):
    from .evaluation import load_move_db, scaling_histogram, scaling_run

    proxy = _build_cli_proxy(args)
    db = load_move_db()
    traces = []
    for run in range(args.runs):
        traces.append(scaling_run(proxy, db, seed=args.seed + run, max_steps=args.max_steps, run_id=run))
    hist = scaling_histogram(traces)
    _write_out(args.out, "scale_report.json",
               json.dumps({"maxed": hist.maxed_count, "total": hist.total,
                           "traces": [t.to_dict() for t in traces]}, indent=2))
    _write_out(args.out, "steps_hist.csv", hist.steps_csv())
    _write_out(args.out, "size_hist.csv", hist.size_csv())
    print(f"{hist.total} runs, {hist.maxed_count} reached max steps")


# --- data --------------------------------------------------------------

class _MockGenerator:
    """Dry-run generator: designs a minimal script named after the
    prototype and codes abilities as simple boost increments."""

    def complete(self, system: str, user: str, temperature: float, max_tokens: int) -> str:
        if "Design the new role script" in user:
            name = "Mock-Design"
            for line in user.splitlines():
                if line.startswith("Prototype"):
                    name = line.split(":", 2)[-1].strip().split()[0]
            script = {
                "species": f"Neo-{name}",
                "types": ["Normal"],
                "stats": {"hp": 70, "atk": 70, "def": 70, "spa": 70, "spd": 70, "spe": 70},
                "moves": [
                    {"name": "Tackle", "description": "A plain hit.", "base_power": 40, "category": "physical"},
                    {"name": "Focus", "description": "Gather strength.", "base_power": 0, "category": "physical"},
                    {"name": "Wild Swing", "description": "A heavy swing.", "base_power": 70, "category": "physical"},
                ],
                "abilities": [{"name": "Steady", "description": "Keeps its footing, slowly powering up."}],
            }
            return "```\n" + json.dumps(script, indent=2) + "\n```"
        # coding prompt: emit one increment per requested feature
        import re

        role = re.search(r"The role (\w+)", user).group(1)
        count = len(re.findall(r"^\d+\. ", user, flags=re.M))
        blocks = []
        for i in range(count):
            blocks.append(
                f"```\nincrement {role} {{\n    fn move_{3 + i}(foe) {{\n"
                f"        apply_boost(\"atk\", 1)\n"
                f"        if chance(0.25) {{\n            set_foe_flag(\"rattled\", 2)\n        }}\n"
                f"        deal_damage(40, \"physical\", \"Normal\")\n    }}\n}}\n```"
            )
        return "\n".join(blocks)


def cmd_data_generate(args):
    from .pipeline import (
        ApprovalQueue,
        SamplePool,
        code_role,
        design_role,
        filter_instance,
        load_prototypes,
    )
    from .proxy import ChatClient, ProxyConfig
    from .script import Provenance

    protos = load_prototypes(args.prototypes)
    if not protos:
        print("no prototypes found", file=sys.stderr)
        return 1
    pool = SamplePool(args.pool)
    generator = _MockGenerator() if args.generator == "mock" else ChatClient(ProxyConfig.from_env())
    provenance = Provenance.CODESIGN if args.mode == "codesign" else Provenance.SYNTHETIC
    checkpoint = args.mode == "codesign"
    queue = ApprovalQueue(Path(args.pool) / "approval_queue.jsonl") if checkpoint else None
    rng = random.Random(args.seed)
    made = 0
    for i in range(args.count):
        proto = protos[i % len(protos)]
        script = design_role(proto, pool, generator, rng, provenance=provenance)
        state = code_role(script, pool, generator, rng)
        result = filter_instance(script, state, threshold=args.threshold,
                                 checkpoint=checkpoint, queue=queue)
        if result.accepted:
            pool.admit(script, state)
            made += 1
            status = "admitted" + (" (pending review)" if result.pending_id else "")
        else:
            status = f"rejected: {result.reason}"
        print(f"[{i + 1}/{args.count}] {script.species}: {status}")
    print(f"admitted {made}/{args.count}; pool size {len(pool)}")


def cmd_data_tag(args):
    from .pipeline import tag_interest

    results = {}
    for file in sorted(Path(args.roles).glob("*")):
        if file.suffix not in (".role", ".txt"):
            continue
        try:
            program = parse(file.read_text(encoding="utf-8"))
        except (ParseError, ValidationError) as exc:
            results[file.name] = {"error": str(exc)}
            continue
        toi = tag_interest(EngineState(role=program))
        results[file.name] = {"magnitude": toi.magnitude, "tags": list(toi.tags())}
    print(json.dumps(results, indent=2))


def cmd_data_split(args):
    from .pipeline import split_samples, write_dataset

    store = _load_store(args.roles)
    samples = []
    for rid in store.list_ids():
        record = store.get(rid)
        if record.state.history:
            samples.extend(split_samples(record.script, record.state, role_id=rid))
    n = write_dataset(samples, args.out)
    print(f"wrote {n} sample(s) to {args.out}")


def cmd_data_fetch(args):
    from .pipeline import fetch_prototype

    path = fetch_prototype(args.title, args.corpus)
    print(f"wrote {path}")


def cmd_fsck(args):
    store = _load_store(args.data_dir)
    report = store.fsck()
    print(json.dumps(report, indent=2))
    return 0 if all(r["ok"] for r in report.values()) else 1


# --- parser wiring -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deltaengine", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", default=None)
    serve.set_defaults(fn=cmd_serve)

    role = sub.add_parser("role", help="manage persisted roles")
    role_sub = role.add_subparsers(dest="role_command", required=True)
    rc = role_sub.add_parser("create")
    rc.add_argument("--script", required=True)
    rc.add_argument("--data-dir", default="delta-data")
    rc.set_defaults(fn=cmd_role_create)
    re_ = role_sub.add_parser("evolve")
    re_.add_argument("--id", required=True)
    re_.add_argument("--instruction", required=True)
    re_.add_argument("--data-dir", default="delta-data")
    re_.add_argument("--proxy", choices=["scripted", "http"], default="scripted")
    re_.add_argument("--proxy-table", default=None)
    re_.set_defaults(fn=cmd_role_evolve)
    rs = role_sub.add_parser("show")
    rs.add_argument("--id", required=True)
    rs.add_argument("--data-dir", default="delta-data")
    rs.set_defaults(fn=cmd_role_show)
    rl = role_sub.add_parser("list")
    rl.add_argument("--data-dir", default="delta-data")
    rl.set_defaults(fn=cmd_role_list)

    battle = sub.add_parser("battle", help="run battles")
    battle_sub = battle.add_subparsers(dest="battle_command", required=True)
    br = battle_sub.add_parser("run")
    br.add_argument("--role-a", required=True)
    br.add_argument("--role-b", default=None)
    br.add_argument("--synth-seed", type=int, default=0)
    br.add_argument("--seed", type=int, default=0)
    br.add_argument("--max-turns", type=int, default=100)
    br.add_argument("--policy-a", default="random")
    br.add_argument("--policy-b", default="random")
    br.add_argument("--data-dir", default="delta-data")
    br.add_argument("--out", default=None)
    br.set_defaults(fn=cmd_battle_run)

    ev = sub.add_parser("eval", help="metrics and experiments")
    ev_sub = ev.add_subparsers(dest="eval_command", required=True)
    ee = ev_sub.add_parser("exe")
    ee.add_argument("--roles", default="delta-data")
    ee.add_argument("--seed-pool", action="store_true", help="evaluate the bundled seed roles")
    ee.add_argument("--opponents", type=int, default=100)
    ee.add_argument("--seed", type=int, default=0)
    ee.add_argument("--out", default="eval-out")
    ee.set_defaults(fn=cmd_eval_exe)
    ea = ev_sub.add_parser("acc")
    ea.add_argument("--pairs", required=True, help="JSONL of {id, candidate, reference} code pairs")
    ea.add_argument("--judge", choices=["mock", "llm"], default="mock")
    ea.add_argument("--out", default="eval-out")
    ea.set_defaults(fn=cmd_eval_acc)
    es = ev_sub.add_parser("scale")
    es.add_argument("--runs", type=int, default=100)
    es.add_argument("--max-steps", type=int, default=40)
    es.add_argument("--seed", type=int, default=0)
    es.add_argument("--proxy", choices=["scripted", "http"], default="scripted")
    es.add_argument("--proxy-table", default=None)
    es.add_argument("--out", default="eval-out")
    es.set_defaults(fn=cmd_eval_scale)

    data = sub.add_parser("data", help="data pipeline")
    data_sub = data.add_subparsers(dest="data_command", required=True)
    dg = data_sub.add_parser("generate")
    dg.add_argument("--prototypes", required=True)
    dg.add_argument("--pool", required=True)
    dg.add_argument("--count", type=int, default=1)
    dg.add_argument("--mode", choices=["codesign", "synthetic"], default="codesign")
    dg.add_argument("--generator", choices=["http", "mock"], default="http")
    dg.add_argument("--threshold", type=int, default=2)
    dg.add_argument("--seed", type=int, default=0)
    dg.set_defaults(fn=cmd_data_generate)
    dt = data_sub.add_parser("tag")
    dt.add_argument("--roles", required=True, help="directory of .role/.txt code files")
    dt.set_defaults(fn=cmd_data_tag)
    ds = data_sub.add_parser("split")
    ds.add_argument("--roles", default="delta-data", help="service data directory")
    ds.add_argument("--out", required=True)
    ds.set_defaults(fn=cmd_data_split)
    df = data_sub.add_parser("fetch")
    df.add_argument("--title", required=True)
    df.add_argument("--corpus", required=True)
    df.set_defaults(fn=cmd_data_fetch)

    fs = sub.add_parser("fsck", help="verify persisted role hash chains")
    fs.add_argument("--data-dir", default="delta-data")
    fs.set_defaults(fn=cmd_fsck)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args) or 0
    except (ScriptError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
