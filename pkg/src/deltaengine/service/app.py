"""HTTP service exposing roles, evolution, and battles.

All state changes flow through the RoleStore's write-ahead event log.
Evolves on one role are serialized by a per-role lock: with queueing
enabled a second caller waits and then sees the first caller's result in
its own context; with queueing disabled it gets 409 immediately.
"""

from __future__ import annotations

import json
import time
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from ..dsl import to_source
from ..engine import (
    Author,
    Instruction,
    NonExecutableDeltaError,
    UnknownEntryError,
    evolve_step,
    skeleton,
)
from ..evaluation import synth_opponent
from ..pipeline import tag_interest
from ..proxy import ProxyError
from ..script import RoleScript, ScriptError
from .battles import BattleManager, DoubleSubmissionError, PolicySpec
from .config import ServiceConfig
from .store import RoleStore, UnknownRoleError


class EvolveRequest(BaseModel):
    instruction: str
    author: str = "player"


class BattleRequest(BaseModel):
    role_a: str
    role_b: Optional[str] = None
    synth_seed: Optional[int] = None
    seed: int = 0
    policy_a: Optional[dict | str] = None
    policy_b: Optional[dict | str] = None
    max_turns: int = 100


class ActionRequest(BaseModel):
    side: str
    move: int


def role_view(record) -> dict:
    return {
        "role_id": record.role_id,
        "script": record.script.to_dict(),
        "code": record.code(),
        "step": record.state.step,
        "skeleton": [
            {"name": name, "params": list(params)}
            for name, params in skeleton(record.state).entries
        ],
        "toi": tag_interest(record.state).to_dict(),
        "events": [
            {
                "time": e["time"],
                "instruction": e["instruction"],
                "author": e["author"],
                "names": e["names"],
                "delta_source": e["delta_source"],
                "code_hash": e["code_hash"],
            }
            for e in record.events
        ],
    }


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="deltaengine", version="0.1.0")
    store = RoleStore(config.data_dir)
    battles = BattleManager(config.max_concurrent_battles, config.interactive_timeout)
    proxy = config.build_proxy()
    app.state.store = store
    app.state.battles = battles
    app.state.config = config

    if config.cors_allow_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_allow_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def _get_record(role_id: str):
        try:
            return store.get(role_id)
        except UnknownRoleError:
            raise HTTPException(404, f"no role {role_id!r}") from None

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "roles": len(store.list_ids())}

    @app.post("/api/roles", status_code=201)
    def create_role(script: dict):
        try:
            parsed = RoleScript.from_dict(script)
        except ScriptError as exc:
            raise HTTPException(400, str(exc)) from None
        record = store.create(parsed)
        return role_view(record)

    @app.get("/api/roles")
    def list_roles():
        return {"roles": [role_view(store.get(rid)) for rid in store.list_ids()]}

    @app.get("/api/roles/{role_id}")
    def get_role(role_id: str):
        return role_view(_get_record(role_id))

    @app.post("/api/roles/{role_id}/evolve")
    def evolve_role(role_id: str, req: EvolveRequest):
        record = _get_record(role_id)
        if not req.instruction.strip():
            raise HTTPException(400, "instruction must be non-empty")
        try:
            author = Author(req.author)
        except ValueError:
            raise HTTPException(400, f"unknown author {req.author!r}") from None
        lock = store.lock_for(role_id)
        if config.evolve_queueing:
            lock.acquire()
        elif not lock.acquire(blocking=False):
            raise HTTPException(409, "an evolve is already in flight for this role")
        try:
            instruction = Instruction(req.instruction, author)
            before_code = record.code()
            try:
                delta, new_state = evolve_step(record.state, instruction, proxy)
            except NonExecutableDeltaError as exc:
                raise HTTPException(
                    422,
                    {
                        "message": "the generated increment is not executable; role unchanged",
                        "phase": exc.phase,
                        "detail": exc.detail,
                        "response_text": exc.response_text,
                    },
                ) from None
            except UnknownEntryError as exc:
                raise HTTPException(
                    422,
                    {
                        "message": "entry selection produced no resolvable names; role unchanged",
                        "phase": "select",
                        "detail": str(exc),
                        "response_text": "",
                    },
                ) from None
            except ProxyError as exc:
                raise HTTPException(502, str(exc)) from None
            names = new_state.history[-1].names
            store.append_evolve(role_id, instruction, names, delta, new_state)
            return {
                "role_id": role_id,
                "delta": to_source(delta),
                "selected_names": list(names or ()),
                "code_before": before_code,
                "new_code": record.code(),
                "step": record.state.step,
            }
        finally:
            lock.release()

    @app.post("/api/battles", status_code=201)
    def start_battle(req: BattleRequest):
        record_a = _get_record(req.role_a)
        if req.role_b is not None:
            state_b = _get_record(req.role_b).state
        elif req.synth_seed is not None:
            state_b = synth_opponent(req.synth_seed)
        else:
            raise HTTPException(400, "provide role_b or synth_seed")
        session = battles.create(
            record_a.state, state_b, req.seed,
            PolicySpec.from_dict(req.policy_a), PolicySpec.from_dict(req.policy_b),
            req.max_turns,
        )
        return session.view()

    def _get_session(battle_id: str):
        try:
            return battles.get(battle_id)
        except KeyError:
            raise HTTPException(404, f"no battle {battle_id!r}") from None

    @app.get("/api/battles/{battle_id}")
    def battle_status(battle_id: str):
        session = _get_session(battle_id)
        session.advance()
        return session.view()

    @app.post("/api/battles/{battle_id}/actions")
    def submit_action(battle_id: str, req: ActionRequest):
        session = _get_session(battle_id)
        if req.side not in ("A", "B"):
            raise HTTPException(400, "side must be 'A' or 'B'")
        try:
            session.submit_action(req.side, req.move)
        except DoubleSubmissionError as exc:
            raise HTTPException(409, str(exc)) from None
        except LookupError as exc:
            raise HTTPException(400, str(exc)) from None
        except ValueError as exc:
            raise HTTPException(409, str(exc)) from None
        return session.view()

    @app.get("/api/battles/{battle_id}/log")
    def battle_log(battle_id: str, after: int = 0, follow: bool = False):
        session = _get_session(battle_id)
        session.advance()

        def stream():
            sent = after
            deadline = time.monotonic() + 30.0
            while True:
                events = session.battle.events
                while sent < len(events):
                    yield (events[sent].to_json() + "\n").encode("utf-8")
                    sent += 1
                if session.battle.outcome is not None or not follow:
                    break
                if time.monotonic() > deadline:
                    break
                time.sleep(0.05)
                session.advance()
            if session.battle.outcome is not None:
                yield (
                    json.dumps(
                        {"turn": session.battle.turn, "actor": "battle", "kind": "outcome",
                         "payload": {"outcome": session.battle.outcome.value}},
                        sort_keys=True, separators=(",", ":"),
                    ) + "\n"
                ).encode("utf-8")

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.post("/api/fsck")
    def fsck():
        return {"report": store.fsck()}

    return app
