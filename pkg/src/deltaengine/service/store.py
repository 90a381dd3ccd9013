"""Role persistence: one directory per role, append-only event log.

Layout under <data_dir>/roles/<role_id>/:
    script.json   - the originating role script
    events.jsonl  - one evolution event per line, hash-chained
    snapshot.txt  - current printed code (convenience only; events win)

The event log is the source of truth: replaying it from the script's
rule-initialized state reproduces the current code, and every event
carries the sha256 of the code it produced plus its predecessor's hash.
An evolve is write-ahead: the event hits disk (fsync) before the caller
sees a response, so a crash between persist and response replays cleanly.

Setting DELTA_FAULT_CRASH_AFTER_APPEND=1 kills the process immediately
after an event append; it exists for crash-safety tests only.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from ..dsl import DeltaAst, parse, to_source
from ..engine import Author, EngineState, Instruction, init_engine, merge
from ..script import RoleScript

CRASH_ENV = "DELTA_FAULT_CRASH_AFTER_APPEND"


class StoreError(Exception):
    pass


class UnknownRoleError(KeyError):
    pass


def code_hash(state: EngineState) -> str:
    return hashlib.sha256(to_source(state.role).encode("utf-8")).hexdigest()


@dataclass
class RoleRecord:
    role_id: str
    script: RoleScript
    state: EngineState
    events: List[dict] = field(default_factory=list)

    def code(self) -> str:
        return to_source(self.state.role)


class RoleStore:
    def __init__(self, data_dir: Union[str, Path]):
        self.root = Path(data_dir) / "roles"
        self.root.mkdir(parents=True, exist_ok=True)
        self._records: Dict[str, RoleRecord] = {}
        self._locks: Dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for role_dir in sorted(self.root.iterdir()):
            if role_dir.is_dir():
                record = self._load(role_dir.name)
                self._records[record.role_id] = record

    # --- locking ---------------------------------------------------------

    def lock_for(self, role_id: str) -> threading.Lock:
        with self._registry_lock:
            if role_id not in self._locks:
                self._locks[role_id] = threading.Lock()
            return self._locks[role_id]

    # --- paths -----------------------------------------------------------

    def _dir(self, role_id: str) -> Path:
        return self.root / role_id

    def _events_path(self, role_id: str) -> Path:
        return self._dir(role_id) / "events.jsonl"

    # --- operations ------------------------------------------------------

    def create(self, script: RoleScript) -> RoleRecord:
        role_id = uuid.uuid4().hex[:12]
        role_dir = self._dir(role_id)
        role_dir.mkdir(parents=True)
        (role_dir / "script.json").write_text(script.to_json(), encoding="utf-8")
        state = init_engine(script)
        record = RoleRecord(role_id, script, state)
        self._write_snapshot(record)
        with self._registry_lock:
            self._records[role_id] = record
        return record

    def get(self, role_id: str) -> RoleRecord:
        try:
            return self._records[role_id]
        except KeyError:
            raise UnknownRoleError(role_id) from None

    def list_ids(self) -> List[str]:
        return sorted(self._records)

    def append_evolve(self, role_id: str, instruction: Instruction,
                      names, delta: DeltaAst, new_state: EngineState) -> dict:
        """Persist one evolution event (write-ahead), then update the
        in-memory record and snapshot."""
        record = self.get(role_id)
        prev = record.events[-1]["code_hash"] if record.events else code_hash(
            EngineState(role=record.state.initial_role)
        )
        event = {
            "time": time.time(),
            "instruction": instruction.text,
            "author": instruction.author.value,
            "names": list(names) if names is not None else None,
            "delta_source": to_source(delta),
            "prev_hash": prev,
            "code_hash": code_hash(new_state),
        }
        path = self._events_path(role_id)
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        if os.environ.get(CRASH_ENV):
            os._exit(17)  # fault injection: die after persist, before response
        record.state = new_state
        record.events.append(event)
        self._write_snapshot(record)
        return event

    def _write_snapshot(self, record: RoleRecord):
        (self._dir(record.role_id) / "snapshot.txt").write_text(record.code(), encoding="utf-8")

    # --- recovery --------------------------------------------------------

    def _load(self, role_id: str) -> RoleRecord:
        role_dir = self._dir(role_id)
        script = RoleScript.from_json((role_dir / "script.json").read_text(encoding="utf-8"))
        state = init_engine(script)
        events: List[dict] = []
        path = self._events_path(role_id)
        if path.exists():
            with path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    event = json.loads(line)
                    delta = parse(event["delta_source"])
                    state = merge(
                        delta, state,
                        Instruction(event["instruction"], Author(event.get("author", "player"))),
                        event.get("names"),
                    )
                    events.append(event)
        record = RoleRecord(role_id, script, state, events)
        self._write_snapshot(record)  # refresh a possibly stale snapshot
        return record

    def fsck(self) -> Dict[str, dict]:
        """Replay every role from its script and verify the hash chain.
        Returns {role_id: {"ok": bool, "events": n, "problem": str?}}."""
        report: Dict[str, dict] = {}
        for role_id in self.list_ids():
            role_dir = self._dir(role_id)
            try:
                script = RoleScript.from_json((role_dir / "script.json").read_text(encoding="utf-8"))
                state = init_engine(script)
                prev = code_hash(state)
                count = 0
                path = self._events_path(role_id)
                if path.exists():
                    with path.open("r", encoding="utf-8") as fh:
                        for n, line in enumerate(fh, start=1):
                            if not line.strip():
                                continue
                            event = json.loads(line)
                            if event["prev_hash"] != prev:
                                raise StoreError(f"event {n}: prev_hash mismatch")
                            delta = parse(event["delta_source"])
                            state = merge(delta, state)
                            if code_hash(state) != event["code_hash"]:
                                raise StoreError(f"event {n}: code_hash mismatch")
                            prev = event["code_hash"]
                            count += 1
                live = self._records.get(role_id)
                if live is not None and to_source(live.state.role) != to_source(state.role):
                    raise StoreError("live state diverges from replay")
                report[role_id] = {"ok": True, "events": count}
            except Exception as exc:  # noqa: BLE001 - fsck reports, never raises
                report[role_id] = {"ok": False, "events": 0, "problem": str(exc)}
        return report
