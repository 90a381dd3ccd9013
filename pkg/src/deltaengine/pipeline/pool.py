"""The sampling pool: script/code pairs that passed the filter chain.

The pool starts from 20 hand-written seed instances bundled with the
package. Admissions append to an event log holding the script plus the
full increment history, so reloading the log rebuilds byte-identical
states through the same merge path that created them.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence, Union

from ..dsl import parse, to_source, validate, DeltaAst
from ..engine import Author, EngineState, Instruction, init_engine, merge
from ..script import RoleScript


@dataclass(frozen=True)
class PoolInstance:
    instance_id: str
    script: RoleScript
    state: EngineState

    def code(self) -> str:
        return to_source(self.state.role)


def _build_state(script: RoleScript, deltas: Sequence[dict]) -> EngineState:
    state = init_engine(script)
    for d in deltas:
        delta = parse(d["source"])
        if not isinstance(delta, DeltaAst):
            raise ValueError(f"pool delta for {script.species} is not an increment")
        instruction = Instruction(d["instruction"], Author(d.get("author", "pipeline")))
        state = merge(delta, state, instruction, d.get("names"))
    return state


def _instance_from_record(instance_id: str, record: dict) -> PoolInstance:
    script = RoleScript.from_dict(record["script"])
    state = _build_state(script, record.get("deltas", []))
    return PoolInstance(instance_id, script, state)


def load_seed_instances() -> List[PoolInstance]:
    ref = resources.files("deltaengine.pipeline").joinpath("data/seed_pool.json")
    with ref.open("r", encoding="utf-8") as fh:
        records = json.load(fh)
    return [
        _instance_from_record(f"seed_{i:02d}", rec) for i, rec in enumerate(records)
    ]


class SamplePool:
    """Seeds plus admitted instances; admissions are serialized by the
    caller (single writer) and appended to admissions.jsonl."""

    def __init__(self, directory: Optional[Union[str, Path]] = None, include_seeds: bool = True):
        self.directory = Path(directory) if directory else None
        self.instances: List[PoolInstance] = list(load_seed_instances()) if include_seeds else []
        self._write_lock = threading.Lock()
        if self.directory is not None:
            self._replay_log()

    @property
    def _log_path(self) -> Optional[Path]:
        return self.directory / "admissions.jsonl" if self.directory else None

    def _replay_log(self):
        path = self._log_path
        if path is None or not path.exists():
            return
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                self.instances.append(_instance_from_record(rec["id"], rec))

    def __len__(self) -> int:
        return len(self.instances)

    def admit(self, script: RoleScript, state: EngineState) -> PoolInstance:
        """Append one filtered instance. Admission is single-writer and the
        code must be structurally sound (interest thresholds are the filter
        chain's job); the event log records the script plus the whole
        increment history so replay rebuilds this state."""
        problems = validate(state.role)
        if problems:
            raise ValueError(f"refusing to admit invalid code: {problems[0]}")
        with self._write_lock:
            instance_id = f"pool_{len(self.instances):04d}"
            deltas = [
                {
                    "instruction": e.instruction.text,
                    "author": e.instruction.author.value,
                    "names": list(e.names) if e.names is not None else None,
                    "source": to_source(e.delta),
                }
                for e in state.history
            ]
            record = {"id": instance_id, "script": script.to_dict(), "deltas": deltas}
            if self._log_path is not None:
                self._log_path.parent.mkdir(parents=True, exist_ok=True)
                with self._log_path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, sort_keys=True) + "\n")
            instance = PoolInstance(instance_id, script, state)
            self.instances.append(instance)
            return instance

    def sample(self, rng: random.Random, k: int) -> List[PoolInstance]:
        if k > len(self.instances):
            raise ValueError(f"pool has {len(self.instances)} instances, wanted {k}")
        return rng.sample(self.instances, k)
