"""Split an evolved role into per-step incremental-prediction samples.

Each history entry becomes one sample carrying the instruction, the
context that was (or would have been) retrieved at that step, the
increment source, and the code after merging. Folding the samples back
together must reproduce the stored final state; a mismatch means the
state's history is corrupt and raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence

from ..dsl import to_source
from ..engine import EngineState, init_engine, merge, retrieve
from ..script import RoleScript, role_identifier
from .tags import InterestVector, tag_interest


class SplitError(Exception):
    pass


@dataclass(frozen=True)
class TrainingSample:
    role_id: str
    step_index: int
    instruction: str
    context: str
    delta_source: str
    full_code_after: str
    toi: InterestVector
    source: str  # provenance tag

    def to_dict(self) -> dict:
        return {
            "role_id": self.role_id,
            "step_index": self.step_index,
            "instruction": self.instruction,
            "context": self.context,
            "delta_source": self.delta_source,
            "full_code_after": self.full_code_after,
            "toi": self.toi.to_list(),
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingSample":
        return cls(
            d["role_id"], d["step_index"], d["instruction"], d["context"],
            d["delta_source"], d["full_code_after"],
            InterestVector.from_list(d["toi"]), d["source"],
        )


def split_samples(script: RoleScript, state: EngineState,
                  role_id: Optional[str] = None) -> List[TrainingSample]:
    """One sample per history entry. The context is re-derived from the
    recorded phase-A selection (dense - all entries - when the increment
    was merged without a selection)."""
    if not state.history:
        raise SplitError("state has no history to split")
    role_id = role_id or role_identifier(script.species)
    current = init_engine(script)
    samples: List[TrainingSample] = []
    for t, entry in enumerate(state.history):
        names = entry.names or current.resolvable_names()
        context = retrieve(current, list(names))
        merged = merge(entry.delta, current, entry.instruction, entry.names)
        samples.append(
            TrainingSample(
                role_id=role_id,
                step_index=t,
                instruction=entry.instruction.text,
                context=context.render(),
                delta_source=to_source(entry.delta),
                full_code_after=to_source(merged.role),
                toi=tag_interest(merged),
                source=script.provenance.value,
            )
        )
        current = merged
    if current.role != state.role:
        raise SplitError(f"replayed code diverges from stored state for {role_id}")
    return samples


def write_dataset(samples: Sequence[TrainingSample], path) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_dict(), sort_keys=True) + "\n")
    return len(samples)


def read_dataset(path) -> List[TrainingSample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(TrainingSample.from_dict(json.loads(line)))
    return out
