"""Admission filter chain for generated instances.

Order matters and mirrors the cheapest-first principle:
  1. compile   - the code parses and validates (non-dangling rules)
  2. dangling  - every non-hook, non-slot method is actually called
  3. interest  - the interest vector reaches the threshold
  4. optional human checkpoint - emitted as a pending record for review

Rejections carry one of the reason codes "compile", "dangling_method",
"interest".
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

from ..dsl import DeltaAst, ParseError, RoleAst, ValidationError, parse, to_source, validate
from ..engine import EngineState
from ..script import RoleScript
from .tags import InterestVector, tag_interest

DEFAULT_INTEREST_THRESHOLD = 2


@dataclass(frozen=True)
class FilterResult:
    status: str  # "accept" | "reject"
    reason: Optional[str] = None
    detail: str = ""
    toi: Optional[InterestVector] = None
    pending_id: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.status == "accept"


class ApprovalQueue:
    """Append-only review queue. Submissions start pending; approve() and
    reject() append status events; current state is the fold of the log."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def _append(self, record: dict):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def submit(self, script: RoleScript, code: str, toi: InterestVector) -> str:
        pending_id = uuid.uuid4().hex
        self._append(
            {
                "action": "submit",
                "id": pending_id,
                "time": time.time(),
                "script": script.to_dict(),
                "code": code,
                "toi": toi.to_list(),
            }
        )
        return pending_id

    def approve(self, pending_id: str):
        self._append({"action": "approve", "id": pending_id, "time": time.time()})

    def reject(self, pending_id: str):
        self._append({"action": "reject", "id": pending_id, "time": time.time()})

    def statuses(self) -> dict:
        state: dict = {}
        if not self.path.exists():
            return state
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                if rec["action"] == "submit":
                    state[rec["id"]] = {"status": "pending", "record": rec}
                elif rec["id"] in state:
                    state[rec["id"]]["status"] = "approved" if rec["action"] == "approve" else "rejected"
        return state

    def pending(self) -> List[dict]:
        return [v["record"] for v in self.statuses().values() if v["status"] == "pending"]


def filter_instance(
    script: RoleScript,
    code_or_state: Union[str, EngineState],
    threshold: int = DEFAULT_INTEREST_THRESHOLD,
    checkpoint: bool = False,
    queue: Optional[ApprovalQueue] = None,
) -> FilterResult:
    """Run the full chain on a candidate script/code pair. Accepts either
    raw role source or an already-built engine state."""
    if isinstance(code_or_state, EngineState):
        state = code_or_state
        role = state.role
    else:
        try:
            program = parse(code_or_state)
        except (ParseError, ValidationError) as exc:
            return FilterResult("reject", "compile", str(exc))
        if not isinstance(program, RoleAst):
            return FilterResult("reject", "compile", "expected a full role program, got an increment")
        role = program
        state = EngineState(role=role)

    diagnostics = validate(role)
    dangling = [d for d in diagnostics if d.code == "dangling-method"]
    hard = [d for d in diagnostics if d.code != "dangling-method"]
    if hard:
        return FilterResult("reject", "compile", "; ".join(str(d) for d in hard))
    if dangling:
        return FilterResult("reject", "dangling_method", "; ".join(str(d) for d in dangling))

    toi = tag_interest(state)
    if toi.magnitude < threshold:
        return FilterResult(
            "reject", "interest",
            f"interest magnitude {toi.magnitude} below threshold {threshold}", toi,
        )

    pending_id = None
    if checkpoint and queue is not None:
        pending_id = queue.submit(script, to_source(role), toi)
    return FilterResult("accept", None, "", toi, pending_id)
