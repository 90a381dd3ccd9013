"""Accuracy metric over the executable subset.

Pairs of (candidate, reference) role code are compared by a judge. The
mock judge is canonical-print equality, deliberately stricter than a
model-backed judge. The model judge sends both snippets with a fixed
rubric; when it cannot answer (transport failure) the pair is counted as
an abstention and excluded from the denominator rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Protocol, Sequence, Tuple

from ..dsl import to_source
from ..engine import EngineState
from ..proxy.base import ProxyError
from ..proxy.http import ChatClient

JUDGE_TEMPLATE_VERSION = "judge-v1"


class Judge(Protocol):
    def equivalent(self, candidate: str, reference: str) -> bool:
        ...


class MockJudge:
    """Structural equality after canonical print."""

    def equivalent(self, candidate: str, reference: str) -> bool:
        return candidate == reference


class LlmJudge:
    def __init__(self, client: ChatClient):
        self.client = client

    def equivalent(self, candidate: str, reference: str) -> bool:
        system = (
            "You compare two code snippets implementing a battle role and "
            "decide whether the candidate implements the same behavior as "
            "the reference. Ignore naming of helper methods and ordering; "
            "judge behavior only. Answer with exactly YES or NO."
        )
        user = f"Reference:\n```\n{reference}\n```\n\nCandidate:\n```\n{candidate}\n```\n\nSame behavior? YES or NO:"
        answer = self.client.complete(system, user, temperature=0.0, max_tokens=4)
        return answer.strip().upper().startswith("YES")


@dataclass(frozen=True)
class AccReport:
    per_role: Dict[str, bool]
    abstained: Tuple[str, ...]
    acc_percent: float
    evaluated: int

    def to_dict(self) -> dict:
        return {
            "acc_percent": self.acc_percent,
            "evaluated": self.evaluated,
            "abstained": list(self.abstained),
            "per_role": dict(sorted(self.per_role.items())),
        }


def acc_rate(pairs: Sequence[Tuple[str, EngineState, EngineState]], judge: Judge) -> AccReport:
    """pairs: (role_id, candidate, reference); every candidate must already
    have passed the execution metric (caller's contract)."""
    if not pairs:
        raise ValueError("no pairs to judge")
    per_role: Dict[str, bool] = {}
    abstained: List[str] = []
    for role_id, candidate, reference in pairs:
        cand_src = to_source(candidate.role)
        ref_src = to_source(reference.role)
        try:
            per_role[role_id] = judge.equivalent(cand_src, ref_src)
        except ProxyError:
            abstained.append(role_id)
    evaluated = len(per_role)
    correct = sum(per_role.values())
    acc = 100.0 * correct / evaluated if evaluated else 0.0
    return AccReport(
        per_role=per_role,
        abstained=tuple(abstained),
        acc_percent=acc,
        evaluated=evaluated,
    )
