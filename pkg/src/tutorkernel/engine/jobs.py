"""Job and result shapes for the compute service."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..model.records import AssignmentKey, TestCase
from .diagnostics import Diagnostic


class JobAction(str, Enum):
    COMPILE = "COMPILE"
    EXECUTE = "EXECUTE"
    EVALUATE = "EVALUATE"
    TOOL = "TOOL"


class JobStatus(str, Enum):
    OK = "OK"
    COMPILE_ERROR = "COMPILE_ERROR"
    RUNTIME_ERROR = "RUNTIME_ERROR"
    TIME_LIMIT = "TIME_LIMIT"
    MEMORY_LIMIT = "MEMORY_LIMIT"
    OUTPUT_LIMIT = "OUTPUT_LIMIT"
    INTERNAL = "INTERNAL"


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    TLE = "TLE"
    RTE = "RTE"


@dataclass
class JobContext:
    """Where a job came from; decides logging and authorization.

    kind: "course" | "practice" | "scratchpad" | "admin"
    Course and practice jobs carry an assignment key and get logged.
    """

    kind: str
    user_id: str
    event_id: Optional[str] = None
    problem_id: Optional[str] = None
    snapshot_id: Optional[int] = None

    @property
    def assignment_key(self) -> Optional[AssignmentKey]:
        if self.kind in ("course", "practice") and self.problem_id:
            event = self.event_id if self.kind == "course" else "practice"
            return AssignmentKey(self.user_id, event or "practice", self.problem_id)
        return None

    def to_row(self) -> dict:
        return {
            "kind": self.kind,
            "user_id": self.user_id,
            "event_id": self.event_id,
            "problem_id": self.problem_id,
            "snapshot_id": self.snapshot_id,
        }

    @classmethod
    def from_row(cls, row: dict) -> "JobContext":
        return cls(
            kind=row.get("kind", "scratchpad"),
            user_id=row.get("user_id", ""),
            event_id=row.get("event_id"),
            problem_id=row.get("problem_id"),
            snapshot_id=row.get("snapshot_id"),
        )


@dataclass
class EngineJob:
    job_id: str
    action: JobAction
    code: str
    language: Optional[str]
    context: JobContext
    stdin: str = ""
    test_set: list[TestCase] = field(default_factory=list)
    tool: Optional[str] = None
    tool_params: dict = field(default_factory=dict)


@dataclass
class PerTest:
    test_id: str
    verdict: Verdict
    visible: bool
    # expected/actual output included only for visible tests
    expected_output: Optional[str] = None
    actual_output: Optional[str] = None

    def to_row(self) -> dict:
        row = {"test_id": self.test_id, "verdict": self.verdict.value, "visible": self.visible}
        if self.visible:
            row["expected_output"] = self.expected_output
            row["actual_output"] = self.actual_output
        return row


@dataclass
class JobResult:
    job_id: str
    action: JobAction
    status: JobStatus
    diagnostics: list[Diagnostic] = field(default_factory=list)
    stdout: str = ""
    stderr: str = ""
    per_test: Optional[list[PerTest]] = None  # present iff action == EVALUATE
    feedback: list[dict] = field(default_factory=list)
    wall_ms: float = 0.0
    log_id: Optional[str] = None

    @property
    def all_passed(self) -> bool:
        return bool(self.per_test) and all(t.verdict == Verdict.PASS for t in self.per_test)

    def verdict_counts(self) -> dict[str, int]:
        counts = {v.value: 0 for v in Verdict}
        for t in self.per_test or []:
            counts[t.verdict.value] += 1
        return counts

    def to_row(self) -> dict:
        return {
            "job_id": self.job_id,
            "action": self.action.value,
            "status": self.status.value,
            "diagnostics": [d.to_row() for d in self.diagnostics],
            "stdout": self.stdout,
            "stderr": self.stderr,
            "per_test": [t.to_row() for t in self.per_test] if self.per_test is not None else None,
            "feedback": self.feedback,
            "wall_ms": self.wall_ms,
            "log_id": self.log_id,
        }
