"""Domain value types. Pure data, shared read-only everywhere; persistence is
the store module's business, so each type round-trips to a plain JSON row."""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Optional

from .roles import Role

PRACTICE = "practice"  # sentinel event id for practice-problem work


class EventKind(str, Enum):
    LAB = "LAB"
    EXAM = "EXAM"
    QUIZ = "QUIZ"


class Stimulus(str, Enum):
    """What caused a code version to be saved."""

    MANUAL_SAVE = "MANUAL_SAVE"
    AUTO_SAVE = "AUTO_SAVE"
    COMPILE = "COMPILE"
    EXECUTE = "EXECUTE"
    EVALUATE = "EVALUATE"
    SUBMIT = "SUBMIT"


@dataclass
class UserAccount:
    user_id: str
    display_name: str
    login: str
    credential_hash: str
    role: Role
    active: bool = True

    def __post_init__(self):
        if self.active and not self.credential_hash:
            raise ValueError("active accounts need a credential hash")

    def to_row(self) -> dict:
        row = asdict(self)
        row["role"] = self.role.value
        return row

    @classmethod
    def from_row(cls, row: dict) -> "UserAccount":
        return cls(
            user_id=row["user_id"],
            display_name=row["display_name"],
            login=row["login"],
            credential_hash=row["credential_hash"],
            role=Role(row["role"]),
            active=row.get("active", True),
        )


@dataclass
class Problem:
    problem_id: str
    title: str
    statement: str = ""
    solution_code: str = ""
    template_code: str = ""
    category: str = ""
    practice: bool = False

    def to_row(self) -> dict:
        return asdict(self)

    @classmethod
    def from_row(cls, row: dict) -> "Problem":
        return cls(**{k: row[k] for k in cls.__dataclass_fields__ if k in row})


@dataclass
class TestCase:
    test_id: str
    problem_id: str
    input: str
    expected_output: str
    visible: bool = True

    def to_row(self) -> dict:
        return asdict(self)

    @classmethod
    def from_row(cls, row: dict) -> "TestCase":
        return cls(**{k: row[k] for k in cls.__dataclass_fields__ if k in row})


@dataclass
class Schedule:
    schedule_id: str
    start: int
    end: int
    slot_members: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("schedule start must precede end")

    def is_open(self, now: int) -> bool:
        return self.start <= now < self.end

    def to_row(self) -> dict:
        return asdict(self)

    @classmethod
    def from_row(cls, row: dict) -> "Schedule":
        return cls(
            schedule_id=row["schedule_id"],
            start=row["start"],
            end=row["end"],
            slot_members=list(row.get("slot_members", [])),
        )


@dataclass
class CourseEvent:
    event_id: str
    kind: EventKind
    title: str
    schedules: list[Schedule] = field(default_factory=list)
    assignments: dict[str, list[str]] = field(default_factory=dict)  # student -> problem ids

    def open_schedules(self, now: int, user_id: Optional[str] = None) -> list[Schedule]:
        hits = [s for s in self.schedules if s.is_open(now)]
        if user_id is not None:
            hits = [s for s in hits if not s.slot_members or user_id in s.slot_members]
        return hits

    def is_open(self, now: int, user_id: Optional[str] = None) -> bool:
        return bool(self.open_schedules(now, user_id))

    def is_exam_open(self, now: int) -> bool:
        return self.kind == EventKind.EXAM and self.is_open(now)

    def to_row(self) -> dict:
        return {
            "event_id": self.event_id,
            "kind": self.kind.value,
            "title": self.title,
            "schedules": [s.to_row() for s in self.schedules],
            "assignments": self.assignments,
        }

    @classmethod
    def from_row(cls, row: dict) -> "CourseEvent":
        return cls(
            event_id=row["event_id"],
            kind=EventKind(row["kind"]),
            title=row["title"],
            schedules=[Schedule.from_row(s) for s in row.get("schedules", [])],
            assignments={k: list(v) for k, v in row.get("assignments", {}).items()},
        )


@dataclass(frozen=True)
class AssignmentKey:
    """Identity of one student's work on one problem in one context."""

    user_id: str
    event_id: str  # a course event id, or PRACTICE
    problem_id: str

    def as_string(self) -> str:
        return f"{self.user_id}/{self.event_id}/{self.problem_id}"

    @classmethod
    def from_string(cls, text: str) -> "AssignmentKey":
        user_id, event_id, problem_id = text.split("/", 2)
        return cls(user_id, event_id, problem_id)

    @property
    def is_practice(self) -> bool:
        return self.event_id == PRACTICE


@dataclass
class CodeSnapshot:
    snapshot_id: int
    assignment_key: AssignmentKey
    code: str
    stimulus: Stimulus
    created_at: int
    linked_log: Optional[str] = None
    deleted: bool = False  # tombstone; ids and ordering are never reused

    def to_row(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "assignment_key": self.assignment_key.as_string(),
            "code": self.code,
            "stimulus": self.stimulus.value,
            "created_at": self.created_at,
            "linked_log": self.linked_log,
            "deleted": self.deleted,
        }

    @classmethod
    def from_row(cls, row: dict) -> "CodeSnapshot":
        return cls(
            snapshot_id=row["snapshot_id"],
            assignment_key=AssignmentKey.from_string(row["assignment_key"]),
            code=row["code"],
            stimulus=Stimulus(row["stimulus"]),
            created_at=row["created_at"],
            linked_log=row.get("linked_log"),
            deleted=row.get("deleted", False),
        )


@dataclass
class Grade:
    assignment_key: AssignmentKey
    score: float
    max_score: float
    grader: str
    remarks: str = ""

    def __post_init__(self):
        if self.max_score <= 0:
            raise ValueError("max_score must be positive")
        if not (0 <= self.score <= self.max_score):
            raise ValueError("score must lie in [0, max_score]")

    def to_row(self) -> dict:
        return {
            "assignment_key": self.assignment_key.as_string(),
            "score": self.score,
            "max_score": self.max_score,
            "grader": self.grader,
            "remarks": self.remarks,
        }

    @classmethod
    def from_row(cls, row: dict) -> "Grade":
        return cls(
            assignment_key=AssignmentKey.from_string(row["assignment_key"]),
            score=row["score"],
            max_score=row["max_score"],
            grader=row["grader"],
            remarks=row.get("remarks", ""),
        )
