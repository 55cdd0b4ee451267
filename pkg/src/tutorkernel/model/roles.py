"""Role and permission algebra.

Web-facing privileges nest strictly: STUDENT < TA < TUTOR < TEACHER. The one
carve-out is exam lockdown: while an EXAM event has an open schedule window,
every TA permission evaluates to denied for that event; tutors keep full
access. ADMINISTRATOR is an operations role with no web permissions at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .records import CourseEvent, UserAccount


class Role(str, Enum):
    STUDENT = "STUDENT"
    TA = "TA"
    TUTOR = "TUTOR"
    TEACHER = "TEACHER"
    ADMINISTRATOR = "ADMINISTRATOR"


class Action(str, Enum):
    SAVE_CODE = "SAVE_CODE"
    RUN_CODE = "RUN_CODE"
    VIEW_OWN = "VIEW_OWN"
    USE_SCRATCHPAD = "USE_SCRATCHPAD"
    USE_PAGER = "USE_PAGER"
    VIEW_SUBMISSIONS = "VIEW_SUBMISSIONS"
    VIEW_HISTORY = "VIEW_HISTORY"
    GRADE = "GRADE"
    MANAGE_TESTCASES = "MANAGE_TESTCASES"
    VIEW_TASKS = "VIEW_TASKS"
    ADMIN_EDITOR = "ADMIN_EDITOR"
    UPLOAD_PROBLEM = "UPLOAD_PROBLEM"
    MANAGE_EVENTS = "MANAGE_EVENTS"
    MANAGE_ACCOUNTS = "MANAGE_ACCOUNTS"
    CONTROL_PANEL = "CONTROL_PANEL"


_STUDENT_ACTIONS = {
    Action.SAVE_CODE,
    Action.RUN_CODE,
    Action.VIEW_OWN,
    Action.USE_SCRATCHPAD,
    Action.USE_PAGER,
}
_TA_ACTIONS = _STUDENT_ACTIONS | {
    Action.VIEW_SUBMISSIONS,
    Action.VIEW_HISTORY,
    Action.GRADE,
    Action.MANAGE_TESTCASES,
    Action.VIEW_TASKS,
    Action.ADMIN_EDITOR,
}
_TUTOR_ACTIONS = _TA_ACTIONS | {Action.UPLOAD_PROBLEM}
_TEACHER_ACTIONS = _TUTOR_ACTIONS | {
    Action.MANAGE_EVENTS,
    Action.MANAGE_ACCOUNTS,
    Action.CONTROL_PANEL,
}

GRANTS: dict[Role, frozenset[Action]] = {
    Role.STUDENT: frozenset(_STUDENT_ACTIONS),
    Role.TA: frozenset(_TA_ACTIONS),
    Role.TUTOR: frozenset(_TUTOR_ACTIONS),
    Role.TEACHER: frozenset(_TEACHER_ACTIONS),
    Role.ADMINISTRATOR: frozenset(),  # command-line only, never via the web surface
}

_RANK = {Role.STUDENT: 0, Role.TA: 1, Role.TUTOR: 2, Role.TEACHER: 3}


def role_at_least(role: Role, floor: Role) -> bool:
    """True when `role` sits at or above `floor` in the web privilege order."""
    if role == Role.ADMINISTRATOR:
        return False
    return _RANK[role] >= _RANK[floor]


@dataclass(frozen=True)
class Permission:
    action: Action
    event_id: Optional[str] = None  # context for the exam lockdown rule


@dataclass(frozen=True)
class Decision:
    allow: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.allow


ALLOW = Decision(True)


def check_permission(
    user: "UserAccount",
    perm: Permission,
    now: int,
    event: Optional["CourseEvent"] = None,
) -> Decision:
    """Decide whether `user` may perform `perm.action` at time `now`.

    `event` supplies the course event named by `perm.event_id`, when any;
    it is what the exam lockdown rule inspects.
    """
    if not user.active:
        return Decision(False, "account-inactive")
    if not isinstance(perm.action, Action):
        return Decision(False, "unknown-action")
    if user.role == Role.ADMINISTRATOR:
        return Decision(False, "cli-only-role")
    if perm.action not in GRANTS[user.role]:
        return Decision(False, "role")
    if user.role == Role.TA and event is not None and event.is_exam_open(now):
        return Decision(False, "exam-lockdown")
    return ALLOW
