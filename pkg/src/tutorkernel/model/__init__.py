from .roles import Role, Action, Permission, Decision, check_permission, role_at_least
from .records import (
    UserAccount,
    Problem,
    TestCase,
    Schedule,
    CourseEvent,
    EventKind,
    Stimulus,
    CodeSnapshot,
    Grade,
    AssignmentKey,
    PRACTICE,
)
from .assign import AssignStrategy, assign_problems
from .pager import PagerThread, PagerMessage, open_thread, reply_thread, delete_message

__all__ = [
    "Role",
    "Action",
    "Permission",
    "Decision",
    "check_permission",
    "role_at_least",
    "UserAccount",
    "Problem",
    "TestCase",
    "Schedule",
    "CourseEvent",
    "EventKind",
    "Stimulus",
    "CodeSnapshot",
    "Grade",
    "AssignmentKey",
    "PRACTICE",
    "AssignStrategy",
    "assign_problems",
    "PagerThread",
    "PagerMessage",
    "open_thread",
    "reply_thread",
    "delete_message",
]
