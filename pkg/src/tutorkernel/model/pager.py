"""Help-request threads. Students open them; anyone authenticated may reply.

Deleted messages are tombstoned in place so the ordering invariant (the
opening message is first and authored by a student) survives any deletion.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..common.util import new_id, now_ms
from .records import AssignmentKey
from .roles import Role


class PagerError(PermissionError):
    pass


@dataclass
class PagerMessage:
    author: str
    author_role: Role
    text: str
    at: int
    deleted: bool = False

    def to_row(self) -> dict:
        return {
            "author": self.author,
            "author_role": self.author_role.value,
            "text": self.text,
            "at": self.at,
            "deleted": self.deleted,
        }

    @classmethod
    def from_row(cls, row: dict) -> "PagerMessage":
        return cls(row["author"], Role(row["author_role"]), row["text"], row["at"], row.get("deleted", False))


@dataclass
class PagerThread:
    thread_id: str
    opener: str
    context: Optional[AssignmentKey] = None
    messages: list[PagerMessage] = field(default_factory=list)

    def to_row(self) -> dict:
        return {
            "thread_id": self.thread_id,
            "opener": self.opener,
            "context": self.context.as_string() if self.context else None,
            "messages": [m.to_row() for m in self.messages],
        }

    @classmethod
    def from_row(cls, row: dict) -> "PagerThread":
        return cls(
            thread_id=row["thread_id"],
            opener=row["opener"],
            context=AssignmentKey.from_string(row["context"]) if row.get("context") else None,
            messages=[PagerMessage.from_row(m) for m in row.get("messages", [])],
        )


def open_thread(
    caller: str,
    caller_role: Role,
    text: str,
    context: Optional[AssignmentKey] = None,
    at: Optional[int] = None,
) -> PagerThread:
    if caller_role != Role.STUDENT:
        raise PagerError("only students can start a thread")
    message = PagerMessage(caller, caller_role, text, at if at is not None else now_ms())
    return PagerThread(thread_id=new_id("thr"), opener=caller, context=context, messages=[message])


def reply_thread(
    thread: PagerThread, caller: str, caller_role: Role, text: str, at: Optional[int] = None
) -> PagerThread:
    thread.messages.append(PagerMessage(caller, caller_role, text, at if at is not None else now_ms()))
    return thread


def delete_message(thread: PagerThread, caller: str, index: int) -> PagerThread:
    if not (0 <= index < len(thread.messages)):
        raise IndexError("no such message")
    message = thread.messages[index]
    if message.author != caller:
        raise PagerError("only the author may delete a message")
    message.deleted = True
    message.text = ""
    return thread
