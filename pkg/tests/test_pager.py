from __future__ import annotations

import pytest

from tutorkernel.model import Role, open_thread, reply_thread, delete_message
from tutorkernel.model.pager import PagerError, PagerThread


def test_student_opens_ta_replies():
    thread = open_thread("s1", Role.STUDENT, "help!", at=1)
    reply_thread(thread, "ta1", Role.TA, "on it", at=2)
    assert len(thread.messages) == 2
    assert thread.opener == "s1"
    assert thread.messages[0].author_role == Role.STUDENT


@pytest.mark.parametrize("role", [Role.TA, Role.TUTOR, Role.TEACHER, Role.ADMINISTRATOR])
def test_only_students_open_threads(role):
    with pytest.raises(PagerError):
        open_thread("a1", role, "hi")


def test_delete_by_author_preserves_ordering():
    thread = open_thread("s1", Role.STUDENT, "one", at=1)
    reply_thread(thread, "ta1", Role.TA, "two", at=2)
    reply_thread(thread, "s1", Role.STUDENT, "three", at=3)
    delete_message(thread, "ta1", 1)
    assert [m.deleted for m in thread.messages] == [False, True, False]
    assert [m.at for m in thread.messages] == [1, 2, 3]
    # the opening message stays first and student-authored even after deletions
    assert thread.messages[0].author_role == Role.STUDENT


def test_delete_by_non_author_rejected():
    thread = open_thread("s1", Role.STUDENT, "one", at=1)
    with pytest.raises(PagerError):
        delete_message(thread, "ta1", 0)


def test_round_trip():
    thread = open_thread("s1", Role.STUDENT, "one", at=1)
    reply_thread(thread, "ta1", Role.TA, "two", at=2)
    assert PagerThread.from_row(thread.to_row()) == thread
