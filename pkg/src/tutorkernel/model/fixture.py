"""Seed course fixture mirroring the reference deployment's staffing:
1 teacher, 12 tutors, 48 TAs, 450 students, plus the CLI administrator."""
from __future__ import annotations

import hashlib

from .records import UserAccount
from .roles import Role


def hash_credential(secret: str) -> str:
    return hashlib.sha256(("tk-cred:" + secret).encode("utf-8")).hexdigest()


def seed_accounts(
    students: int = 450, tas: int = 48, tutors: int = 12, teachers: int = 1
) -> list[UserAccount]:
    accounts: list[UserAccount] = [
        UserAccount("u-admin", "Administrator", "admin", hash_credential("admin"), Role.ADMINISTRATOR)
    ]
    for i in range(teachers):
        accounts.append(
            UserAccount(f"u-teacher{i + 1}", f"Teacher {i + 1}", f"teacher{i + 1}",
                        hash_credential(f"teacher{i + 1}"), Role.TEACHER)
        )
    for i in range(tutors):
        accounts.append(
            UserAccount(f"u-tutor{i + 1:02d}", f"Tutor {i + 1}", f"tutor{i + 1:02d}",
                        hash_credential(f"tutor{i + 1:02d}"), Role.TUTOR)
        )
    for i in range(tas):
        accounts.append(
            UserAccount(f"u-ta{i + 1:02d}", f"TA {i + 1}", f"ta{i + 1:02d}",
                        hash_credential(f"ta{i + 1:02d}"), Role.TA)
        )
    for i in range(students):
        accounts.append(
            UserAccount(f"u-s{i + 1:03d}", f"Student {i + 1}", f"s{i + 1:03d}",
                        hash_credential(f"s{i + 1:03d}"), Role.STUDENT)
        )
    return accounts
