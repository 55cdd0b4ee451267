"""Derivations over collected snapshots and attempt logs.

Every function here is a pure function of store contents: recomputing after a
dump/load round-trip gives identical results, and computing over a prefix of
the logs then extending equals computing over the whole (incremental ==
batch).
"""
from __future__ import annotations

import re
from typing import Callable, Optional

from ..model.records import AssignmentKey, EventKind, Stimulus
from ..store.client import StoreClient

# -- per-assignment series ----------------------------------------------------


def _snapshots(store: StoreClient, key: AssignmentKey) -> list[dict]:
    rows = store.scan_payloads("snapshots", "assignment_key", key.as_string())
    return sorted(rows, key=lambda r: r["snapshot_id"])


def _logs(store: StoreClient, key: AssignmentKey) -> list[dict]:
    rows = store.scan_payloads("logs", "assignment_key", key.as_string())
    return sorted(rows, key=lambda r: r["seq"])


def code_size_series(store: StoreClient, key: AssignmentKey) -> list[tuple[int, int]]:
    """(timestamp, code size in bytes) per snapshot, in save order."""
    return [
        (row["created_at"], len(row["code"].encode("utf-8")))
        for row in _snapshots(store, key)
    ]


def save_progression(store: StoreClient, key: AssignmentKey) -> list[tuple[int, str]]:
    """(timestamp, stimulus) per snapshot, in save order."""
    return [(row["created_at"], row["stimulus"]) for row in _snapshots(store, key)]


def execution_sequence(
    store: StoreClient, key: AssignmentKey, action: Optional[str] = None
) -> list[dict]:
    """Attempt-log summaries in time order, optionally filtered by action."""
    rows = _logs(store, key)
    if action is not None:
        rows = [r for r in rows if r["action"] == action]
    return [
        {
            "log_id": r["log_id"],
            "action": r["action"],
            "at": r["at"],
            "status": r["status"],
            "verdict_counts": r.get("verdict_counts"),
        }
        for r in rows
    ]


# -- error timelines -------------------------------------------------------------

_IDENTIFIER = re.compile(r"'[^']*'|\"[^\"]*\"")
_NUMBER = re.compile(r"\b\d+\b")


def error_class(diagnostic: dict) -> str:
    """Stable class key for a diagnostic: its code when present, else the
    message text with identifiers and numbers blanked."""
    if diagnostic.get("code"):
        return str(diagnostic["code"])
    text = diagnostic.get("text", "")
    text = _IDENTIFIER.sub("'<id>'", text)
    text = _NUMBER.sub("<n>", text)
    return text.strip()


def error_timeline(store: StoreClient, key: AssignmentKey) -> list[dict]:
    """Episodes of compile errors: when each error class appeared and when it
    was fixed (the first later compile lacking it). Unfixed classes stay open."""
    compiles = [r for r in _logs(store, key) if r["action"] == "COMPILE"]
    open_episodes: dict[str, dict] = {}
    episodes: list[dict] = []
    for row in compiles:
        present = {error_class(d) for d in row.get("diagnostics") or []}
        for cls in sorted(present):
            if cls not in open_episodes:
                episode = {"error_class": cls, "first_seen": row["at"], "fixed_at": None, "fix_duration": None}
                open_episodes[cls] = episode
                episodes.append(episode)
        for cls in list(open_episodes):
            if cls not in present:
                episode = open_episodes.pop(cls)
                episode["fixed_at"] = row["at"]
                episode["fix_duration"] = row["at"] - episode["first_seen"]
    return episodes


# -- course statistics --------------------------------------------------------------


def _graded_submission(snapshots: list[dict]) -> Optional[dict]:
    submits = [s for s in snapshots if s["stimulus"] == Stimulus.SUBMIT.value and not s.get("deleted")]
    return submits[-1] if submits else None


def course_statistics(store: StoreClient, user_id: Optional[str] = None) -> dict:
    """Counts over the whole course, or scoped to one student."""
    snapshots = store.scan_payloads("snapshots")
    logs = store.scan_payloads("logs")
    if user_id is not None:
        snapshots = [s for s in snapshots if s["assignment_key"].split("/", 1)[0] == user_id]
        logs = [l for l in logs if l["assignment_key"].split("/", 1)[0] == user_id]

    by_assignment: dict[str, list[dict]] = {}
    for s in snapshots:
        by_assignment.setdefault(s["assignment_key"], []).append(s)
    for rows in by_assignment.values():
        rows.sort(key=lambda r: r["snapshot_id"])

    submitted = sum(1 for rows in by_assignment.values() if _graded_submission(rows))

    latest_eval: dict[str, dict] = {}
    for row in logs:
        if row["action"] == "EVALUATE":
            latest_eval[row["assignment_key"]] = row  # rows arrive seq-ordered
    correct = 0
    for row in latest_eval.values():
        counts = row.get("verdict_counts") or {}
        total = sum(counts.values())
        if total and counts.get("PASS", 0) == total:
            correct += 1

    events = store.scan_payloads("events")
    stats = {
        "submitted_count": submitted,
        "correct_count": correct,
        "labs_conducted": sum(1 for e in events if e["kind"] == EventKind.LAB.value),
        "exams_conducted": sum(1 for e in events if e["kind"] == EventKind.EXAM.value),
        "quizzes_conducted": sum(1 for e in events if e["kind"] == EventKind.QUIZ.value),
        "snapshot_count": len(snapshots),
        "compile_count": sum(1 for l in logs if l["action"] == "COMPILE"),
        "execution_count": sum(1 for l in logs if l["action"] == "EXECUTE"),
        "evaluation_count": sum(1 for l in logs if l["action"] == "EVALUATE"),
    }
    return stats


# -- event dashboard ------------------------------------------------------------------

Scorer = Callable[[list[dict]], float]


def total_grade_scorer(grades: list[dict]) -> float:
    """Default score: sum of grade scores (the scoring policy is pluggable)."""
    return sum(g["score"] for g in grades)


def dashboard(store: StoreClient, event_id: str, scorer: Scorer = total_grade_scorer) -> dict:
    """Student rankings and score distribution for one event.

    Competition ranking: equal scores share a rank and the next rank skips
    (5, 5, 3 ranks as 1, 1, 3); ties order by user id.
    """
    event = store.get("events", event_id)
    if event is None:
        return {"event_id": event_id, "rankings": [], "distribution": {}}
    grades_by_user: dict[str, list[dict]] = {}
    for record in store.scan("grades"):
        grade = record["payload"]
        key = AssignmentKey.from_string(grade["assignment_key"])
        if key.event_id == event_id:
            grades_by_user.setdefault(key.user_id, []).append(grade)
    scored = sorted(
        ((user, scorer(grades)) for user, grades in grades_by_user.items()),
        key=lambda pair: (-pair[1], pair[0]),
    )
    rankings = []
    for position, (user, score) in enumerate(scored, start=1):
        if rankings and rankings[-1]["score"] == score:
            rank = rankings[-1]["rank"]
        else:
            rank = position
        rankings.append({"rank": rank, "user_id": user, "score": score})
    distribution: dict[str, int] = {}
    for entry in rankings:
        bucket = str(entry["score"])
        distribution[bucket] = distribution.get(bucket, 0) + 1
    return {"event_id": event_id, "rankings": rankings, "distribution": distribution}
