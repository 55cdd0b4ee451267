"""Read-side views: student home, gradecard, practice arena, codebook, and
the admins' task panels."""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..common.util import now_ms
from ..model.records import AssignmentKey, CourseEvent, PRACTICE
from .control import current_config
from .editor import graded_submission, _snapshots_for


def home(app, req: Request) -> Response:
    user = app.current_user(req)
    now = now_ms()
    ongoing = []
    for row in app.store.scan_payloads("events"):
        event = CourseEvent.from_row(row)
        if not event.is_open(now, user["user_id"]):
            continue
        problems = event.assignments.get(user["user_id"], [])
        if not problems:
            continue
        ongoing.append(
            {
                "event_id": event.event_id,
                "kind": event.kind.value,
                "title": event.title,
                "problems": [
                    {"problem_id": pid, "title": (app.store.get("problems", pid) or {}).get("title", pid)}
                    for pid in problems
                ],
            }
        )
    config = current_config(app)
    return Response.json(
        {
            "course_id": app.course_id,
            "user_id": user["user_id"],
            "display_name": user["account"]["display_name"],
            "role": user["role"].value,
            "ongoing_events": ongoing,
            "autosave_period_s": config.autosave_period_s,
        }
    )


def gradecard(app, req: Request) -> Response:
    user = app.current_user(req)
    grades = []
    for record in app.store.scan("grades"):
        grade = record["payload"]
        key = AssignmentKey.from_string(grade["assignment_key"])
        if key.user_id != user["user_id"]:
            continue
        grades.append(
            {
                "event_id": key.event_id,
                "problem_id": key.problem_id,
                "score": grade["score"],
                "max_score": grade["max_score"],
                "remarks": grade.get("remarks", ""),
            }
        )
    by_event: dict[str, list[dict]] = {}
    for g in sorted(grades, key=lambda g: (g["event_id"], g["problem_id"])):
        by_event.setdefault(g["event_id"], []).append(g)
    return Response.json({"grades_by_event": by_event})


def practice_arena(app, req: Request) -> Response:
    rows = [
        {"problem_id": r["problem_id"], "title": r["title"], "category": r["category"]}
        for r in app.store.scan_payloads("problems")
        if r.get("practice")
    ]
    return Response.json({"problems": sorted(rows, key=lambda r: r["problem_id"])})


def codebook(app, req: Request) -> Response:
    """Everything the student has worked on: submitted event solutions and
    last-saved practice code, with grading status."""
    user = app.current_user(req)
    entries = []
    seen: set[str] = set()
    for record in app.store.scan("snapshots"):
        key_str = record["payload"]["assignment_key"]
        if key_str in seen:
            continue
        seen.add(key_str)
        key = AssignmentKey.from_string(key_str)
        if key.user_id != user["user_id"]:
            continue
        if key.is_practice:
            snaps = [s for s in _snapshots_for(app, key) if not s.get("deleted")]
            if not snaps:
                continue
            entries.append(
                {
                    "event_id": PRACTICE,
                    "problem_id": key.problem_id,
                    "kind": "practice",
                    "snapshot_id": snaps[-1]["snapshot_id"],
                    "graded": False,
                }
            )
        else:
            snap = graded_submission(app, key)
            if snap is None:
                continue
            entries.append(
                {
                    "event_id": key.event_id,
                    "problem_id": key.problem_id,
                    "kind": "event",
                    "snapshot_id": snap["snapshot_id"],
                    "graded": app.store.get("grades", key_str) is not None,
                }
            )
    entries.sort(key=lambda e: (e["event_id"], e["problem_id"]))
    return Response.json({"entries": entries})


def codebook_entry(app, req: Request) -> Response:
    """One codebook page: the code (submitted for events, last save for
    practice), the problem statement, and any grade."""
    user = app.current_user(req)
    event = req.query.get("event") or PRACTICE
    problem_id = req.query.get("problem")
    if not problem_id:
        raise HttpError(400, "problem is required")
    key = AssignmentKey(user["user_id"], event, problem_id)
    if key.is_practice:
        snaps = [s for s in _snapshots_for(app, key) if not s.get("deleted")]
        snap = snaps[-1] if snaps else None
    else:
        snap = graded_submission(app, key)
    if snap is None:
        raise HttpError(404, "no code for this entry")
    problem = app.store.get("problems", problem_id) or {}
    return Response.json(
        {
            "assignment_key": key.as_string(),
            "code": snap["code"],
            "snapshot_id": snap["snapshot_id"],
            "statement": problem.get("statement", ""),
            "title": problem.get("title", problem_id),
            "grade": app.store.get("grades", key.as_string()),
        }
    )


# -- task panels ----------------------------------------------------------------


def _split_tasks(rows: list[dict]) -> dict:
    pending = [t for t in rows if not t["done"]]
    complete = [t for t in rows if t["done"]]
    return {
        "pending": sorted(pending, key=lambda t: t["task_id"]),
        "complete": sorted(complete, key=lambda t: t["task_id"]),
    }


def tasks_personal(app, req: Request) -> Response:
    user = app.current_user(req)
    rows = app.store.scan_payloads("tasks", "grader", user["user_id"])
    return Response.json(_split_tasks(rows))


def tasks_overall(app, req: Request) -> Response:
    """All grading tasks grouped by admin, then by course event."""
    by_grader: dict[str, dict[str, list[dict]]] = {}
    for row in app.store.scan_payloads("tasks"):
        by_grader.setdefault(row["grader"], {}).setdefault(row["event_id"], []).append(row)
    out = {
        grader: {event: _split_tasks(rows) for event, rows in events.items()}
        for grader, events in by_grader.items()
    }
    return Response.json({"by_grader": out})
