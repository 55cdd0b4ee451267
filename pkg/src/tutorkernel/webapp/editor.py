"""Code saves, history, grading, submissions, and the ephemeral admin editor.

History is append-only: snapshots are only ever added or tombstoned (teacher
only), never mutated or reordered. The graded submission of an assignment is
the latest non-deleted SUBMIT snapshot, so a second SUBMIT supersedes the
mark by construction.
"""
from __future__ import annotations

import json

from ..common.httpkit import HttpError, Request, Response
from ..common.util import new_id, now_ms
from ..model.records import AssignmentKey, CourseEvent, Grade, Stimulus, PRACTICE

SNAP_KEY = "snap-{:010d}"


def _assignment_key(app, req: Request, body: dict | None = None) -> AssignmentKey:
    src = body if body is not None else req.query
    user = src.get("user") or req.query.get("user")
    event = src.get("event") or req.query.get("event") or PRACTICE
    problem = src.get("problem") or req.query.get("problem")
    if not user or not problem:
        raise HttpError(400, "user and problem are required")
    return AssignmentKey(user, event, problem)


def _snapshots_for(app, key: AssignmentKey) -> list[dict]:
    rows = app.store.scan_payloads("snapshots", "assignment_key", key.as_string())
    return sorted(rows, key=lambda r: r["snapshot_id"])


def graded_submission(app, key: AssignmentKey) -> dict | None:
    submits = [
        s for s in _snapshots_for(app, key)
        if s["stimulus"] == Stimulus.SUBMIT.value and not s.get("deleted")
    ]
    return submits[-1] if submits else None


def _check_save_window(app, user_id: str, event_id: str, problem_id: str) -> None:
    if event_id == PRACTICE:
        problem = app.load_or_404("problems", problem_id)
        if not problem.get("practice"):
            raise HttpError(403, "problem is not open for practice")
        return
    event = CourseEvent.from_row(app.load_or_404("events", event_id))
    if problem_id not in event.assignments.get(user_id, []):
        raise HttpError(403, "problem is not assigned to you for this event")
    if not event.is_open(now_ms(), user_id):
        raise HttpError(403, "outside the schedule window")


def save_code(app, req: Request) -> Response:
    user = app.current_user(req)
    body = req.json()
    problem_id = body.get("problem")
    event_id = body.get("event") or PRACTICE
    code = body.get("code", "")
    try:
        stimulus = Stimulus(body.get("stimulus", "MANUAL_SAVE"))
    except ValueError:
        raise HttpError(400, f"unknown stimulus {body.get('stimulus')!r}")
    if not problem_id:
        raise HttpError(400, "problem is required")
    if len(code.encode("utf-8")) > app.code_size_cap:
        raise HttpError(413, f"code exceeds the {app.code_size_cap} byte cap")
    # saves are always the student's own work; admins inspect via the admin editor
    key = AssignmentKey(user["user_id"], event_id, problem_id)
    _check_save_window(app, key.user_id, key.event_id, key.problem_id)

    snapshot_id = app.store.bump("counters", "snapshots")
    previous = _snapshots_for(app, key)
    created_at = now_ms()
    if previous and previous[-1]["created_at"] >= created_at:
        created_at = previous[-1]["created_at"] + 1
    row = {
        "snapshot_id": snapshot_id,
        "assignment_key": key.as_string(),
        "code": code,
        "stimulus": stimulus.value,
        "created_at": created_at,
        "linked_log": None,
        "deleted": False,
    }
    app.store.write("snapshots", SNAP_KEY.format(snapshot_id), row)
    return Response.json({"snapshot_id": snapshot_id, "created_at": created_at})


def editor_context(app, req: Request) -> Response:
    """Everything the editor needs to open an assignment: statement, template,
    the student's last save, and the submission state."""
    user = app.current_user(req)
    event = req.query.get("event") or PRACTICE
    problem_id = req.query.get("problem")
    if not problem_id:
        raise HttpError(400, "problem is required")
    key = AssignmentKey(user["user_id"], event, problem_id)
    problem = app.load_or_404("problems", problem_id)
    snapshots = [s for s in _snapshots_for(app, key) if not s.get("deleted")]
    last = snapshots[-1] if snapshots else None
    submitted = graded_submission(app, key)
    return Response.json(
        {
            "problem_id": problem_id,
            "title": problem["title"],
            "statement": problem["statement"],
            "template_code": problem["template_code"],
            "code": last["code"] if last else problem["template_code"],
            "last_stimulus": last["stimulus"] if last else None,
            "submitted_snapshot_id": submitted["snapshot_id"] if submitted else None,
        }
    )


def history(app, req: Request) -> Response:
    key = _assignment_key(app, req)
    snapshots = _snapshots_for(app, key)
    logs = sorted(
        app.store.scan_payloads("logs", "assignment_key", key.as_string()),
        key=lambda r: r["seq"],
    )
    by_snapshot: dict[int, str] = {}
    for row in logs:
        sid = row.get("snapshot_id")
        if sid is not None and sid not in by_snapshot:
            by_snapshot[sid] = row["log_id"]
    out = []
    for snap in snapshots:
        entry = dict(snap)
        if entry.get("deleted"):
            entry["code"] = ""
        entry["linked_log"] = entry.get("linked_log") or by_snapshot.get(snap["snapshot_id"])
        out.append(entry)
    return Response.json({"assignment_key": key.as_string(), "snapshots": out})


def submission(app, req: Request) -> Response:
    key = _assignment_key(app, req)
    snap = graded_submission(app, key)
    if snap is None:
        raise HttpError(404, "nothing submitted for this assignment")
    grade_row = app.store.get("grades", key.as_string())
    return Response.json({"snapshot": snap, "grade": grade_row})


def submissions(app, req: Request) -> Response:
    """Submissions viewer: graded-submission snapshots, filterable."""
    event = req.query.get("event")
    problem = req.query.get("problem")
    out = []
    seen: set[str] = set()
    for row in app.store.scan_payloads("snapshots"):
        if row["stimulus"] != Stimulus.SUBMIT.value or row.get("deleted"):
            continue
        key = AssignmentKey.from_string(row["assignment_key"])
        if event and key.event_id != event:
            continue
        if problem and key.problem_id != problem:
            continue
        seen.add(row["assignment_key"])
    for ak in sorted(seen):
        key = AssignmentKey.from_string(ak)
        snap = graded_submission(app, key)
        if snap:
            out.append(
                {
                    "assignment_key": ak,
                    "user": key.user_id,
                    "event": key.event_id,
                    "problem": key.problem_id,
                    "snapshot_id": snap["snapshot_id"],
                    "created_at": snap["created_at"],
                    "graded": app.store.get("grades", ak) is not None,
                }
            )
    return Response.json({"submissions": out})


def grade(app, req: Request) -> Response:
    user = app.current_user(req)
    body = req.json()
    key = _assignment_key(app, req, body)
    if graded_submission(app, key) is None:
        raise HttpError(409, "assignment has no submission to grade")
    try:
        grade_row = Grade(
            assignment_key=key,
            score=float(body.get("score", -1)),
            max_score=float(body.get("max_score", 0)),
            grader=user["user_id"],
            remarks=body.get("remarks", ""),
        )
    except (TypeError, ValueError) as exc:
        raise HttpError(400, str(exc))
    app.store.write("grades", key.as_string(), grade_row.to_row())
    for record in app.store.scan("tasks"):
        task = record["payload"]
        if task["assignment_key"] == key.as_string() and not task["done"]:
            task["done"] = True
            task["graded_by"] = user["user_id"]
            app.store.write("tasks", task["task_id"], task)
    return Response.json(grade_row.to_row())


def delete_snapshot(app, req: Request) -> Response:
    """Teacher-only tombstone; the id and its place in history survive."""
    snapshot_id = int(req.params["snapshot_id"])
    row = app.load_or_404("snapshots", SNAP_KEY.format(snapshot_id))
    row["deleted"] = True
    row["code"] = ""
    app.store.write("snapshots", SNAP_KEY.format(snapshot_id), row)
    return Response.json({"ok": True, "snapshot_id": snapshot_id})


# -- admin editor: ephemeral working copies ------------------------------------

_COPY_TTL_S = 3600.0


def _copy_key(copy_id: str) -> str:
    return f"admincopy:{copy_id}"


def _load_copy(app, copy_id: str) -> dict:
    raw = app.cache.get(_copy_key(copy_id))
    if raw is None:
        raise HttpError(404, "no such working copy (it may have been closed)")
    return json.loads(raw.decode("utf-8"))


def _store_copy(app, copy_id: str, copy: dict) -> None:
    app.cache.set(_copy_key(copy_id), json.dumps(copy).encode("utf-8"), _COPY_TTL_S)


def admin_copy_open(app, req: Request) -> Response:
    user = app.current_user(req)
    body = req.json()
    key = _assignment_key(app, req, body)
    snapshots = [s for s in _snapshots_for(app, key) if not s.get("deleted")]
    wanted = body.get("snapshot_id")
    source = None
    if wanted is not None:
        source = next((s for s in snapshots if s["snapshot_id"] == wanted), None)
    elif snapshots:
        source = snapshots[-1]
    if source is None:
        raise HttpError(404, "no snapshot to copy")
    copy_id = new_id("copy")
    copy = {
        "copy_id": copy_id,
        "owner": user["user_id"],
        "user_id": key.user_id,
        "event_id": key.event_id,
        "problem_id": key.problem_id,
        "source_snapshot_id": source["snapshot_id"],
        "code": source["code"],
    }
    _store_copy(app, copy_id, copy)
    return Response.json(copy)


def admin_copy_get(app, req: Request) -> Response:
    return Response.json(_load_copy(app, req.params["copy_id"]))


def admin_copy_update(app, req: Request) -> Response:
    copy = _load_copy(app, req.params["copy_id"])
    copy["code"] = req.json().get("code", copy["code"])
    _store_copy(app, req.params["copy_id"], copy)
    return Response.json({"ok": True})


def admin_copy_run(app, req: Request) -> Response:
    """Compile/execute/evaluate the working copy; originals stay untouched."""
    user = app.current_user(req)
    copy = _load_copy(app, req.params["copy_id"])
    body = req.json()
    action = body.get("action", "compile").lower()
    if action not in ("compile", "execute", "evaluate"):
        raise HttpError(400, "action must be compile, execute or evaluate")
    payload = {
        "code": copy["code"],
        "stdin": body.get("stdin", ""),
        "language": body.get("language"),
        "context": {"kind": "admin", "user_id": user["user_id"], "problem_id": copy["problem_id"]},
    }
    if action == "evaluate":
        payload["problem_id"] = copy["problem_id"]
    status, reply = app.call_engine(f"/engine/{action}", payload, user["token"])
    return Response.json(reply, status=status)


def admin_copy_close(app, req: Request) -> Response:
    app.cache.delete(_copy_key(req.params["copy_id"]))
    return Response.json({"ok": True})
