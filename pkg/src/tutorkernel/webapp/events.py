"""Course events: creation, scheduling, slots, problem assignment, and
grading-task distribution."""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..common.util import new_id, now_ms
from ..model.assign import AssignError, AssignStrategy, assign_problems
from ..model.records import CourseEvent, EventKind, Problem, Schedule, AssignmentKey
from ..model.roles import Role
from .editor import graded_submission


def _load_event(app, event_id: str) -> CourseEvent:
    return CourseEvent.from_row(app.load_or_404("events", event_id))


def _save_event(app, event: CourseEvent) -> None:
    app.store.write("events", event.event_id, event.to_row())


def list_events(app, req: Request) -> Response:
    user = app.current_user(req)
    rows = app.store.scan_payloads("events")
    if user["role"] == Role.STUDENT:
        out = []
        for row in rows:
            event = CourseEvent.from_row(row)
            mine = event.assignments.get(user["user_id"])
            if mine is None:
                continue
            out.append(
                {
                    "event_id": event.event_id,
                    "kind": event.kind.value,
                    "title": event.title,
                    "schedules": [s.to_row() for s in event.schedules],
                    "assigned_problems": mine,
                }
            )
        return Response.json({"events": out})
    return Response.json({"events": rows})


def create_event(app, req: Request) -> Response:
    body = req.json()
    try:
        kind = EventKind(body.get("kind", ""))
    except ValueError:
        raise HttpError(400, "kind must be LAB, EXAM or QUIZ")
    title = body.get("title")
    if not title:
        raise HttpError(400, "title is required")
    event = CourseEvent(event_id=body.get("event_id") or new_id("ev"), kind=kind, title=title)
    _save_event(app, event)
    return Response.json(event.to_row(), status=201)


def delete_event(app, req: Request) -> Response:
    event = _load_event(app, req.params["event_id"])
    for record in app.store.scan("grades"):
        key = AssignmentKey.from_string(record["payload"]["assignment_key"])
        if key.event_id == event.event_id:
            raise HttpError(409, "event has grades recorded; refusing to delete")
    app.store.delete("events", event.event_id)
    return Response.json({"ok": True})


def add_schedule(app, req: Request) -> Response:
    event = _load_event(app, req.params["event_id"])
    body = req.json()
    try:
        schedule = Schedule(
            schedule_id=body.get("schedule_id") or new_id("sch"),
            start=int(body["start"]),
            end=int(body["end"]),
            slot_members=list(body.get("slot_members", [])),
        )
    except (KeyError, TypeError) as exc:
        raise HttpError(400, f"start and end timestamps are required: {exc}")
    except ValueError as exc:
        raise HttpError(400, str(exc))
    _validate_members(app, schedule.slot_members)
    event.schedules.append(schedule)
    _save_event(app, event)
    return Response.json(event.to_row(), status=201)


def add_slots(app, req: Request) -> Response:
    event = _load_event(app, req.params["event_id"])
    schedule = next(
        (s for s in event.schedules if s.schedule_id == req.params["schedule_id"]), None
    )
    if schedule is None:
        raise HttpError(404, "no such schedule")
    members = req.json().get("slot_members", [])
    _validate_members(app, members)
    schedule.slot_members = sorted(set(schedule.slot_members) | set(members))
    _save_event(app, event)
    return Response.json(event.to_row())


def _validate_members(app, members: list[str]) -> None:
    enrolled = {a["user_id"] for a in app.enrolled_students()}
    strangers = set(members) - enrolled
    if strangers:
        raise HttpError(400, f"not enrolled students: {sorted(strangers)}")


def assign(app, req: Request) -> Response:
    event = _load_event(app, req.params["event_id"])
    body = req.json()
    try:
        strategy = AssignStrategy(body.get("strategy", ""))
    except ValueError:
        valid = ", ".join(s.value for s in AssignStrategy)
        raise HttpError(400, f"strategy must be one of: {valid}")
    pool_ids = body.get("problem_ids") or []
    pool = [Problem.from_row(app.load_or_404("problems", pid)) for pid in pool_ids]
    students = body.get("students") or [a["user_id"] for a in app.enrolled_students()]
    _validate_members(app, students)
    try:
        assignments = assign_problems(
            event, students, pool, strategy, int(body.get("seed", 0)), body.get("k")
        )
    except AssignError as exc:
        raise HttpError(400, str(exc))
    event.assignments = assignments
    _save_event(app, event)
    return Response.json(event.to_row())


def assign_graders(app, req: Request) -> Response:
    """Distribute this event's ungraded submissions round-robin over graders."""
    event = _load_event(app, req.params["event_id"])
    body = req.json()
    graders = body.get("graders") or [
        a["user_id"]
        for a in app.store.scan_payloads("accounts")
        if a["role"] in (Role.TA.value, Role.TUTOR.value) and a.get("active", True)
    ]
    if not graders:
        raise HttpError(400, "no graders available")
    graders = sorted(graders)
    already_tasked = {
        rec["payload"]["assignment_key"] for rec in app.store.scan("tasks", "event_id", event.event_id)
    }
    created = []
    index = 0
    for student in sorted(event.assignments):
        for problem_id in event.assignments[student]:
            key = AssignmentKey(student, event.event_id, problem_id)
            if key.as_string() in already_tasked:
                continue
            if graded_submission(app, key) is None:
                continue
            if app.store.get("grades", key.as_string()) is not None:
                continue
            task_id = new_id("task")
            app.store.write(
                "tasks",
                task_id,
                {
                    "task_id": task_id,
                    "grader": graders[index % len(graders)],
                    "assignment_key": key.as_string(),
                    "event_id": event.event_id,
                    "done": False,
                    "created_at": now_ms(),
                },
            )
            created.append(task_id)
            index += 1
    return Response.json({"created": len(created)})
