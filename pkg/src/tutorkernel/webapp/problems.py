"""Problem and test-case management.

Problem create/update/delete is tutor work; test cases are open to TAs.
Edits land in the store directly, so anyone viewing the problem sees them on
the next read. Students never receive solution code.
"""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..common.util import new_id, now_ms
from ..model.records import CourseEvent, Problem, TestCase
from ..model.roles import Role, role_at_least

_EDITABLE = ("title", "statement", "solution_code", "template_code", "category")


def _strip_for_student(row: dict) -> dict:
    out = dict(row)
    out.pop("solution_code", None)
    return out


def _student_can_see(app, user_id: str, problem_id: str, practice: bool) -> bool:
    if practice:
        return True
    now = now_ms()
    for record in app.store.scan("events"):
        event = CourseEvent.from_row(record["payload"])
        if problem_id in event.assignments.get(user_id, []) and event.is_open(now, user_id):
            return True
    return False


def list_problems(app, req: Request) -> Response:
    user = app.current_user(req)
    rows = app.store.scan_payloads("problems")
    if role_at_least(user["role"], Role.TA):
        return Response.json({"problems": rows})
    visible = [
        _strip_for_student(r)
        for r in rows
        if _student_can_see(app, user["user_id"], r["problem_id"], r.get("practice", False))
    ]
    return Response.json({"problems": visible})


def get_problem(app, req: Request) -> Response:
    user = app.current_user(req)
    row = app.load_or_404("problems", req.params["problem_id"])
    if role_at_least(user["role"], Role.TA):
        return Response.json(row)
    if not _student_can_see(app, user["user_id"], row["problem_id"], row.get("practice", False)):
        raise HttpError(403, "problem is not open to you right now")
    return Response.json(_strip_for_student(row))


def create_problem(app, req: Request) -> Response:
    body = req.json()
    title = body.get("title")
    if not title:
        raise HttpError(400, "title is required")
    problem = Problem(
        problem_id=body.get("problem_id") or new_id("p"),
        title=title,
        statement=body.get("statement", ""),
        solution_code=body.get("solution_code", ""),
        template_code=body.get("template_code", ""),
        category=body.get("category", ""),
        practice=bool(body.get("practice", False)),
    )
    app.store.write("problems", problem.problem_id, problem.to_row())
    return Response.json(problem.to_row(), status=201)


def update_problem(app, req: Request) -> Response:
    row = app.load_or_404("problems", req.params["problem_id"])
    body = req.json()
    for field in _EDITABLE:
        if field in body:
            row[field] = body[field]
    app.store.write("problems", row["problem_id"], row)
    return Response.json(row)


def delete_problem(app, req: Request) -> Response:
    problem_id = req.params["problem_id"]
    app.load_or_404("problems", problem_id)
    now = now_ms()
    for record in app.store.scan("events"):
        event = CourseEvent.from_row(record["payload"])
        still_open = any(s.end > now for s in event.schedules)
        referenced = any(problem_id in probs for probs in event.assignments.values())
        if still_open and referenced:
            raise HttpError(409, f"problem is assigned in open event {event.event_id}")
    for record in app.store.scan("testcases", "problem_id", problem_id):
        app.store.delete("testcases", record["key"])
    app.store.delete("problems", problem_id)
    return Response.json({"ok": True})


def mark_practice(app, req: Request) -> Response:
    row = app.load_or_404("problems", req.params["problem_id"])
    row["practice"] = bool(req.json().get("practice", True))
    app.store.write("problems", row["problem_id"], row)
    return Response.json(row)


def bulk_upload(app, req: Request) -> Response:
    """Batch upload: {"problems": [{...problem fields, "tests": [...]}, ...]}.

    scripts/upload_problems.py packs the documented directory layout into
    this shape.
    """
    body = req.json()
    items = body.get("problems")
    if not isinstance(items, list) or not items:
        raise HttpError(400, "problems must be a non-empty list")
    created = []
    for item in items:
        if not item.get("title"):
            raise HttpError(400, "every problem needs a title")
        problem = Problem(
            problem_id=item.get("problem_id") or new_id("p"),
            title=item["title"],
            statement=item.get("statement", ""),
            solution_code=item.get("solution_code", ""),
            template_code=item.get("template_code", ""),
            category=item.get("category", ""),
            practice=bool(item.get("practice", False)),
        )
        app.store.write("problems", problem.problem_id, problem.to_row())
        for test in item.get("tests", []):
            _write_test(app, problem.problem_id, test)
        created.append(problem.problem_id)
    return Response.json({"created": created}, status=201)


# -- test cases -----------------------------------------------------------------


def _write_test(app, problem_id: str, body: dict) -> TestCase:
    if "input" not in body or "expected_output" not in body:
        raise HttpError(400, "a test case needs input and expected_output")
    test = TestCase(
        test_id=body.get("test_id") or new_id("t"),
        problem_id=problem_id,
        input=body["input"],
        expected_output=body["expected_output"],
        visible=bool(body.get("visible", True)),
    )
    app.store.write("testcases", test.test_id, test.to_row())
    return test


def list_tests(app, req: Request) -> Response:
    app.load_or_404("problems", req.params["problem_id"])
    rows = app.store.scan_payloads("testcases", "problem_id", req.params["problem_id"])
    return Response.json({"tests": sorted(rows, key=lambda r: r["test_id"])})


def add_test(app, req: Request) -> Response:
    app.load_or_404("problems", req.params["problem_id"])
    test = _write_test(app, req.params["problem_id"], req.json())
    return Response.json(test.to_row(), status=201)


def add_tests_bulk(app, req: Request) -> Response:
    app.load_or_404("problems", req.params["problem_id"])
    tests = req.json().get("tests")
    if not isinstance(tests, list) or not tests:
        raise HttpError(400, "tests must be a non-empty list")
    written = [_write_test(app, req.params["problem_id"], t).test_id for t in tests]
    return Response.json({"created": written}, status=201)


def remove_test(app, req: Request) -> Response:
    if not app.store.delete("testcases", req.params["test_id"]):
        raise HttpError(404, "no such test case")
    return Response.json({"ok": True})
