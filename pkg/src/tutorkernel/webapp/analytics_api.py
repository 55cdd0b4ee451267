"""Analytics routes; every series exports as CSV with ?format=csv."""
from __future__ import annotations

from .. import analytics
from ..common.httpkit import HttpError, Request, Response
from ..model.records import AssignmentKey, PRACTICE


def _key(req: Request) -> AssignmentKey:
    user = req.query.get("user")
    problem = req.query.get("problem")
    if not user or not problem:
        raise HttpError(400, "user and problem are required")
    return AssignmentKey(user, req.query.get("event") or PRACTICE, problem)


def _render(req: Request, header: list[str], rows: list, payload: dict) -> Response:
    if req.query.get("format") == "csv":
        return Response.text(analytics.rows_to_csv(header, rows), content_type="text/csv")
    return Response.json(payload)


def code_size(app, req: Request) -> Response:
    series = analytics.code_size_series(app.store, _key(req))
    return _render(req, ["timestamp", "size_bytes"], series, {"series": series})


def progression(app, req: Request) -> Response:
    series = analytics.save_progression(app.store, _key(req))
    return _render(req, ["timestamp", "stimulus"], series, {"series": series})


def timeline(app, req: Request) -> Response:
    episodes = analytics.error_timeline(app.store, _key(req))
    rows = [
        (e["error_class"], e["first_seen"], e["fixed_at"] or "", e["fix_duration"] or "")
        for e in episodes
    ]
    return _render(
        req, ["error_class", "first_seen", "fixed_at", "fix_duration"], rows, {"episodes": episodes}
    )


def sequence(app, req: Request) -> Response:
    entries = analytics.execution_sequence(app.store, _key(req), req.query.get("action"))
    rows = [(e["log_id"], e["action"], e["at"], e["status"]) for e in entries]
    return _render(req, ["log_id", "action", "at", "status"], rows, {"sequence": entries})


def statistics(app, req: Request) -> Response:
    stats = analytics.course_statistics(app.store, req.query.get("user"))
    rows = sorted(stats.items())
    return _render(req, ["metric", "value"], rows, stats)


def event_dashboard(app, req: Request) -> Response:
    board = analytics.dashboard(app.store, req.params["event_id"])
    rows = [(r["rank"], r["user_id"], r["score"]) for r in board["rankings"]]
    return _render(req, ["rank", "user_id", "score"], rows, board)
