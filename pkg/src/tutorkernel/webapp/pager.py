"""Pager controllers: help threads students open and admins answer."""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..model import pager as pager_model
from ..model.records import AssignmentKey
from ..model.roles import Role, role_at_least


def list_threads(app, req: Request) -> Response:
    user = app.current_user(req)
    if role_at_least(user["role"], Role.TA):
        rows = app.store.scan_payloads("threads")
    else:
        rows = app.store.scan_payloads("threads", "opener", user["user_id"])
    rows.sort(key=lambda r: r["thread_id"])
    return Response.json({"threads": rows})


def open_thread(app, req: Request) -> Response:
    user = app.current_user(req)
    body = req.json()
    text = body.get("text")
    if not text:
        raise HttpError(400, "text is required")
    context = None
    if body.get("event") and body.get("problem"):
        context = AssignmentKey(user["user_id"], body["event"], body["problem"])
    try:
        thread = pager_model.open_thread(user["user_id"], user["role"], text, context)
    except pager_model.PagerError as exc:
        raise HttpError(403, str(exc))
    app.store.write("threads", thread.thread_id, thread.to_row())
    return Response.json(thread.to_row(), status=201)


def reply(app, req: Request) -> Response:
    user = app.current_user(req)
    text = req.json().get("text")
    if not text:
        raise HttpError(400, "text is required")
    row = app.load_or_404("threads", req.params["thread_id"])
    thread = pager_model.PagerThread.from_row(row)
    if user["role"] == Role.STUDENT and thread.opener != user["user_id"]:
        raise HttpError(403, "students see only their own threads")
    pager_model.reply_thread(thread, user["user_id"], user["role"], text)
    app.store.write("threads", thread.thread_id, thread.to_row())
    return Response.json(thread.to_row())


def delete_msg(app, req: Request) -> Response:
    user = app.current_user(req)
    row = app.load_or_404("threads", req.params["thread_id"])
    thread = pager_model.PagerThread.from_row(row)
    try:
        index = int(req.params["index"])
        pager_model.delete_message(thread, user["user_id"], index)
    except IndexError:
        raise HttpError(404, "no such message")
    except pager_model.PagerError as exc:
        raise HttpError(403, str(exc))
    app.store.write("threads", thread.thread_id, thread.to_row())
    return Response.json(thread.to_row())
