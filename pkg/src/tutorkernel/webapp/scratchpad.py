"""Virtual files and folders per user, plus compile/execute passthrough.

The tree stays a tree: a folder can never be moved into its own subtree and
sibling names are unique. Scratchpad runs reach the engine with scratchpad
context, which the engine never logs.
"""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..common.util import new_id

ROOT = ""


def _nodes_for(app, owner: str) -> dict[str, dict]:
    return {
        row["node_id"]: row for row in app.store.scan_payloads("scratchpad", "owner", owner)
    }


def _own_node(app, req: Request, node_id: str) -> dict:
    user = app.current_user(req)
    row = app.load_or_404("scratchpad", node_id)
    if row["owner"] != user["user_id"]:
        raise HttpError(403, "not your scratchpad node")
    return row


def _check_name_free(nodes: dict[str, dict], parent: str, name: str, ignore: str = "") -> None:
    for row in nodes.values():
        if row["parent"] == parent and row["name"] == name and row["node_id"] != ignore:
            raise HttpError(409, f"{name!r} already exists in that folder")


def tree(app, req: Request) -> Response:
    user = app.current_user(req)
    nodes = sorted(_nodes_for(app, user["user_id"]).values(), key=lambda r: (r["parent"], r["name"]))
    return Response.json({"nodes": nodes})


def create_node(app, req: Request) -> Response:
    user = app.current_user(req)
    body = req.json()
    kind = body.get("kind", "FILE").upper()
    if kind not in ("FILE", "FOLDER"):
        raise HttpError(400, "kind must be FILE or FOLDER")
    name = body.get("name")
    if not name or "/" in name:
        raise HttpError(400, "a node needs a name without slashes")
    parent = body.get("parent", ROOT)
    nodes = _nodes_for(app, user["user_id"])
    if parent != ROOT:
        folder = nodes.get(parent)
        if folder is None or folder["kind"] != "FOLDER":
            raise HttpError(400, "parent must be one of your folders")
    _check_name_free(nodes, parent, name)
    row = {
        "node_id": new_id("node"),
        "owner": user["user_id"],
        "kind": kind,
        "name": name,
        "parent": parent,
        "content": body.get("content", "") if kind == "FILE" else None,
    }
    app.store.write("scratchpad", row["node_id"], row)
    return Response.json(row, status=201)


def save_content(app, req: Request) -> Response:
    row = _own_node(app, req, req.params["node_id"])
    body = req.json()
    if row["kind"] != "FILE":
        raise HttpError(400, "only files hold content")
    if "content" in body:
        row["content"] = body["content"]
    if "name" in body:
        nodes = _nodes_for(app, row["owner"])
        _check_name_free(nodes, row["parent"], body["name"], ignore=row["node_id"])
        row["name"] = body["name"]
    app.store.write("scratchpad", row["node_id"], row)
    return Response.json(row)


def move_node(app, req: Request) -> Response:
    row = _own_node(app, req, req.params["node_id"])
    new_parent = req.json().get("parent", ROOT)
    nodes = _nodes_for(app, row["owner"])
    if new_parent != ROOT:
        target = nodes.get(new_parent)
        if target is None or target["kind"] != "FOLDER":
            raise HttpError(400, "parent must be one of your folders")
        # walking up from the target must never reach the moved node
        cursor = new_parent
        while cursor != ROOT:
            if cursor == row["node_id"]:
                raise HttpError(409, "cannot move a folder into its own subtree")
            cursor = nodes[cursor]["parent"]
    _check_name_free(nodes, new_parent, row["name"], ignore=row["node_id"])
    row["parent"] = new_parent
    app.store.write("scratchpad", row["node_id"], row)
    return Response.json(row)


def delete_node(app, req: Request) -> Response:
    row = _own_node(app, req, req.params["node_id"])
    nodes = _nodes_for(app, row["owner"])
    if row["kind"] == "FOLDER" and any(n["parent"] == row["node_id"] for n in nodes.values()):
        raise HttpError(409, "folder is not empty")
    app.store.delete("scratchpad", row["node_id"])
    return Response.json({"ok": True})


def run(app, req: Request) -> Response:
    user = app.current_user(req)
    body = req.json()
    node = _own_node(app, req, body.get("node_id", ""))
    if node["kind"] != "FILE":
        raise HttpError(400, "can only run files")
    action = body.get("action", "compile").lower()
    if action not in ("compile", "execute"):
        raise HttpError(400, "action must be compile or execute")
    payload = {
        "code": node["content"] or "",
        "stdin": body.get("stdin", ""),
        "language": body.get("language"),
        "context": {"kind": "scratchpad", "user_id": user["user_id"]},
    }
    status, reply = app.call_engine(f"/engine/{action}", payload, user["token"])
    return Response.json(reply, status=status)
