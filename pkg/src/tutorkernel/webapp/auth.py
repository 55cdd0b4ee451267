"""Login and session controllers."""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..model.fixture import hash_credential
from ..model.roles import Role


def login(app, req: Request) -> Response:
    body = req.json()
    login_name = body.get("login", "")
    credential = body.get("credential", "")
    account = None
    for row in app.store.scan_payloads("accounts", "login", login_name):
        account = row
        break
    # bad credential and unknown user are indistinguishable to the caller
    if (
        account is None
        or not account.get("active", True)
        or account["credential_hash"] != hash_credential(credential)
    ):
        raise HttpError(401, "invalid credentials")
    if account["role"] == Role.ADMINISTRATOR.value:
        raise HttpError(403, "administrator accounts have no web access")
    token = app.sessions.create(account["user_id"], account["role"])
    return Response.json(
        {"token": token, "user_id": account["user_id"], "role": account["role"],
         "display_name": account["display_name"]}
    )


def logout(app, req: Request) -> Response:
    user = app.current_user(req)
    app.sessions.drop(user["token"])
    return Response.json({"ok": True})


def me(app, req: Request) -> Response:
    user = app.current_user(req)
    account = dict(user["account"])
    account.pop("credential_hash", None)
    return Response.json(account)
