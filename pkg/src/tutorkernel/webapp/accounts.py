"""Account management (teacher only). Password changes sweep the user's
sessions; role edits bite on the target's next request because the router
re-reads the account row every time."""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..common.util import new_id, now_ms
from ..model.fixture import hash_credential
from ..model.records import UserAccount
from ..model.roles import Role


def list_accounts(app, req: Request) -> Response:
    rows = []
    for row in app.store.scan_payloads("accounts"):
        safe = dict(row)
        safe.pop("credential_hash", None)
        rows.append(safe)
    return Response.json({"accounts": sorted(rows, key=lambda r: r["user_id"])})


def create_account(app, req: Request) -> Response:
    body = req.json()
    login = body.get("login")
    if not login:
        raise HttpError(400, "login is required")
    if app.store.scan("accounts", "login", login):
        raise HttpError(409, f"login {login!r} is taken")
    try:
        role = Role(body.get("role", ""))
    except ValueError:
        raise HttpError(400, "role must be one of " + ", ".join(r.value for r in Role))
    credential = body.get("credential")
    if not credential:
        raise HttpError(400, "credential is required")
    account = UserAccount(
        user_id=body.get("user_id") or new_id("u"),
        display_name=body.get("display_name", login),
        login=login,
        credential_hash=hash_credential(credential),
        role=role,
    )
    app.store.write("accounts", account.user_id, account.to_row())
    _mail(app, login, "account-created", f"An account was created for {login}.")
    return Response.json({"user_id": account.user_id}, status=201)


def update_account(app, req: Request) -> Response:
    row = app.load_or_404("accounts", req.params["user_id"])
    body = req.json()
    if "display_name" in body:
        row["display_name"] = body["display_name"]
    if "role" in body:
        try:
            row["role"] = Role(body["role"]).value
        except ValueError:
            raise HttpError(400, "bad role")
    if "active" in body:
        row["active"] = bool(body["active"])
        if not row["active"]:
            app.sessions.drop_user(row["user_id"])
    if "credential" in body:
        row["credential_hash"] = hash_credential(body["credential"])
        app.sessions.drop_user(row["user_id"])  # existing sessions die with the old password
    if "login" in body and body["login"] != row["login"]:
        if app.store.scan("accounts", "login", body["login"]):
            raise HttpError(409, f"login {body['login']!r} is taken")
        row["login"] = body["login"]
    app.store.write("accounts", row["user_id"], row)
    return Response.json({"ok": True})


def delete_account(app, req: Request) -> Response:
    user = app.current_user(req)
    target = req.params["user_id"]
    if target == user["user_id"]:
        raise HttpError(409, "refusing to delete your own account")
    app.load_or_404("accounts", target)
    app.sessions.drop_user(target)
    app.store.delete("accounts", target)
    return Response.json({"ok": True})


def _mail(app, to: str, subject: str, text: str) -> None:
    """Mailer stub: outgoing mail lands in the outbox table."""
    mail_id = new_id("mail")
    app.store.write("outbox", mail_id, {"mail_id": mail_id, "to": to, "subject": subject,
                                        "text": text, "at": now_ms()})
