"""The API service: router, authorization guard, and route table.

Request flow mirrors a router/controller/modules/view split: the router
authenticates the session against the cache and re-reads the account row from
the store (role edits and deletions take effect on the next request), checks
the route's role floor plus the exam lockdown rule, then hands off to the
controller. Controllers speak to the store and cache only; there is no
cross-request mutable state inside an instance, so instances scale out freely
behind the gateway.
"""
from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

from ..cache.client import CacheCluster
from ..cache.sessions import SessionStore
from ..common.httpkit import HttpError, HttpService, Request, Response, http_json
from ..common.util import now_ms
from ..model.records import CourseEvent
from ..model.roles import Role, role_at_least
from ..registry.client import RegistryClient
from ..store.client import StoreClient
from ..store.errors import NotFound, StoreUnavailable
from . import accounts, analytics_api, auth, control, editor, events, pager, problems, scratchpad, views


@dataclass(frozen=True)
class RouteSpec:
    """Declared authorization contract of one route."""

    method: str
    pattern: str
    floor: Optional[Role]  # None = public
    handler: Callable
    exam_scoped: bool = False  # TA access revoked while the named EXAM is open
    exact_role: Optional[Role] = None  # e.g. only students open pager threads


class WebApp:
    def __init__(
        self,
        instance_id: str,
        store: StoreClient,
        cache: CacheCluster,
        registry: Optional[RegistryClient] = None,
        course_id: str = "demo",
        host: str = "127.0.0.1",
        port: int = 0,
        code_size_cap: int = 256 << 10,
    ):
        self.instance_id = instance_id
        self.store = store
        self.cache = cache
        self.sessions = SessionStore(cache)
        self.registry = registry
        self.course_id = course_id
        self.code_size_cap = code_size_cap
        self.service = HttpService(host=host, port=port)
        self._engine_view: tuple[float, list[dict]] = (0.0, [])
        self._engine_lock = threading.Lock()
        self.route_specs: list[RouteSpec] = []
        self._install_routes()

    @property
    def host(self) -> str:
        return self.service.host

    @property
    def port(self) -> int:
        return self.service.port

    def start(self) -> None:
        self.service.start()

    def stop(self) -> None:
        self.service.stop()

    def kill(self) -> None:
        self.service.kill()

    # -- routing table -----------------------------------------------------------

    def _install_routes(self) -> None:
        S, TA, TUT, TEA = Role.STUDENT, Role.TA, Role.TUTOR, Role.TEACHER
        table = [
            RouteSpec("POST", "/api/login", None, auth.login),
            RouteSpec("POST", "/api/logout", S, auth.logout),
            RouteSpec("GET", "/api/me", S, auth.me),

            RouteSpec("POST", "/api/editor/save", S, editor.save_code),
            RouteSpec("GET", "/api/editor/context", S, editor.editor_context),
            RouteSpec("GET", "/api/editor/history", TA, editor.history, exam_scoped=True),
            RouteSpec("GET", "/api/editor/submission", TA, editor.submission, exam_scoped=True),
            RouteSpec("POST", "/api/editor/grade", TA, editor.grade, exam_scoped=True),
            RouteSpec("DELETE", "/api/editor/snapshots/{snapshot_id}", TEA, editor.delete_snapshot),
            RouteSpec("GET", "/api/submissions", TA, editor.submissions, exam_scoped=True),

            RouteSpec("POST", "/api/admin-editor/sessions", TA, editor.admin_copy_open, exam_scoped=True),
            RouteSpec("GET", "/api/admin-editor/{copy_id}", TA, editor.admin_copy_get, exam_scoped=True),
            RouteSpec("PUT", "/api/admin-editor/{copy_id}", TA, editor.admin_copy_update, exam_scoped=True),
            RouteSpec("POST", "/api/admin-editor/{copy_id}/run", TA, editor.admin_copy_run, exam_scoped=True),
            RouteSpec("DELETE", "/api/admin-editor/{copy_id}", TA, editor.admin_copy_close, exam_scoped=True),

            RouteSpec("GET", "/api/problems", S, problems.list_problems),
            RouteSpec("POST", "/api/problems", TUT, problems.create_problem),
            RouteSpec("POST", "/api/problems/bulk", TUT, problems.bulk_upload),
            RouteSpec("GET", "/api/problems/{problem_id}", S, problems.get_problem),
            RouteSpec("PUT", "/api/problems/{problem_id}", TUT, problems.update_problem),
            RouteSpec("DELETE", "/api/problems/{problem_id}", TUT, problems.delete_problem),
            RouteSpec("POST", "/api/problems/{problem_id}/practice", TUT, problems.mark_practice),
            RouteSpec("GET", "/api/problems/{problem_id}/tests", TA, problems.list_tests),
            RouteSpec("POST", "/api/problems/{problem_id}/tests", TA, problems.add_test),
            RouteSpec("POST", "/api/problems/{problem_id}/tests/bulk", TA, problems.add_tests_bulk),
            RouteSpec("DELETE", "/api/tests/{test_id}", TA, problems.remove_test),

            RouteSpec("GET", "/api/events", S, events.list_events),
            RouteSpec("POST", "/api/events", TEA, events.create_event),
            RouteSpec("DELETE", "/api/events/{event_id}", TEA, events.delete_event),
            RouteSpec("POST", "/api/events/{event_id}/schedules", TEA, events.add_schedule),
            RouteSpec("POST", "/api/events/{event_id}/schedules/{schedule_id}/slots", TEA, events.add_slots),
            RouteSpec("POST", "/api/events/{event_id}/assign", TEA, events.assign),
            RouteSpec("POST", "/api/events/{event_id}/assign-graders", TEA, events.assign_graders),

            RouteSpec("GET", "/api/tasks", TA, views.tasks_personal),
            RouteSpec("GET", "/api/tasks/overall", TA, views.tasks_overall),

            RouteSpec("GET", "/api/scratchpad/tree", S, scratchpad.tree),
            RouteSpec("POST", "/api/scratchpad/nodes", S, scratchpad.create_node),
            RouteSpec("PUT", "/api/scratchpad/nodes/{node_id}", S, scratchpad.save_content),
            RouteSpec("POST", "/api/scratchpad/nodes/{node_id}/move", S, scratchpad.move_node),
            RouteSpec("DELETE", "/api/scratchpad/nodes/{node_id}", S, scratchpad.delete_node),
            RouteSpec("POST", "/api/scratchpad/run", S, scratchpad.run),

            RouteSpec("GET", "/api/pager/threads", S, pager.list_threads),
            RouteSpec("POST", "/api/pager/threads", S, pager.open_thread, exact_role=S),
            RouteSpec("POST", "/api/pager/threads/{thread_id}/replies", S, pager.reply),
            RouteSpec("DELETE", "/api/pager/threads/{thread_id}/messages/{index}", S, pager.delete_msg),

            RouteSpec("GET", "/api/control/config", TEA, control.get_config),
            RouteSpec("PUT", "/api/control/config", TEA, control.put_config),
            RouteSpec("POST", "/api/control/plugins/integrate", TEA, control.integrate_plugin),
            RouteSpec("GET", "/api/control/rephrase-rules", TEA, control.get_rules),
            RouteSpec("PUT", "/api/control/rephrase-rules", TEA, control.put_rules),

            RouteSpec("GET", "/api/accounts", TEA, accounts.list_accounts),
            RouteSpec("POST", "/api/accounts", TEA, accounts.create_account),
            RouteSpec("PUT", "/api/accounts/{user_id}", TEA, accounts.update_account),
            RouteSpec("DELETE", "/api/accounts/{user_id}", TEA, accounts.delete_account),

            RouteSpec("GET", "/api/home", S, views.home),
            RouteSpec("GET", "/api/gradecard", S, views.gradecard),
            RouteSpec("GET", "/api/practice", S, views.practice_arena),
            RouteSpec("GET", "/api/codebook", S, views.codebook),
            RouteSpec("GET", "/api/codebook/entry", S, views.codebook_entry),

            RouteSpec("GET", "/api/analytics/code-size", TA, analytics_api.code_size),
            RouteSpec("GET", "/api/analytics/save-progression", TA, analytics_api.progression),
            RouteSpec("GET", "/api/analytics/error-timeline", TA, analytics_api.timeline),
            RouteSpec("GET", "/api/analytics/execution-sequence", TA, analytics_api.sequence),
            RouteSpec("GET", "/api/analytics/statistics", TA, analytics_api.statistics),
            RouteSpec("GET", "/api/analytics/dashboard/{event_id}", TA, analytics_api.event_dashboard),
        ]
        self.route_specs = table
        for spec in table:
            self.service.add_route(spec.method, spec.pattern, self._guarded(spec))

    # -- guard --------------------------------------------------------------------

    def _guarded(self, spec: RouteSpec):
        def run(req: Request) -> Response:
            try:
                if spec.floor is not None:
                    self._authorize(spec, req)
                return spec.handler(self, req)
            except HttpError:
                raise
            except NotFound as exc:
                return Response.json({"error": f"not found: {exc}"}, status=404)
            except StoreUnavailable as exc:
                return Response.json({"error": f"store unavailable: {exc}"}, status=503)

        return run

    def _authorize(self, spec: RouteSpec, req: Request) -> None:
        token = req.headers.get("x-session-token") or req.query.get("token")
        session = self.sessions.lookup(token)
        if session is None:
            raise HttpError(401, "login required")
        account = self.store.get("accounts", session["user_id"])
        if account is None or not account.get("active", True):
            raise HttpError(401, "account gone or inactive")
        role = Role(account["role"])
        req.user = {"user_id": account["user_id"], "role": role, "account": account, "token": token}  # type: ignore[attr-defined]
        if spec.exact_role is not None:
            if role != spec.exact_role:
                raise HttpError(403, f"only {spec.exact_role.value} may do this")
            return
        if not role_at_least(role, spec.floor):
            raise HttpError(403, "insufficient role")
        if spec.exam_scoped and role == Role.TA:
            event = self._resolve_event(req)
            if event is not None and event.is_exam_open(now_ms()):
                raise HttpError(403, "TA access is revoked while this exam is open")

    def _resolve_event(self, req: Request) -> Optional[CourseEvent]:
        event_id = req.params.get("event_id") or req.query.get("event")
        if not event_id and req.method in ("POST", "PUT"):
            body = req.json()
            event_id = body.get("event") or body.get("event_id")
        if not event_id and "copy_id" in req.params:
            copy = self.cache.get(f"admincopy:{req.params['copy_id']}")
            if copy:
                import json as _json

                event_id = _json.loads(copy.decode("utf-8")).get("event_id")
        if not event_id or event_id == "practice":
            return None
        row = self.store.get("events", event_id)
        return CourseEvent.from_row(row) if row else None

    # -- shared controller helpers ---------------------------------------------------

    def current_user(self, req: Request) -> dict:
        return req.user  # type: ignore[attr-defined]

    def load_or_404(self, table: str, key: str) -> dict:
        row = self.store.get(table, key)
        if row is None:
            raise HttpError(404, f"no such {table[:-1]} {key!r}")
        return row

    def enrolled_students(self) -> list[dict]:
        return [
            a
            for a in self.store.scan_payloads("accounts")
            if a["role"] == Role.STUDENT.value and a.get("active", True)
        ]

    def call_engine(self, path: str, body: dict, token: str, timeout: float = 60.0) -> tuple[int, dict]:
        """Proxy a run request to a healthy engine instance on the caller's session."""
        instances = self._engines()
        if not instances:
            raise HttpError(503, "no engine available")
        rec = random.choice(instances)
        try:
            return http_json(
                "POST",
                rec["address"]["host"],
                rec["address"]["port"],
                path,
                body,
                headers={"X-Session-Token": token},
                timeout=timeout,
            )
        except OSError as exc:
            raise HttpError(502, f"engine call failed: {exc}")

    def _engines(self) -> list[dict]:
        if self.registry is None:
            return []
        with self._engine_lock:
            fetched_at, cached = self._engine_view
            if time.monotonic() - fetched_at > 1.0:
                try:
                    cached = self.registry.passing_instances("ENGINE")
                except Exception:
                    cached = cached or []
                self._engine_view = (time.monotonic(), cached)
            return cached
