"""Front HTTP proxy: routes by URL prefix to the webapp or engine pool,
dispatches least-connected, and follows registry watches for membership.

No transparent retries: compile and evaluate are not idempotent, so a backend
dying mid-request yields a 502 to that caller only. Removed instances drain:
in-flight requests finish, new dispatches stop immediately.
"""
from __future__ import annotations

import http.client
import mimetypes
import os
import threading
import time
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler
from typing import Optional

from ..common.balance import ConnectionLedger
from ..common.httpkit import TrackedThreadingHTTPServer
from ..registry.client import RegistryClient, Watcher
from .routes import RouteTable, DEFAULT_RULES, WEBAPP, ENGINE

HOP_BY_HOP = {
    "connection", "keep-alive", "proxy-authenticate", "proxy-authorization",
    "te", "trailers", "transfer-encoding", "upgrade",
}
DRAIN_TIMEOUT_S = 30.0


class Gateway:
    def __init__(
        self,
        registry: Optional[RegistryClient] = None,
        host: str = "127.0.0.1",
        port: int = 0,
        rules=DEFAULT_RULES,
        access_log_path: Optional[str] = None,
        static_dir: Optional[str] = None,
    ):
        self.routes = RouteTable(rules)
        self.registry = registry
        self.static_dir = static_dir
        self.pools: dict[str, ConnectionLedger] = {WEBAPP: ConnectionLedger(), ENGINE: ConnectionLedger()}
        self.addresses: dict[str, tuple[str, int]] = {}
        self._addr_lock = threading.Lock()
        self._watchers: list[Watcher] = []
        self._log_lock = threading.Lock()
        self._access_log = open(access_log_path, "a", encoding="utf-8") if access_log_path else None
        self.dispatch_log: list[tuple[str, str]] = []  # (path, instance_id), audit for tests
        self._dispatch_log_lock = threading.Lock()

        gateway = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):
                pass

            def _run(self):
                gateway._handle(self)

            do_GET = do_POST = do_PUT = do_DELETE = do_HEAD = _run

        self._server = TrackedThreadingHTTPServer((host, port), Handler)
        self.host, self.port = self._server.server_address[:2]

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    def start(self) -> None:
        threading.Thread(target=self._server.serve_forever, daemon=True).start()
        if self.registry is not None:
            for kind in (WEBAPP, ENGINE):
                watcher = Watcher(self.registry, kind, self._make_view_callback(kind))
                watcher.start()
                self._watchers.append(watcher)

    def stop(self) -> None:
        for watcher in self._watchers:
            watcher.stop()
        self._server.shutdown()
        self._server.server_close()
        if self._access_log:
            self._access_log.close()
            self._access_log = None

    def kill(self) -> None:
        for watcher in self._watchers:
            watcher.stop()
        self._server.hard_kill()
        threading.Thread(target=self._server.shutdown, daemon=True).start()

    # -- membership ------------------------------------------------------------

    def _make_view_callback(self, kind: str):
        def apply(view: dict, stale: bool) -> None:
            if stale:
                return  # keep last-known pool through a registry outage
            self.apply_view(kind, view.get("instances", []))

        return apply

    def apply_view(self, kind: str, instances: list[dict]) -> None:
        passing = [r for r in instances if r.get("health") == "PASSING"]
        with self._addr_lock:
            for rec in passing:
                self.addresses[rec["instance_id"]] = (
                    rec["address"]["host"],
                    rec["address"]["port"],
                )
        self.pools[kind].sync(r["instance_id"] for r in passing)

    # -- request handling ---------------------------------------------------------

    def _handle(self, handler: BaseHTTPRequestHandler) -> None:
        started = time.monotonic()
        path = handler.path
        status, sent = 500, 0
        try:
            if self.static_dir and path.split("?", 1)[0].startswith("/ui"):
                status, sent = self._serve_static(handler)
                return
            kind = self.routes.route(path.split("?", 1)[0])
            length = int(handler.headers.get("Content-Length") or 0)
            body = handler.rfile.read(length) if length else None
            while True:
                instance_id = self.pools[kind].acquire()
                if instance_id is None:
                    status, sent = self._respond(
                        handler, 503, b'{"error":"no healthy backend"}', {"Retry-After": "1"}
                    )
                    return
                with self._dispatch_log_lock:
                    self.dispatch_log.append((path, instance_id))
                try:
                    conn = self._connect(instance_id)
                except OSError:
                    # nothing was sent: this is safe to retry on another backend
                    self.pools[kind].drop(instance_id)
                    continue
                try:
                    status, sent = self._forward(handler, conn, body)
                except (OSError, http.client.HTTPException):
                    # backend died mid-request: fail this caller only, no retry
                    self.pools[kind].drop(instance_id)
                    status, sent = self._respond(handler, 502, b'{"error":"backend failed"}')
                else:
                    self.pools[kind].release(instance_id)
                return
        except (BrokenPipeError, ConnectionResetError):
            return
        finally:
            self._log_access(handler, status, sent, time.monotonic() - started)

    def _connect(self, instance_id: str) -> http.client.HTTPConnection:
        with self._addr_lock:
            host, port = self.addresses[instance_id]
        conn = http.client.HTTPConnection(host, port, timeout=120.0)
        conn.connect()
        return conn

    def _forward(
        self, handler: BaseHTTPRequestHandler, conn: http.client.HTTPConnection, body
    ) -> tuple[int, int]:
        try:
            headers = {
                k: v for k, v in handler.headers.items() if k.lower() not in HOP_BY_HOP
            }
            headers["Connection"] = "close"
            headers["X-Forwarded-For"] = handler.client_address[0]
            conn.request(handler.command, handler.path, body=body, headers=headers)
            resp = conn.getresponse()
            payload = resp.read()
            handler.send_response(resp.status)
            for key, value in resp.getheaders():
                if key.lower() in HOP_BY_HOP or key.lower() == "content-length":
                    continue
                handler.send_header(key, value)
            handler.send_header("Content-Length", str(len(payload)))
            handler.end_headers()
            if handler.command != "HEAD":
                handler.wfile.write(payload)
            return resp.status, len(payload)
        finally:
            conn.close()

    def _serve_static(self, handler: BaseHTTPRequestHandler) -> tuple[int, int]:
        rel = handler.path.split("?", 1)[0][len("/ui"):].lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(self.static_dir, rel))
        root = os.path.realpath(self.static_dir)
        if not full.startswith(root + os.sep) and full != root:
            return self._respond(handler, 403, b"forbidden")
        if not os.path.isfile(full):
            full = os.path.join(root, "index.html")  # SPA deep links
            if not os.path.isfile(full):
                return self._respond(handler, 404, b"not found")
        with open(full, "rb") as fh:
            payload = fh.read()
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        return self._respond(handler, 200, payload, {"Content-Type": ctype})

    def _respond(
        self,
        handler: BaseHTTPRequestHandler,
        status: int,
        body: bytes,
        headers: Optional[dict[str, str]] = None,
    ) -> tuple[int, int]:
        handler.send_response(status)
        handler.send_header("Content-Type", headers.pop("Content-Type", "application/json") if headers else "application/json")
        handler.send_header("Content-Length", str(len(body)))
        for key, value in (headers or {}).items():
            handler.send_header(key, value)
        handler.end_headers()
        if handler.command != "HEAD":
            handler.wfile.write(body)
        return status, len(body)

    def _log_access(self, handler, status: int, sent: int, duration_s: float) -> None:
        if self._access_log is None:
            return
        # combined log format plus a trailing response-time-in-microseconds field
        when = datetime.now(timezone.utc).strftime("%d/%b/%Y:%H:%M:%S +0000")
        line = '%s - - [%s] "%s %s %s" %d %d "%s" "%s" %d\n' % (
            handler.client_address[0],
            when,
            handler.command,
            handler.path,
            handler.request_version,
            status,
            sent,
            handler.headers.get("Referer", "-"),
            handler.headers.get("User-Agent", "-"),
            int(duration_s * 1_000_000),
        )
        with self._log_lock:
            if self._access_log:
                self._access_log.write(line)
                self._access_log.flush()
