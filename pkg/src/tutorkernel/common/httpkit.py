"""Minimal HTTP plumbing shared by every HTTP-speaking service.

Keeps the system dependency-free: a threaded server with pattern routing and
JSON helpers, a small client, and the rolling response-time window that feeds
the auto-scaler.
"""
from __future__ import annotations

import http.client
import json
import socket
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional
from urllib.parse import parse_qs, urlsplit

from .netframe import force_close
from .util import now_ms

MAX_BODY = 8 << 20


class HttpError(Exception):
    """Raise inside a handler to produce a non-200 JSON response."""

    def __init__(self, status: int, reason: str):
        super().__init__(reason)
        self.status = status
        self.reason = reason


@dataclass
class Request:
    method: str
    path: str
    params: dict[str, str]
    query: dict[str, str]
    headers: dict[str, str]
    body: bytes

    def json(self) -> dict:
        if not self.body:
            return {}
        try:
            value = json.loads(self.body.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            raise HttpError(400, "body is not valid JSON")
        if not isinstance(value, dict):
            raise HttpError(400, "JSON body must be an object")
        return value


@dataclass
class Response:
    status: int = 200
    body: bytes = b""
    content_type: str = "application/json"
    headers: dict[str, str] = field(default_factory=dict)

    @classmethod
    def json(cls, value, status: int = 200, **headers: str) -> "Response":
        return cls(status, json.dumps(value).encode("utf-8"), "application/json", dict(headers))

    @classmethod
    def text(cls, text: str, status: int = 200, content_type: str = "text/plain") -> "Response":
        return cls(status, text.encode("utf-8"), content_type)


class ResponseTimeWindow:
    """Rolling window of the last n request durations (milliseconds)."""

    def __init__(self, n: int = 100):
        self._window: deque[float] = deque(maxlen=n)
        self._lock = threading.Lock()

    def record(self, duration_ms: float) -> None:
        with self._lock:
            self._window.append(duration_ms)

    def mean(self) -> Optional[float]:
        with self._lock:
            if not self._window:
                return None
            return sum(self._window) / len(self._window)

    def __len__(self) -> int:
        with self._lock:
            return len(self._window)


class TrackedThreadingHTTPServer(ThreadingHTTPServer):
    """ThreadingHTTPServer that remembers live client sockets so kill() can reset them."""

    daemon_threads = True
    allow_reuse_address = True
    request_queue_size = 256

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.live_sockets: set[socket.socket] = set()
        self.socket_lock = threading.Lock()
        self.killed = False

    def process_request(self, request, client_address):
        with self.socket_lock:
            if self.killed:
                request.close()
                return
            self.live_sockets.add(request)
        super().process_request(request, client_address)

    def shutdown_request(self, request):
        with self.socket_lock:
            self.live_sockets.discard(request)
        super().shutdown_request(request)

    def hard_kill(self) -> None:
        with self.socket_lock:
            self.killed = True
            sockets = list(self.live_sockets)
        for s in sockets:
            force_close(s)
        try:
            self.socket.close()
        except OSError:
            pass


class HttpService:
    """Routed JSON-over-HTTP service base.

    Routes use `{name}` path captures, matched segment-wise. Every service
    answers GET /healthz for registry probes; real request durations land in
    `rt_window` for the scaler.
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0, rt_window_n: int = 100):
        self._routes: list[tuple[str, list[str], Callable[[Request], Response]]] = []
        self.rt_window = ResponseTimeWindow(rt_window_n)
        service = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # quiet; services log via their own channels
                pass

            def _run(self):
                started = time.monotonic()
                split = urlsplit(self.path)
                try:
                    length = int(self.headers.get("Content-Length") or 0)
                    if length > MAX_BODY:
                        raise HttpError(413, "body too large")
                    body = self.rfile.read(length) if length else b""
                    request = Request(
                        method=self.command,
                        path=split.path,
                        params={},
                        query={k: v[-1] for k, v in parse_qs(split.query).items()},
                        headers={k.lower(): v for k, v in self.headers.items()},
                        body=body,
                    )
                    response = service._dispatch(request)
                except HttpError as exc:
                    response = Response.json({"error": exc.reason}, status=exc.status)
                except Exception as exc:
                    response = Response.json({"error": f"internal: {exc}"}, status=500)
                try:
                    self.send_response(response.status)
                    self.send_header("Content-Type", response.content_type)
                    self.send_header("Content-Length", str(len(response.body)))
                    for key, value in response.headers.items():
                        self.send_header(key, value)
                    self.end_headers()
                    if self.command != "HEAD":
                        self.wfile.write(response.body)
                except (BrokenPipeError, ConnectionResetError, OSError):
                    return
                if split.path != "/healthz":
                    service.rt_window.record((time.monotonic() - started) * 1000.0)

            do_GET = do_POST = do_PUT = do_DELETE = do_HEAD = _run

        self._server = TrackedThreadingHTTPServer((host, port), Handler)
        self.host, self.port = self._server.server_address[:2]
        self._thread: Optional[threading.Thread] = None
        self.add_route("GET", "/healthz", lambda req: Response.text("ok"))

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    def url(self, path: str = "") -> str:
        return f"http://{self.host}:{self.port}{path}"

    def add_route(self, method: str, pattern: str, handler: Callable[[Request], Response]) -> None:
        self._routes.append((method, pattern.strip("/").split("/"), handler))

    def _dispatch(self, request: Request) -> Response:
        segments = request.path.strip("/").split("/")
        allowed: set[str] = set()
        for method, pattern, handler in self._routes:
            params = _match(pattern, segments)
            if params is None:
                continue
            if method != request.method:
                allowed.add(method)
                continue
            request.params = params
            return handler(request)
        if allowed:
            return Response.json({"error": "method not allowed"}, status=405)
        return Response.json({"error": "no such route"}, status=404)

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def kill(self) -> None:
        """Crash simulation: reset live connections, stop accepting."""
        self._server.hard_kill()
        threading.Thread(target=self._server.shutdown, daemon=True).start()


def _match(pattern: list[str], segments: list[str]) -> Optional[dict[str, str]]:
    if pattern and pattern[-1] == "{rest...}":
        if len(segments) < len(pattern) - 1:
            return None
        head, tail = pattern[:-1], segments[: len(pattern) - 1]
        params = _match(head, tail)
        if params is None:
            return None
        params["rest"] = "/".join(segments[len(pattern) - 1 :])
        return params
    if len(pattern) != len(segments):
        return None
    params: dict[str, str] = {}
    for want, got in zip(pattern, segments):
        if want.startswith("{") and want.endswith("}"):
            if not got:
                return None
            params[want[1:-1]] = got
        elif want != got:
            return None
    return params


def http_request(
    method: str,
    host: str,
    port: int,
    path: str,
    body: Optional[bytes] = None,
    headers: Optional[dict[str, str]] = None,
    timeout: float = 30.0,
) -> tuple[int, dict[str, str], bytes]:
    conn = http.client.HTTPConnection(host, port, timeout=timeout)
    try:
        send_headers = {"Connection": "close"}
        if headers:
            send_headers.update(headers)
        conn.request(method, path, body=body, headers=send_headers)
        resp = conn.getresponse()
        payload = resp.read()
        return resp.status, {k.lower(): v for k, v in resp.getheaders()}, payload
    finally:
        conn.close()


def http_json(
    method: str,
    host: str,
    port: int,
    path: str,
    value: Optional[dict] = None,
    headers: Optional[dict[str, str]] = None,
    timeout: float = 30.0,
) -> tuple[int, dict]:
    body = json.dumps(value).encode("utf-8") if value is not None else None
    send_headers = {"Content-Type": "application/json"}
    if headers:
        send_headers.update(headers)
    status, _, payload = http_request(method, host, port, path, body, send_headers, timeout)
    try:
        parsed = json.loads(payload.decode("utf-8")) if payload else {}
    except ValueError:
        parsed = {"raw": payload.decode("utf-8", "replace")}
    return status, parsed


class SamplePublisher:
    """Publishes this instance's rolling mean response time to the registry KV annex."""

    def __init__(
        self,
        post: Callable[[str, dict], None],
        kind: str,
        instance_id: str,
        window: ResponseTimeWindow,
        interval_ms: int = 2000,
    ):
        self._post = post
        self._kind = kind
        self._instance_id = instance_id
        self._window = window
        self.interval_ms = interval_ms
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def current_interval(self) -> int:
        return now_ms() // self.interval_ms

    def publish_once(self) -> Optional[dict]:
        mean = self._window.mean()
        if mean is None:
            return None  # no traffic yet: no sample this interval
        sample = {
            "instance_id": self._instance_id,
            "interval": self.current_interval(),
            "mean_rt_ms": mean,
            "at": now_ms(),
        }
        path = f"scaler/{self._kind}/{self._instance_id}/{sample['interval']}"
        try:
            self._post(path, sample)
        except OSError:
            return None
        return sample

    def start(self) -> None:
        def loop():
            while not self._stop.wait(self.interval_ms / 1000.0):
                self.publish_once()

        self._thread = threading.Thread(target=loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
