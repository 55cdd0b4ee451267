"""Registry client plus the watch loop every balancer runs."""
from __future__ import annotations

import threading
from typing import Callable, Optional

from ..common.httpkit import http_json


class RegistryClient:
    def __init__(self, host: str, port: int):
        self.host = host
        self.port = port

    def register(
        self,
        instance_id: str,
        service_kind: str,
        host: str,
        port: int,
        probe: Optional[str] = None,
        interval_ms: int = 2000,
        failure_threshold: int = 3,
        meta: Optional[dict] = None,
    ) -> bool:
        status, body = http_json(
            "PUT",
            self.host,
            self.port,
            "/v1/register",
            {
                "instance_id": instance_id,
                "service_kind": service_kind,
                "address": {"host": host, "port": port},
                "check": {
                    "probe": probe,
                    "interval_ms": interval_ms,
                    "failure_threshold": failure_threshold,
                },
                "meta": meta or {},
            },
        )
        if status != 200:
            raise RuntimeError(f"register failed: {status} {body}")
        return bool(body.get("replaced"))

    def deregister(self, instance_id: str) -> None:
        http_json("DELETE", self.host, self.port, f"/v1/deregister/{instance_id}")

    def view(self, kind: str) -> dict:
        status, body = http_json("GET", self.host, self.port, f"/v1/view/{kind}")
        if status != 200:
            raise RuntimeError(f"view failed: {status}")
        return body

    def watch(self, kind: str, since: int, timeout_ms: int = 25000) -> dict:
        status, body = http_json(
            "GET",
            self.host,
            self.port,
            f"/v1/watch/{kind}?since={since}&timeout_ms={timeout_ms}",
            timeout=timeout_ms / 1000.0 + 10,
        )
        if status != 200:
            raise RuntimeError(f"watch failed: {status}")
        return body

    def kinds(self) -> list[str]:
        status, body = http_json("GET", self.host, self.port, "/v1/kinds")
        return body.get("kinds", []) if status == 200 else []

    def kv_put(self, path: str, value) -> None:
        http_json("PUT", self.host, self.port, f"/v1/kv/{path}", value)

    def kv_get(self, path: str, default=None):
        status, body = http_json("GET", self.host, self.port, f"/v1/kv/{path}")
        return body.get("value") if status == 200 else default

    def kv_list(self, prefix: str) -> dict:
        status, body = http_json("GET", self.host, self.port, f"/v1/kvlist/{prefix}")
        return body.get("entries", {}) if status == 200 else {}

    def passing_instances(self, kind: str) -> list[dict]:
        return [r for r in self.view(kind)["instances"] if r["health"] == "PASSING"]


class Watcher:
    """Long-polls one service kind and hands every fresh view to a callback.

    Rapid flips coalesce naturally: each poll returns the latest complete
    view. Registry outages invoke the callback with stale=True so consumers
    can keep their last-known list and flag it.
    """

    def __init__(
        self,
        client: RegistryClient,
        kind: str,
        callback: Callable[[dict, bool], None],
        poll_timeout_ms: int = 5000,
    ):
        self.client = client
        self.kind = kind
        self.callback = callback
        self.poll_timeout_ms = poll_timeout_ms
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self.views_seen = 0

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()

    def _loop(self) -> None:
        since = -1
        while not self._stop.is_set():
            try:
                view = self.client.watch(self.kind, since, self.poll_timeout_ms)
            except Exception:
                if self._stop.is_set():
                    return
                self.callback({}, True)
                self._stop.wait(0.5)
                continue
            if view["version"] != since:
                since = view["version"]
                self.views_seen += 1
                self.callback(view, False)
