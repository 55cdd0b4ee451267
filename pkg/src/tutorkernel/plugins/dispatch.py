"""Trigger dispatch: fan a job's context out to every healthy registered
feedback service for that trigger.

Plugins are fully isolated: each call gets its own timeout, and any plugin
failure (crash, hang, garbage output) yields an empty contribution, never a
job failure.
"""
from __future__ import annotations

import json
import logging
import threading
from typing import Callable, Optional

from ..common.httpkit import http_request
from .manifest import PluginManifest, Trigger

log = logging.getLogger(__name__)

AddressResolver = Callable[[str, str], Optional[tuple[str, int]]]
# (service_kind, instance_id) -> (host, port) for PASSING instances, else None

DEFAULT_PLUGIN_TIMEOUT_S = 2.0


class PluginDispatcher:
    def __init__(self, resolve: AddressResolver, timeout_s: float = DEFAULT_PLUGIN_TIMEOUT_S):
        self._resolve = resolve
        self.timeout_s = timeout_s

    def dispatch(
        self,
        trigger: Trigger,
        payload: dict,
        manifests: list[PluginManifest],
        enabled: Optional[dict[str, bool]] = None,
    ) -> list[dict]:
        assert isinstance(trigger, Trigger), f"trigger outside the closed set: {trigger!r}"
        calls = []
        for manifest in manifests:
            if enabled is not None and not enabled.get(manifest.name, True):
                continue
            for service in manifest.services:
                if service.trigger != trigger:
                    continue
                address = self._first_healthy(manifest.name, service.containers, service.port)
                if address is None:
                    continue
                calls.append((manifest.name, service, address))

        if not calls:
            return []

        body = dict(payload)
        body["trigger"] = trigger.value
        raw = json.dumps(body).encode("utf-8")
        items: list[Optional[dict]] = [None] * len(calls)

        def invoke(i: int, name: str, service, address) -> None:
            host, port = address
            path = service.endpoint if service.endpoint.startswith("/") else "/" + service.endpoint
            try:
                status, _, reply = http_request(
                    "POST", host, port, path, raw,
                    {"Content-Type": "application/json"},
                    timeout=self.timeout_s,
                )
                if status != 200:
                    log.warning("plugin %s%s returned %d; skipped", name, path, status)
                    return
                try:
                    parsed = json.loads(reply.decode("utf-8"))
                except ValueError:
                    parsed = {"text": reply.decode("utf-8", "replace")}
                items[i] = {"plugin": name, "trigger": trigger.value, "endpoint": path, "body": parsed}
            except Exception as exc:
                log.warning("plugin %s%s failed: %s; skipped", name, path, exc)

        threads = []
        for i, (name, service, address) in enumerate(calls):
            t = threading.Thread(target=invoke, args=(i, name, service, address), daemon=True)
            t.start()
            threads.append(t)
        for t in threads:
            t.join(self.timeout_s + 0.5)  # hung plugins are abandoned, never waited out

        return [item for item in items if item is not None]

    def _first_healthy(self, name: str, containers: list[str], port: int) -> Optional[tuple[str, int]]:
        # the registered serving port is authoritative; the manifest port is a
        # fallback for records registered without one
        for container in containers:
            address = self._resolve(f"PLUGIN:{name}", container)
            if address is not None:
                host, registered_port = address
                return host, registered_port or port
        return None
