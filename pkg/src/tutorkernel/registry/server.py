"""Single-node service registry.

Instances self-register with a health probe; the registry polls the probe,
flips health to FAILING after `failure_threshold` consecutive failures and
back to PASSING after one success, and auto-removes records that produce no
successful check for five intervals (crash without deregister). Consumers
long-poll complete views per service kind. A small KV annex carries the
auto-scaler's response-time samples. Registration state is journaled so a
restart recovers the membership list.
"""
from __future__ import annotations

import html
import json
import os
import socket
import threading
import urllib.request
from typing import Optional

from ..common.httpkit import HttpService, HttpError, Request, Response
from ..common.util import now_ms

DEFAULT_CHECK_INTERVAL_MS = 2000
DEFAULT_FAILURE_THRESHOLD = 3
LIVENESS_INTERVALS = 5

PASSING = "PASSING"
FAILING = "FAILING"


class RegistryServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 journal_path: Optional[str] = None, probe_timeout_s: float = 1.0):
        self._records: dict[str, dict] = {}
        self._kv: dict[str, object] = {}
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)
        self._kind_versions: dict[str, int] = {}
        self._probe_timeout_s = probe_timeout_s
        self._stop = threading.Event()
        self._journal = None
        if journal_path:
            os.makedirs(os.path.dirname(journal_path) or ".", exist_ok=True)
            if os.path.exists(journal_path):
                self._replay(journal_path)
            self._journal = open(journal_path, "a", encoding="utf-8")

        self.service = HttpService(host=host, port=port)
        s = self.service
        s.add_route("PUT", "/v1/register", self._h_register)
        s.add_route("DELETE", "/v1/deregister/{instance_id}", self._h_deregister)
        s.add_route("GET", "/v1/view/{kind}", self._h_view)
        s.add_route("GET", "/v1/watch/{kind}", self._h_watch)
        s.add_route("GET", "/v1/kinds", self._h_kinds)
        s.add_route("PUT", "/v1/kv/{rest...}", self._h_kv_put)
        s.add_route("GET", "/v1/kv/{rest...}", self._h_kv_get)
        s.add_route("GET", "/v1/kvlist/{rest...}", self._h_kv_list)
        s.add_route("GET", "/status", self._h_status)

    @property
    def host(self) -> str:
        return self.service.host

    @property
    def port(self) -> int:
        return self.service.port

    def start(self) -> None:
        self.service.start()
        threading.Thread(target=self._check_loop, daemon=True).start()

    def stop(self) -> None:
        self._stop.set()
        self.service.stop()
        if self._journal:
            self._journal.close()
            self._journal = None

    # -- handlers ------------------------------------------------------------

    def _h_register(self, req: Request) -> Response:
        body = req.json()
        for field in ("instance_id", "service_kind", "address"):
            if field not in body:
                raise HttpError(400, f"missing field {field!r}")
        check = body.get("check") or {}
        record = {
            "instance_id": body["instance_id"],
            "service_kind": body["service_kind"],
            "address": {"host": body["address"]["host"], "port": int(body["address"]["port"])},
            "health": PASSING,
            "registered_at": now_ms(),
            "last_check": 0,
            "check": {
                "probe": check.get("probe")
                or f"tcp://{body['address']['host']}:{body['address']['port']}",
                "interval_ms": int(check.get("interval_ms", DEFAULT_CHECK_INTERVAL_MS)),
                "failure_threshold": int(check.get("failure_threshold", DEFAULT_FAILURE_THRESHOLD)),
            },
            "meta": body.get("meta") or {},
        }
        replaced = self._register(record)
        return Response.json({"ok": True, "replaced": replaced})

    def _register(self, record: dict) -> bool:
        with self._lock:
            replaced = record["instance_id"] in self._records
            record["_failures"] = 0
            record["_last_ok"] = now_ms()
            record["_next_check"] = 0
            self._records[record["instance_id"]] = record
            self._bump(record["service_kind"])
        self._log({"op": "register", "record": {k: v for k, v in record.items() if not k.startswith("_")}})
        return replaced

    def _h_deregister(self, req: Request) -> Response:
        self.deregister(req.params["instance_id"])
        return Response.json({"ok": True})

    def deregister(self, instance_id: str) -> None:
        """Idempotent removal; watchers see the change immediately."""
        with self._lock:
            record = self._records.pop(instance_id, None)
            if record is not None:
                self._bump(record["service_kind"])
        if record is not None:
            self._log({"op": "deregister", "instance_id": instance_id})

    def _h_view(self, req: Request) -> Response:
        return Response.json(self.view(req.params["kind"]))

    def view(self, kind: str) -> dict:
        with self._lock:
            return self._view_locked(kind)

    def _view_locked(self, kind: str) -> dict:
        instances = [
            {k: v for k, v in rec.items() if not k.startswith("_")}
            for rec in self._records.values()
            if rec["service_kind"] == kind
        ]
        instances.sort(key=lambda r: r["instance_id"])
        return {"kind": kind, "version": self._kind_versions.get(kind, 0), "instances": instances}

    def _h_watch(self, req: Request) -> Response:
        kind = req.params["kind"]
        since = int(req.query.get("since", -1))
        timeout_s = min(60.0, int(req.query.get("timeout_ms", 25000)) / 1000.0)
        deadline = now_ms() + timeout_s * 1000
        with self._changed:
            while self._kind_versions.get(kind, 0) <= since:
                remaining = (deadline - now_ms()) / 1000.0
                if remaining <= 0 or self._stop.is_set():
                    break
                self._changed.wait(min(remaining, 1.0))
            return Response.json(self._view_locked(kind))

    def _h_kinds(self, req: Request) -> Response:
        with self._lock:
            kinds = sorted({rec["service_kind"] for rec in self._records.values()})
        return Response.json({"kinds": kinds})

    def _h_kv_put(self, req: Request) -> Response:
        path = req.params["rest"]
        try:
            value = json.loads(req.body.decode("utf-8")) if req.body else None
        except ValueError:
            raise HttpError(400, "KV value must be JSON")
        with self._lock:
            self._kv[path] = value
        return Response.json({"ok": True})

    def _h_kv_get(self, req: Request) -> Response:
        with self._lock:
            if req.params["rest"] not in self._kv:
                raise HttpError(404, "no such key")
            return Response.json({"value": self._kv[req.params["rest"]]})

    def _h_kv_list(self, req: Request) -> Response:
        prefix = req.params["rest"]
        with self._lock:
            hits = {k: v for k, v in self._kv.items() if k.startswith(prefix)}
        return Response.json({"entries": hits})

    def _h_status(self, req: Request) -> Response:
        with self._lock:
            records = sorted(self._records.values(), key=lambda r: (r["service_kind"], r["instance_id"]))
            rows = "".join(
                "<tr><td>{}</td><td>{}</td><td>{}:{}</td><td class='{}'>{}</td><td>{}</td></tr>".format(
                    html.escape(r["instance_id"]),
                    html.escape(r["service_kind"]),
                    html.escape(r["address"]["host"]),
                    r["address"]["port"],
                    "ok" if r["health"] == PASSING else "bad",
                    r["health"],
                    r["last_check"],
                )
                for r in records
            )
        page = (
            "<!doctype html><title>Node health</title>"
            "<style>table{border-collapse:collapse}td,th{border:1px solid #999;padding:4px 8px}"
            ".ok{color:green}.bad{color:red}</style>"
            "<h1>Node health</h1><table><tr><th>Instance</th><th>Kind</th>"
            "<th>Address</th><th>Health</th><th>Last check</th></tr>" + rows + "</table>"
        )
        return Response.text(page, content_type="text/html")

    # -- health checking -------------------------------------------------------

    def _check_loop(self) -> None:
        while not self._stop.wait(0.05):
            due = []
            now = now_ms()
            with self._lock:
                for rec in self._records.values():
                    if rec["_next_check"] <= now:
                        rec["_next_check"] = now + rec["check"]["interval_ms"]
                        due.append(rec)
            for rec in due:
                threading.Thread(target=self._probe_record, args=(rec,), daemon=True).start()

    def _probe_record(self, rec: dict) -> None:
        ok = self._probe(rec["check"]["probe"])
        now = now_ms()
        with self._lock:
            current = self._records.get(rec["instance_id"])
            if current is not rec:
                return
            rec["last_check"] = now
            if ok:
                rec["_failures"] = 0
                rec["_last_ok"] = now
                if rec["health"] != PASSING:
                    rec["health"] = PASSING
                    self._bump(rec["service_kind"])
                return
            rec["_failures"] += 1
            if rec["_failures"] >= rec["check"]["failure_threshold"] and rec["health"] != FAILING:
                rec["health"] = FAILING
                self._bump(rec["service_kind"])
            if now - rec["_last_ok"] > LIVENESS_INTERVALS * rec["check"]["interval_ms"]:
                self._records.pop(rec["instance_id"], None)
                self._bump(rec["service_kind"])
                threading.Thread(
                    target=self._log,
                    args=({"op": "deregister", "instance_id": rec["instance_id"]},),
                    daemon=True,
                ).start()

    def _probe(self, probe: str) -> bool:
        try:
            if probe.startswith("tcp://"):
                host, port = probe[len("tcp://"):].rsplit(":", 1)
                with socket.create_connection((host, int(port)), timeout=self._probe_timeout_s):
                    return True
            if probe.startswith("http://"):
                with urllib.request.urlopen(probe, timeout=self._probe_timeout_s) as resp:
                    return 200 <= resp.status < 300
        except OSError:
            return False
        except Exception:
            return False
        return False

    # -- internals ---------------------------------------------------------------

    def _bump(self, kind: str) -> None:
        self._kind_versions[kind] = self._kind_versions.get(kind, 0) + 1
        self._changed.notify_all()

    def _log(self, entry: dict) -> None:
        if self._journal is None:
            return
        with self._lock:
            if self._journal is None:
                return
            self._journal.write(json.dumps(entry, separators=(",", ":")) + "\n")
            self._journal.flush()

    def _replay(self, path: str) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                if entry["op"] == "register":
                    rec = entry["record"]
                    rec["_failures"] = 0
                    rec["_last_ok"] = now_ms()
                    rec["_next_check"] = 0
                    self._records[rec["instance_id"]] = rec
                elif entry["op"] == "deregister":
                    self._records.pop(entry["instance_id"], None)
        for rec in self._records.values():
            self._kind_versions[rec["service_kind"]] = (
                self._kind_versions.get(rec["service_kind"], 0) + 1
            )
