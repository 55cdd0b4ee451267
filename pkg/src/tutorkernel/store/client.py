"""Client used by every service that persists anything. Talks to the store
proxy (or directly to a replica, for backups and verification harnesses)."""
from __future__ import annotations

import json
import os
import threading
from typing import Optional

from ..common.netframe import FrameClient
from .errors import NotFound, StoreUnavailable


class StoreClient:
    def __init__(self, host: str, port: int, timeout: float = 15.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._idle: list[FrameClient] = []
        self._lock = threading.Lock()

    def _call(self, request: dict) -> dict:
        with self._lock:
            client = self._idle.pop() if self._idle else FrameClient(self.host, self.port, self.timeout)
        try:
            reply = client.call(request)
        except Exception as exc:
            client.close()
            raise StoreUnavailable(str(exc)) from exc
        with self._lock:
            self._idle.append(client)
        if not reply.get("ok"):
            error = reply.get("error")
            if error == "not-found":
                raise NotFound(reply.get("detail", ""))
            raise StoreUnavailable(reply.get("detail") or error or "store error")
        return reply

    def write(self, table: str, key: str, payload) -> int:
        return self._call({"op": "write", "table": table, "key": key, "payload": payload})["version"]

    def delete(self, table: str, key: str) -> bool:
        return self._call({"op": "delete", "table": table, "key": key})["existed"]

    def bump(self, table: str, key: str) -> int:
        return self._call({"op": "bump", "table": table, "key": key})["value"]

    def read(self, table: str, key: str) -> dict:
        return self._call({"op": "read", "table": table, "key": key})["record"]

    def get(self, table: str, key: str, default=None):
        try:
            return self.read(table, key)["payload"]
        except NotFound:
            return default

    def scan(self, table: str, field: Optional[str] = None, value=None) -> list[dict]:
        return self._call({"op": "scan", "table": table, "field": field, "value": value})["records"]

    def scan_payloads(self, table: str, field: Optional[str] = None, value=None) -> list:
        return [r["payload"] for r in self.scan(table, field, value)]

    def dump(self) -> dict:
        return self._call({"op": "dump"})["snapshot"]

    def load(self, snapshot: dict) -> None:
        self._call({"op": "load", "snapshot": snapshot})

    def checksums(self) -> dict:
        return self._call({"op": "checksums"})["checksums"]

    def close(self) -> None:
        with self._lock:
            for client in self._idle:
                client.close()
            self._idle.clear()

    # -- backup: one JSON-lines file per table ------------------------------

    def dump_to_dir(self, path: str) -> list[str]:
        snapshot = self.dump()
        os.makedirs(path, exist_ok=True)
        written = []
        for table, rows in sorted(snapshot["tables"].items()):
            file_path = os.path.join(path, f"{table}.jsonl")
            with open(file_path, "w", encoding="utf-8") as fh:
                for key in sorted(rows):
                    fh.write(json.dumps(rows[key], sort_keys=True) + "\n")
            written.append(file_path)
        with open(os.path.join(path, "_versions.json"), "w", encoding="utf-8") as fh:
            json.dump(snapshot["versions"], fh, sort_keys=True)
        return written

    def load_from_dir(self, path: str) -> None:
        tables: dict[str, dict[str, dict]] = {}
        for name in sorted(os.listdir(path)):
            if not name.endswith(".jsonl"):
                continue
            table = name[: -len(".jsonl")]
            rows: dict[str, dict] = {}
            with open(os.path.join(path, name), encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        record = json.loads(line)
                        rows[record["key"]] = record
            tables[table] = rows
        versions_path = os.path.join(path, "_versions.json")
        versions = {}
        if os.path.exists(versions_path):
            with open(versions_path, encoding="utf-8") as fh:
                versions = json.load(fh)
        self.load({"tables": tables, "versions": versions})
