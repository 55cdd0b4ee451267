"""Log-structured in-memory tables with per-key versions and secondary indexes.

One TableSet backs one replica. Versions survive deletion so a re-created key
continues its sequence; the journal makes a replica's state recoverable after
a clean restart (crash recovery goes through anti-entropy instead).
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
from typing import Optional

# Equality indexes needed by the analytics and webapp query paths.
INDEXED_FIELDS: dict[str, tuple[str, ...]] = {
    "accounts": ("login",),
    "testcases": ("problem_id",),
    "snapshots": ("assignment_key",),
    "logs": ("assignment_key",),
    "grades": ("grader",),
    "tasks": ("grader", "event_id"),
    "scratchpad": ("owner",),
    "threads": ("opener",),
}


def _index_key(value) -> str:
    return json.dumps(value, sort_keys=True)


class TableSet:
    def __init__(self, journal_path: Optional[str] = None):
        self._tables: dict[str, dict[str, dict]] = {}
        self._versions: dict[tuple[str, str], int] = {}
        self._indexes: dict[str, dict[str, dict[str, set[str]]]] = {}
        self._lock = threading.RLock()
        self._journal_path = journal_path
        self._journal = None
        if journal_path:
            os.makedirs(os.path.dirname(journal_path) or ".", exist_ok=True)
            if os.path.exists(journal_path):
                self._replay_journal(journal_path)
            self._journal = open(journal_path, "a", encoding="utf-8")

    # -- mutation ---------------------------------------------------------

    def write(self, table: str, key: str, payload) -> int:
        with self._lock:
            version = self._versions.get((table, key), 0) + 1
            record = {"table": table, "key": key, "version": version, "payload": payload}
            self._apply_write(record)
            self._log({"op": "write", "record": record})
            return version

    def delete(self, table: str, key: str) -> bool:
        with self._lock:
            rows = self._tables.get(table, {})
            record = rows.pop(key, None)
            if record is None:
                return False
            self._versions[(table, key)] = record["version"]
            self._unindex(table, key, record["payload"])
            self._log({"op": "delete", "table": table, "key": key, "version": record["version"]})
            return True

    def _apply_write(self, record: dict) -> None:
        table, key = record["table"], record["key"]
        rows = self._tables.setdefault(table, {})
        old = rows.get(key)
        if old is not None:
            self._unindex(table, key, old["payload"])
        rows[key] = record
        self._versions[(table, key)] = record["version"]
        self._index(table, key, record["payload"])

    # -- queries ----------------------------------------------------------

    def read(self, table: str, key: str) -> Optional[dict]:
        with self._lock:
            record = self._tables.get(table, {}).get(key)
            return dict(record) if record else None

    def scan(self, table: str, field: Optional[str] = None, value=None) -> list[dict]:
        with self._lock:
            rows = self._tables.get(table, {})
            if field is None:
                keys = sorted(rows)
            elif field in INDEXED_FIELDS.get(table, ()):
                keys = sorted(self._indexes.get(table, {}).get(field, {}).get(_index_key(value), ()))
            else:
                keys = sorted(
                    k
                    for k, rec in rows.items()
                    if isinstance(rec["payload"], dict) and rec["payload"].get(field) == value
                )
            return [dict(rows[k]) for k in keys]

    def tables(self) -> list[str]:
        with self._lock:
            return sorted(self._tables)

    # -- replication / backup ---------------------------------------------

    def dump(self) -> dict:
        with self._lock:
            return {
                "tables": {t: {k: dict(r) for k, r in rows.items()} for t, rows in self._tables.items()},
                "versions": {f"{t}\x1f{k}": v for (t, k), v in self._versions.items()},
            }

    def load(self, snapshot: dict) -> None:
        with self._lock:
            self._tables = {}
            self._indexes = {}
            self._versions = {}
            for joined, version in snapshot.get("versions", {}).items():
                table, key = joined.split("\x1f", 1)
                self._versions[(table, key)] = version
            for table, rows in snapshot.get("tables", {}).items():
                for key, record in rows.items():
                    self._apply_write(dict(record))
            self._log({"op": "load", "snapshot": snapshot})

    def merge_newer(self, snapshot: dict) -> int:
        """Adopt records from `snapshot` whose version beats ours. Returns count adopted."""
        adopted = 0
        with self._lock:
            for table, rows in snapshot.get("tables", {}).items():
                for key, record in rows.items():
                    if record["version"] > self._versions.get((table, key), 0):
                        self._apply_write(dict(record))
                        self._log({"op": "write", "record": record})
                        adopted += 1
        return adopted

    def checksums(self) -> dict[str, str]:
        with self._lock:
            out = {}
            for table in sorted(self._tables):
                digest = hashlib.sha256()
                for key in sorted(self._tables[table]):
                    record = self._tables[table][key]
                    digest.update(
                        json.dumps(
                            [key, record["version"], record["payload"]],
                            sort_keys=True,
                            separators=(",", ":"),
                        ).encode("utf-8")
                    )
                out[table] = digest.hexdigest()
            return out

    # -- journal ----------------------------------------------------------

    def _log(self, entry: dict) -> None:
        if self._journal is None:
            return
        self._journal.write(json.dumps(entry, separators=(",", ":")) + "\n")
        self._journal.flush()

    def _replay_journal(self, path: str) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if entry["op"] == "write":
                    self._apply_write(entry["record"])
                elif entry["op"] == "delete":
                    rows = self._tables.get(entry["table"], {})
                    record = rows.pop(entry["key"], None)
                    if record is not None:
                        self._unindex(entry["table"], entry["key"], record["payload"])
                    self._versions[(entry["table"], entry["key"])] = entry["version"]
                elif entry["op"] == "load":
                    self._journal = None
                    self.load(entry["snapshot"])

    # -- indexes ----------------------------------------------------------

    def _index(self, table: str, key: str, payload) -> None:
        if not isinstance(payload, dict):
            return
        for field in INDEXED_FIELDS.get(table, ()):
            if field in payload:
                bucket = self._indexes.setdefault(table, {}).setdefault(field, {})
                bucket.setdefault(_index_key(payload[field]), set()).add(key)

    def _unindex(self, table: str, key: str, payload) -> None:
        if not isinstance(payload, dict):
            return
        for field in INDEXED_FIELDS.get(table, ()):
            if field in payload:
                bucket = self._indexes.get(table, {}).get(field, {})
                entry = bucket.get(_index_key(payload[field]))
                if entry:
                    entry.discard(key)

    def close(self) -> None:
        if self._journal is not None:
            self._journal.close()
            self._journal = None
