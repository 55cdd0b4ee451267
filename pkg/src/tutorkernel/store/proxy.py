"""Store proxy: fans writes out to every healthy replica synchronously and
load-balances reads to the least-connected one.

A write is acknowledged only once all currently-healthy replicas committed it;
a replica failing mid-write is marked unhealthy and the write still succeeds
on the survivors. Divergent version responses raise the checksum-mismatch
alarm flag rather than healing silently.
"""
from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from ..common.balance import Backend, pick_least_connected
from ..common.netframe import FrameClient, FrameServer
from .errors import NotFound, StoreUnavailable

log = logging.getLogger(__name__)

_WRITE_STRIPES = 64


class _ReplicaLink:
    """Connection pool and health flag for one replica."""

    def __init__(self, instance_id: str, host: str, port: int):
        self.instance_id = instance_id
        self.host = host
        self.port = port
        self.healthy = True
        self.active = 0  # in-flight read-side ops, for least-connected selection
        self._idle: list[FrameClient] = []
        self._lock = threading.Lock()

    def call(self, request: dict) -> dict:
        with self._lock:
            client = self._idle.pop() if self._idle else FrameClient(self.host, self.port, timeout=10.0)
        try:
            reply = client.call(request)
        except Exception:
            client.close()
            raise
        with self._lock:
            self._idle.append(client)
        return reply

    def close(self) -> None:
        with self._lock:
            for client in self._idle:
                client.close()
            self._idle.clear()


class StoreProxy:
    SEQ_BATCH = 64

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._links: dict[str, _ReplicaLink] = {}
        self._links_lock = threading.Lock()
        self._write_locks = [threading.Lock() for _ in range(_WRITE_STRIPES)]
        self._seq_cache: dict[tuple[str, str], list[int]] = {}  # (table, key) -> [next, limit]
        self._fanout_pool = ThreadPoolExecutor(max_workers=32, thread_name_prefix="fanout")
        self.stale_view = False  # registry unreachable: serving last-known replica list
        self.divergence_alarm = False
        self.server = FrameServer(self.handle, host=host, port=port)

    @property
    def address(self) -> str:
        return self.server.address

    def start(self) -> None:
        self.server.start()

    def stop(self) -> None:
        self.server.stop()
        with self._links_lock:
            for link in self._links.values():
                link.close()

    def kill(self) -> None:
        self.server.kill()

    # -- membership --------------------------------------------------------

    def add_replica(self, instance_id: str, host: str, port: int) -> None:
        with self._links_lock:
            self._links[instance_id] = _ReplicaLink(instance_id, host, port)

    def remove_replica(self, instance_id: str) -> None:
        with self._links_lock:
            link = self._links.pop(instance_id, None)
        if link:
            link.close()

    def apply_view(self, instances: list[dict], *, stale: bool = False) -> None:
        """Rebuild the backend list from a registry view of STORE instances.

        An empty or stale view retains the previous list and raises the
        staleness flag so operators can see the registry outage.
        """
        if stale or not instances:
            self.stale_view = True
            return
        self.stale_view = False
        passing = {
            rec["instance_id"]: rec for rec in instances if rec.get("health") == "PASSING"
        }
        with self._links_lock:
            for iid in list(self._links):
                if iid not in passing:
                    self._links.pop(iid).close()
            for iid, rec in passing.items():
                if iid not in self._links:
                    host, port = rec["address"]["host"], rec["address"]["port"]
                    self._links[iid] = _ReplicaLink(iid, host, port)
                else:
                    self._links[iid].healthy = True

    def _healthy_links(self) -> list[_ReplicaLink]:
        with self._links_lock:
            return [l for l in self._links.values() if l.healthy]

    def _mark_unhealthy(self, link: _ReplicaLink) -> None:
        link.healthy = False
        log.warning("store replica %s marked unhealthy", link.instance_id)

    # -- balancing ----------------------------------------------------------

    def select_backend(self) -> Optional[str]:
        with self._links_lock:
            live = [
                Backend(l.instance_id, l.active, l.healthy) for l in self._links.values()
            ]
        return pick_least_connected(live)

    def _acquire_read_link(self) -> _ReplicaLink:
        with self._links_lock:
            live = [l for l in self._links.values() if l.healthy]
            chosen_id = pick_least_connected(
                Backend(l.instance_id, l.active, True) for l in live
            )
            if chosen_id is None:
                raise StoreUnavailable("no healthy store replica")
            link = self._links[chosen_id]
            link.active += 1
            return link

    def _release_read_link(self, link: _ReplicaLink) -> None:
        with self._links_lock:
            link.active = max(0, link.active - 1)

    # -- operations ----------------------------------------------------------

    def write(self, table: str, key: str, payload) -> int:
        stripe = self._write_locks[hash((table, key)) % _WRITE_STRIPES]
        with stripe:
            return self._fanout_write({"op": "write", "table": table, "key": key, "payload": payload})

    def delete(self, table: str, key: str) -> bool:
        stripe = self._write_locks[hash((table, key)) % _WRITE_STRIPES]
        with stripe:
            reply = self._fanout({"op": "delete", "table": table, "key": key})
            return any(r.get("existed") for r in reply)

    def bump(self, table: str, key: str) -> int:
        """Strictly increasing counter with sequence caching.

        The proxy reserves a block of ids by durably writing the high-water
        mark to every replica, then hands values out from memory. A proxy
        restart resumes past the stored high-water mark, so values are never
        reused; unused tail ids of a block are simply skipped.
        """
        stripe = self._write_locks[hash((table, key)) % _WRITE_STRIPES]
        with stripe:
            cache = self._seq_cache.get((table, key))
            if cache is None or cache[0] >= cache[1]:
                try:
                    current = int(self._read(table, key)["payload"])
                except NotFound:
                    current = 0
                start = max(current, cache[1] if cache else 0)
                limit = start + self.SEQ_BATCH
                self._fanout_write({"op": "write", "table": table, "key": key, "payload": limit})
                cache = self._seq_cache[(table, key)] = [start, limit]
            cache[0] += 1
            return cache[0]

    def _fanout_write(self, request: dict) -> int:
        replies = self._fanout(request)
        versions = {r["version"] for r in replies}
        if len(versions) > 1:
            self.divergence_alarm = True
            log.error("replica version divergence on %s/%s: %s", request["table"], request["key"], versions)
        return max(versions)

    def _fanout(self, request: dict) -> list[dict]:
        """Send one request to every healthy replica concurrently; ack requires
        every remaining healthy replica to have committed."""
        targets = self._healthy_links()
        if not targets:
            raise StoreUnavailable("no healthy store replica")

        def call_one(link: _ReplicaLink):
            try:
                reply = link.call(request)
            except Exception:
                return link, None
            return link, reply

        if len(targets) == 1:
            outcomes = [call_one(targets[0])]
        else:
            outcomes = list(self._fanout_pool.map(call_one, targets))
        replies: list[dict] = []
        for link, reply in outcomes:
            if reply is None or not reply.get("ok"):
                self._mark_unhealthy(link)
                continue
            replies.append(reply)
        if not replies:
            raise StoreUnavailable("all replicas failed during write")
        return replies

    def read(self, table: str, key: str) -> dict:
        return self._read(table, key)

    def _read(self, table: str, key: str) -> dict:
        reply = self._read_op({"op": "read", "table": table, "key": key})
        if not reply.get("ok"):
            raise NotFound(f"{table}/{key}")
        return reply["record"]

    def scan(self, table: str, field: Optional[str] = None, value=None) -> list[dict]:
        reply = self._read_op({"op": "scan", "table": table, "field": field, "value": value})
        return reply["records"]

    def _read_op(self, request: dict) -> dict:
        last_error: Optional[Exception] = None
        for _ in range(len(self._links) or 1):
            try:
                link = self._acquire_read_link()
            except StoreUnavailable:
                raise
            try:
                return link.call(request)
            except Exception as exc:
                self._mark_unhealthy(link)
                last_error = exc
            finally:
                self._release_read_link(link)
        raise StoreUnavailable(f"read failed on every replica: {last_error}")

    def dump(self) -> dict:
        return self._read_op({"op": "dump"})["snapshot"]

    def load(self, snapshot: dict) -> None:
        self._fanout({"op": "load", "snapshot": snapshot})

    def checksums(self) -> dict[str, dict[str, str]]:
        """Per-replica table checksums; flips the alarm when replicas disagree."""
        out: dict[str, dict[str, str]] = {}
        for link in self._healthy_links():
            try:
                out[link.instance_id] = link.call({"op": "checksums"})["checksums"]
            except Exception:
                self._mark_unhealthy(link)
        if len({tuple(sorted(v.items())) for v in out.values()}) > 1:
            self.divergence_alarm = True
        return out

    # -- the client-facing frame surface ------------------------------------

    def handle(self, request: dict) -> dict:
        op = request.get("op")
        try:
            if op == "ping":
                return {"ok": True, "stale_view": self.stale_view}
            if op == "write":
                version = self.write(request["table"], request["key"], request["payload"])
                return {"ok": True, "version": version}
            if op == "delete":
                return {"ok": True, "existed": self.delete(request["table"], request["key"])}
            if op == "bump":
                return {"ok": True, "value": self.bump(request["table"], request["key"])}
            if op == "read":
                return {"ok": True, "record": self.read(request["table"], request["key"])}
            if op == "scan":
                records = self.scan(request["table"], request.get("field"), request.get("value"))
                return {"ok": True, "records": records}
            if op == "dump":
                return {"ok": True, "snapshot": self.dump()}
            if op == "load":
                self.load(request["snapshot"])
                return {"ok": True}
            if op == "checksums":
                return {"ok": True, "checksums": self.checksums(), "alarm": self.divergence_alarm}
            return {"ok": False, "error": f"unknown op {op!r}"}
        except NotFound as exc:
            return {"ok": False, "error": "not-found", "detail": str(exc)}
        except StoreUnavailable as exc:
            return {"ok": False, "error": "unavailable", "detail": str(exc)}
