"""One record-store replica: a frame server over a TableSet.

A recovering replica must call `anti_entropy` against a healthy peer before it
registers, then `reconcile` once more after registering to close the copy gap.
"""
from __future__ import annotations

import threading
from typing import Optional

from ..common.netframe import FrameClient, FrameServer
from .tables import TableSet


class StoreReplica:
    def __init__(self, instance_id: str, journal_path: Optional[str] = None,
                 host: str = "127.0.0.1", port: int = 0):
        self.instance_id = instance_id
        self.tables = TableSet(journal_path)
        self._write_lock = threading.Lock()
        self.server = FrameServer(self.handle, host=host, port=port)

    @property
    def address(self) -> str:
        return self.server.address

    def start(self) -> None:
        self.server.start()

    def stop(self) -> None:
        self.server.stop()
        self.tables.close()

    def kill(self) -> None:
        self.server.kill()

    # one write commits at a time per replica; the proxy already serializes
    # writes per key across the cluster, this guards the local journal order
    def handle(self, request: dict) -> dict:
        op = request.get("op")
        if op == "ping":
            return {"ok": True, "instance_id": self.instance_id}
        if op == "write":
            with self._write_lock:
                version = self.tables.write(request["table"], request["key"], request["payload"])
            return {"ok": True, "version": version}
        if op == "delete":
            with self._write_lock:
                existed = self.tables.delete(request["table"], request["key"])
            return {"ok": True, "existed": existed}
        if op == "read":
            record = self.tables.read(request["table"], request["key"])
            if record is None:
                return {"ok": False, "error": "not-found"}
            return {"ok": True, "record": record}
        if op == "scan":
            records = self.tables.scan(request["table"], request.get("field"), request.get("value"))
            return {"ok": True, "records": records}
        if op == "dump":
            return {"ok": True, "snapshot": self.tables.dump()}
        if op == "load":
            with self._write_lock:
                self.tables.load(request["snapshot"])
            return {"ok": True}
        if op == "merge":
            with self._write_lock:
                adopted = self.tables.merge_newer(request["snapshot"])
            return {"ok": True, "adopted": adopted}
        if op == "checksums":
            return {"ok": True, "checksums": self.tables.checksums()}
        return {"ok": False, "error": f"unknown op {op!r}"}

    # -- recovery ----------------------------------------------------------

    def anti_entropy(self, peer_host: str, peer_port: int) -> None:
        """Full state copy from a healthy peer; call before registering."""
        peer = FrameClient(peer_host, peer_port)
        try:
            reply = peer.call({"op": "dump"})
            if reply.get("ok"):
                self.tables.load(reply["snapshot"])
        finally:
            peer.close()

    def reconcile(self, peer_host: str, peer_port: int) -> int:
        """Adopt any per-key-newer records from the peer (post-registration catch-up)."""
        peer = FrameClient(peer_host, peer_port)
        try:
            reply = peer.call({"op": "dump"})
            if reply.get("ok"):
                return self.tables.merge_newer(reply["snapshot"])
            return 0
        finally:
            peer.close()
