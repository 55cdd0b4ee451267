"""Cache cluster client: routes each key to its owning shard via the canonical
mapping. Shard loss degrades to misses, never to caller errors."""
from __future__ import annotations

import socket
import threading
from typing import Optional

from .sharding import shard_for


class _LineConn:
    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._reader = self._sock.makefile("rb")

    def roundtrip(self, request: bytes, extra: bytes = b"") -> tuple[bytes, bytes]:
        """Send a command line (+ payload), read the status line (+ payload)."""
        self._sock.sendall(request + extra)
        line = self._reader.readline()
        if not line:
            raise OSError("shard closed connection")
        if line.startswith(b"VALUE "):
            length = int(line.split()[1])
            value = self._reader.read(length)
            self._reader.readline()
            return line, value
        return line, b""

    def close(self):
        try:
            self._sock.close()
        except OSError:
            pass


class _ShardPool:
    """Connection pool for one shard; concurrent callers never share a socket."""

    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self.host, self.port, self.timeout = host, port, timeout
        self._idle: list[_LineConn] = []
        self._lock = threading.Lock()

    def roundtrip(self, request: bytes, extra: bytes = b"") -> tuple[bytes, bytes]:
        with self._lock:
            conn = self._idle.pop() if self._idle else None
        if conn is None:
            conn = _LineConn(self.host, self.port, self.timeout)
        try:
            result = conn.roundtrip(request, extra)
        except OSError:
            conn.close()
            raise
        with self._lock:
            self._idle.append(conn)
        return result

    def close(self):
        with self._lock:
            for conn in self._idle:
                conn.close()
            self._idle.clear()


class CacheCluster:
    """Client over a set of shards; the shard list may be replaced live
    (resharding invalidates remapped keys, which is acceptable for cache data)."""

    def __init__(self, shards: dict[str, tuple[str, int]]):
        self._lock = threading.Lock()
        self._shards: dict[str, tuple[str, int]] = dict(shards)
        self._conns: dict[str, _ShardPool] = {}

    def set_shards(self, shards: dict[str, tuple[str, int]]) -> None:
        with self._lock:
            gone = set(self._shards) - set(shards)
            self._shards = dict(shards)
            for iid in gone:
                conn = self._conns.pop(iid, None)
                if conn:
                    conn.close()

    def shard_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._shards)

    def owner_of(self, key: str) -> str:
        return shard_for(key, self.shard_ids())

    def _conn_for(self, key: str) -> _ShardPool:
        owner = self.owner_of(key)
        with self._lock:
            conn = self._conns.get(owner)
            if conn is None:
                host, port = self._shards[owner]
                conn = self._conns[owner] = _ShardPool(host, port)
            return conn

    def get(self, key: str) -> Optional[bytes]:
        """Value for key, or None on miss, expiry, or shard loss."""
        _validate(key)
        try:
            line, value = self._conn_for(key).roundtrip(b"GET %s\n" % key.encode("utf-8"))
        except (OSError, ValueError):
            return None
        return value if line.startswith(b"VALUE") else None

    def set(self, key: str, value: bytes, ttl_s: float) -> bool:
        """Store value under key for ttl_s seconds; False when the shard is down."""
        _validate(key)
        if ttl_s <= 0:
            raise ValueError("ttl must be positive")
        cmd = b"SET %s %s %d\n" % (key.encode("utf-8"), repr(ttl_s).encode(), len(value))
        try:
            line, _ = self._conn_for(key).roundtrip(cmd, value + b"\n")
        except (OSError, ValueError):
            return False
        return line.startswith(b"OK")

    def delete(self, key: str) -> bool:
        _validate(key)
        try:
            line, _ = self._conn_for(key).roundtrip(b"DEL %s\n" % key.encode("utf-8"))
        except (OSError, ValueError):
            return False
        return line.startswith(b"OK")

    def close(self) -> None:
        with self._lock:
            for conn in self._conns.values():
                conn.close()
            self._conns.clear()


def _validate(key: str) -> None:
    if not key or any(c.isspace() for c in key):
        raise ValueError(f"invalid cache key {key!r}")
