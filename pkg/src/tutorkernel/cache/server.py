"""One cache shard: non-persistent key/value map with TTL expiry and an LRU
byte cap, spoken over a debuggable text line protocol.

    GET <key>\n                 ->  VALUE <len>\n<bytes>\n  |  MISS\n
    SET <key> <ttl_s> <len>\n<bytes>\n  ->  OK\n
    DEL <key>\n                 ->  OK\n
    PING\n                      ->  PONG\n

Keys must not contain whitespace; values are raw bytes. Losing a shard loses
its keys, by design.
"""
from __future__ import annotations

import socket
import threading
import time
from collections import OrderedDict
from typing import Optional

from ..common.netframe import force_close


class CacheShard:
    def __init__(self, instance_id: str, host: str = "127.0.0.1", port: int = 0,
                 max_bytes: int = 64 << 20):
        self.instance_id = instance_id
        self.max_bytes = max_bytes
        self._data: OrderedDict[str, tuple[float, bytes]] = OrderedDict()  # key -> (expires_at, value)
        self._bytes = 0
        self._lock = threading.Lock()
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(128)
        self.host, self.port = self._listener.getsockname()
        self._conns: set[socket.socket] = set()
        self._closing = False

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    def start(self) -> None:
        threading.Thread(target=self._accept_loop, daemon=True).start()

    def stop(self) -> None:
        self._closing = True
        try:
            # shutdown wakes a concurrently blocked accept(); close alone does not
            self._listener.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self._listener.close()
        except OSError:
            pass

    def kill(self) -> None:
        """Crash simulation: all stored data is gone and connections reset."""
        self.stop()
        with self._lock:
            self._data.clear()
            self._bytes = 0
            conns = list(self._conns)
        for conn in conns:
            force_close(conn)

    # -- storage -------------------------------------------------------------

    def get_local(self, key: str) -> Optional[bytes]:
        now = time.monotonic()
        with self._lock:
            entry = self._data.get(key)
            if entry is None:
                return None
            expires_at, value = entry
            if expires_at <= now:
                del self._data[key]
                self._bytes -= len(value)
                return None
            self._data.move_to_end(key)
            return value

    def set_local(self, key: str, value: bytes, ttl_s: float) -> None:
        if ttl_s <= 0:
            raise ValueError("ttl must be positive")
        with self._lock:
            old = self._data.pop(key, None)
            if old is not None:
                self._bytes -= len(old[1])
            self._data[key] = (time.monotonic() + ttl_s, value)
            self._bytes += len(value)
            while self._bytes > self.max_bytes and self._data:
                _, (_, evicted) = self._data.popitem(last=False)
                self._bytes -= len(evicted)

    def delete_local(self, key: str) -> None:
        with self._lock:
            old = self._data.pop(key, None)
            if old is not None:
                self._bytes -= len(old[1])

    # -- protocol --------------------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._closing:
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            with self._lock:
                if self._closing:
                    conn.close()
                    return
                self._conns.add(conn)
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: socket.socket) -> None:
        reader = conn.makefile("rb")
        try:
            while True:
                line = reader.readline()
                if not line:
                    return
                parts = line.strip().decode("utf-8", "replace").split()
                if not parts:
                    continue
                cmd = parts[0].upper()
                try:
                    if cmd == "GET" and len(parts) == 2:
                        value = self.get_local(parts[1])
                        if value is None:
                            conn.sendall(b"MISS\n")
                        else:
                            conn.sendall(b"VALUE %d\n" % len(value) + value + b"\n")
                    elif cmd == "SET" and len(parts) == 4:
                        ttl_s, length = float(parts[2]), int(parts[3])
                        value = reader.read(length)
                        reader.readline()  # trailing newline
                        self.set_local(parts[1], value, ttl_s)
                        conn.sendall(b"OK\n")
                    elif cmd == "DEL" and len(parts) == 2:
                        self.delete_local(parts[1])
                        conn.sendall(b"OK\n")
                    elif cmd == "PING":
                        conn.sendall(b"PONG\n")
                    else:
                        conn.sendall(b"ERR bad-command\n")
                except (ValueError, OSError) as exc:
                    try:
                        conn.sendall(b"ERR %s\n" % str(exc).encode("utf-8", "replace"))
                    except OSError:
                        return
        except OSError:
            return
        finally:
            with self._lock:
                self._conns.discard(conn)
            try:
                conn.close()
            except OSError:
                pass
