"""Length-prefixed JSON frame transport used by the record store and cache tiers.

Wire format: 4-byte big-endian payload length, then the UTF-8 JSON payload.
"""
from __future__ import annotations

import os
import socket
import struct
import threading
from typing import Callable, Optional

from .util import jdump, jload


def force_close(sock: socket.socket) -> None:
    """Abort a connection with an RST, immediately, even while other threads
    hold makefile() wrappers (socket.close() would defer until their io-refs
    drop)."""
    try:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_LINGER, struct.pack("ii", 1, 0))
    except OSError:
        pass
    try:
        fd = sock.detach()
        if fd >= 0:
            os.close(fd)
    except OSError:
        pass

_HEADER = struct.Struct(">I")
MAX_FRAME = 64 << 20


class FrameError(Exception):
    pass


def send_frame(sock: socket.socket, obj) -> None:
    payload = jdump(obj)
    sock.sendall(_HEADER.pack(len(payload)) + payload)


def recv_frame(sock: socket.socket):
    header = _recv_exact(sock, _HEADER.size)
    if header is None:
        return None
    (length,) = _HEADER.unpack(header)
    if length > MAX_FRAME:
        raise FrameError(f"frame of {length} bytes exceeds cap")
    payload = _recv_exact(sock, length)
    if payload is None:
        raise FrameError("connection closed mid-frame")
    return jload(payload)


def _recv_exact(sock: socket.socket, n: int) -> Optional[bytes]:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None if not buf else None
        buf += chunk
    return buf


class FrameClient:
    """One connection speaking request/response frames. Not thread-safe; callers lock."""

    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._sock: Optional[socket.socket] = None

    def _connect(self) -> socket.socket:
        if self._sock is None:
            self._sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
            self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        return self._sock

    def call(self, request: dict) -> dict:
        sock = self._connect()
        try:
            send_frame(sock, request)
            reply = recv_frame(sock)
        except (OSError, FrameError):
            self.close()
            raise
        if reply is None:
            self.close()
            raise FrameError("peer closed connection")
        return reply

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._sock.close()
            finally:
                self._sock = None


class FrameServer:
    """Threaded TCP server dispatching one handler per frame.

    `stop()` closes the listener and lets in-flight frames finish; `kill()`
    rips down every connection immediately to simulate a crash.
    """

    def __init__(self, handler: Callable[[dict], dict], host: str = "127.0.0.1", port: int = 0):
        self._handler = handler
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(128)
        self.host, self.port = self._listener.getsockname()
        self._conns: set[socket.socket] = set()
        self._lock = threading.Lock()
        self._closing = False
        self._thread: Optional[threading.Thread] = None

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()

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
            threading.Thread(target=self._serve_conn, args=(conn,), daemon=True).start()

    def _serve_conn(self, conn: socket.socket) -> None:
        try:
            while True:
                try:
                    request = recv_frame(conn)
                except (OSError, FrameError):
                    return
                if request is None:
                    return
                try:
                    reply = self._handler(request)
                except Exception as exc:  # handler bug: surface, keep serving others
                    reply = {"ok": False, "error": f"internal: {exc}"}
                try:
                    send_frame(conn, reply)
                except OSError:
                    return
        finally:
            with self._lock:
                self._conns.discard(conn)
            try:
                conn.close()
            except OSError:
                pass

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
        """Crash simulation: drop the listener and reset every live connection."""
        self.stop()
        with self._lock:
            conns = list(self._conns)
        for conn in conns:
            force_close(conn)
