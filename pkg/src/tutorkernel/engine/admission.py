"""Bounded-concurrency admission with FIFO queueing.

At most `limit` jobs run at once; excess arrivals wait in order. A job whose
queue wait would blow the request timeout is bounced as BUSY instead of
running late.
"""
from __future__ import annotations

import threading
import time
from collections import deque


class Busy(RuntimeError):
    pass


class AdmissionGate:
    def __init__(self, limit: int):
        self._limit = limit
        self._lock = threading.Lock()
        self._waiters: deque[threading.Event] = deque()
        self.running = 0
        self.max_running = 0  # watermark, for the concurrency-bound check

    def set_limit(self, limit: int) -> None:
        with self._lock:
            self._limit = max(1, limit)
            self._wake_waiters()

    def acquire(self, timeout_s: float) -> None:
        ticket = threading.Event()
        with self._lock:
            if not self._waiters and self.running < self._limit:
                self.running += 1
                self.max_running = max(self.max_running, self.running)
                return
            self._waiters.append(ticket)
        if ticket.wait(timeout_s):
            return
        with self._lock:
            try:
                self._waiters.remove(ticket)
            except ValueError:
                if ticket.is_set():
                    return  # granted in the race window: run with it
        raise Busy("admission queue wait exceeded the request timeout")

    def release(self) -> None:
        with self._lock:
            self.running -= 1
            self._wake_waiters()

    def _wake_waiters(self) -> None:
        while self._waiters and self.running < self._limit:
            ticket = self._waiters.popleft()
            self.running += 1
            self.max_running = max(self.max_running, self.running)
            ticket.set()

    def stats(self) -> dict:
        with self._lock:
            return {
                "running": self.running,
                "queued": len(self._waiters),
                "limit": self._limit,
                "max_running": self.max_running,
            }
