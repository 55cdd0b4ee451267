"""Least-connected backend selection, shared by the HTTP gateway and the store proxy.

A single implementation keeps the two balancers' behavior identical and lets
one reference simulator check both.
"""
from __future__ import annotations

from dataclasses import dataclass
from threading import Lock
from typing import Iterable, Optional


@dataclass
class Backend:
    instance_id: str
    active_connections: int = 0
    healthy: bool = True


def pick_least_connected(backends: Iterable[Backend]) -> Optional[str]:
    """Return the healthy backend with the fewest active connections.

    Ties break to the lowest instance_id so selection is deterministic.
    Returns None when no backend is healthy.
    """
    best: Optional[Backend] = None
    for b in backends:
        if not b.healthy:
            continue
        if best is None or (b.active_connections, b.instance_id) < (
            best.active_connections,
            best.instance_id,
        ):
            best = b
    return best.instance_id if best else None


class ConnectionLedger:
    """Thread-safe active-connection counters over a mutable backend set.

    `acquire` picks least-connected and increments in one critical section so
    concurrent dispatchers never double-select a backend on stale counts.
    """

    def __init__(self) -> None:
        self._lock = Lock()
        self._backends: dict[str, Backend] = {}
        self._draining: set[str] = set()

    def sync(self, instance_ids: Iterable[str]) -> tuple[set[str], set[str]]:
        """Replace the healthy set; returns (added, removed-to-draining)."""
        wanted = set(instance_ids)
        with self._lock:
            current = set(self._backends) - self._draining
            added = wanted - current
            removed = current - wanted
            for iid in added:
                if iid in self._draining:
                    self._draining.discard(iid)
                else:
                    self._backends.setdefault(iid, Backend(iid))
            for iid in removed:
                if self._backends[iid].active_connections > 0:
                    self._draining.add(iid)
                else:
                    del self._backends[iid]
            return added, removed

    def acquire(self) -> Optional[str]:
        with self._lock:
            live = [b for iid, b in self._backends.items() if iid not in self._draining]
            chosen = pick_least_connected(live)
            if chosen is not None:
                self._backends[chosen].active_connections += 1
            return chosen

    def release(self, instance_id: str) -> None:
        with self._lock:
            b = self._backends.get(instance_id)
            if b is None:
                return
            b.active_connections = max(0, b.active_connections - 1)
            if instance_id in self._draining and b.active_connections == 0:
                self._draining.discard(instance_id)
                del self._backends[instance_id]

    def drop(self, instance_id: str) -> None:
        """Hard-remove a backend (failed mid-request); in-flight counts are discarded."""
        with self._lock:
            self._backends.pop(instance_id, None)
            self._draining.discard(instance_id)

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return {
                iid: b.active_connections
                for iid, b in self._backends.items()
                if iid not in self._draining
            }

    def draining(self) -> set[str]:
        with self._lock:
            return set(self._draining)
