"""Session storage on the cache tier, shared by the webapp and the engine.

Losing a shard logs its users out; nothing else breaks. Sessions refresh
their ttl on every successful lookup.
"""
from __future__ import annotations

import json
import secrets
from typing import Optional

from .client import CacheCluster

DEFAULT_SESSION_TTL_S = 24 * 3600.0


class SessionStore:
    def __init__(self, cluster: CacheCluster, ttl_s: float = DEFAULT_SESSION_TTL_S):
        self.cluster = cluster
        self.ttl_s = ttl_s

    def create(self, user_id: str, role: str) -> str:
        token = secrets.token_hex(16)
        entry = {"user_id": user_id, "role": role}
        self.cluster.set(f"session:{token}", json.dumps(entry).encode("utf-8"), self.ttl_s)
        self._track(user_id, token)
        return token

    def lookup(self, token: Optional[str]) -> Optional[dict]:
        if not token or any(c.isspace() for c in token):
            return None
        raw = self.cluster.get(f"session:{token}")
        if raw is None:
            return None
        try:
            entry = json.loads(raw.decode("utf-8"))
        except ValueError:
            return None
        self.cluster.set(f"session:{token}", raw, self.ttl_s)  # refresh on access
        return entry

    def drop(self, token: str) -> None:
        self.cluster.delete(f"session:{token}")

    def drop_user(self, user_id: str) -> None:
        """Invalidate every session of a user (password change, account delete)."""
        raw = self.cluster.get(f"usersessions:{user_id}")
        if raw:
            try:
                tokens = json.loads(raw.decode("utf-8"))
            except ValueError:
                tokens = []
            for token in tokens:
                self.cluster.delete(f"session:{token}")
        self.cluster.delete(f"usersessions:{user_id}")

    def _track(self, user_id: str, token: str) -> None:
        key = f"usersessions:{user_id}"
        raw = self.cluster.get(key)
        tokens: list[str] = []
        if raw:
            try:
                tokens = json.loads(raw.decode("utf-8"))
            except ValueError:
                tokens = []
        tokens.append(token)
        self.cluster.set(key, json.dumps(tokens[-32:]).encode("utf-8"), self.ttl_s)
