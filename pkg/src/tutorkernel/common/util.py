"""Small shared helpers: time base, id minting, stable hashing."""
from __future__ import annotations

import hashlib
import json
import time
import uuid


def now_ms() -> int:
    """Milliseconds since the UNIX epoch, UTC. All timestamps in the system use this base."""
    return time.time_ns() // 1_000_000


def new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


def stable_hash64(key: str) -> int:
    """Stable unsigned 64-bit hash of a text key.

    Must be identical across processes and Python runs (never use built-in
    hash(): it is salted per process).
    """
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def seeded_int(*parts: object) -> int:
    """Deterministic integer derived from the given parts, for seeding RNGs."""
    blob = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def jdump(value) -> bytes:
    return json.dumps(value, separators=(",", ":"), sort_keys=True).encode("utf-8")


def jload(raw: bytes):
    return json.loads(raw.decode("utf-8"))
