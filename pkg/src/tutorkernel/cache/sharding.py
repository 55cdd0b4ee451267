"""The one canonical key→shard mapping.

Every cache client in the system (webapp, engine, anything else) must route
through this function; two modules computing shards differently would send
get and set for the same key to different shards. Do not reimplement it.
"""
from __future__ import annotations

from typing import Sequence

from ..common.util import stable_hash64


def shard_for(key: str, shard_ids: Sequence[str]) -> str:
    """Owning shard for `key`: stable 64-bit hash modulo the sorted shard list."""
    if not shard_ids:
        raise ValueError("no cache shards available")
    ordered = sorted(shard_ids)
    return ordered[stable_hash64(key) % len(ordered)]
