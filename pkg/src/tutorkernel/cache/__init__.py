from .sharding import shard_for
from .server import CacheShard
from .client import CacheCluster
from .sessions import SessionStore

__all__ = ["shard_for", "CacheShard", "CacheCluster", "SessionStore"]
