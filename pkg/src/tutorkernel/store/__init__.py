from .errors import StoreUnavailable, NotFound
from .tables import TableSet, INDEXED_FIELDS
from .replica import StoreReplica
from .proxy import StoreProxy
from .client import StoreClient

__all__ = [
    "StoreUnavailable",
    "NotFound",
    "TableSet",
    "INDEXED_FIELDS",
    "StoreReplica",
    "StoreProxy",
    "StoreClient",
]
