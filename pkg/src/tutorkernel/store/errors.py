class StoreUnavailable(RuntimeError):
    """No healthy replica can satisfy the request."""


class NotFound(KeyError):
    """The (table, key) pair does not exist."""
