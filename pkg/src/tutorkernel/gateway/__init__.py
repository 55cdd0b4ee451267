from .routes import RouteRule, RouteTable, DEFAULT_RULES
from .server import Gateway

__all__ = ["RouteRule", "RouteTable", "DEFAULT_RULES", "Gateway"]
