from .service import WebApp, RouteSpec

__all__ = ["WebApp", "RouteSpec"]
