"""URL routing rules: longest matching prefix wins, default pool is WEBAPP."""
from __future__ import annotations

from dataclasses import dataclass

WEBAPP = "WEBAPP"
ENGINE = "ENGINE"


@dataclass(frozen=True)
class RouteRule:
    path_prefix: str
    target_kind: str


DEFAULT_RULES = (
    RouteRule("/api/", WEBAPP),
    RouteRule("/ui/", WEBAPP),
    RouteRule("/engine/", ENGINE),
)


class RouteTable:
    def __init__(self, rules=DEFAULT_RULES, default: str = WEBAPP):
        self.rules = tuple(rules)
        self.default = default

    def route(self, path: str) -> str:
        """Target pool for a request path (longest matching prefix, else default).

        Prefixes match on segment boundaries: /engine matches /engine/compile
        but not /engineering.
        """
        best: RouteRule | None = None
        normalized = path if path.endswith("/") else path + "/"
        for rule in self.rules:
            prefix = rule.path_prefix.rstrip("/") + "/"
            if normalized.startswith(prefix) and (
                best is None or len(prefix) > len(best.path_prefix.rstrip("/") + "/")
            ):
                best = rule
        return best.target_kind if best else self.default
