"""Compiler-message rephrasing: the sample feedback tool.

Rules are (regex pattern, message template) pairs entered by instructors and
applied first-match in their listed order. A template may reference regex
captures (\\1, \\g<name>) and the diagnostic fields {line}, {col}, {file}.
Each match bumps the rule's rank_count, giving a frequency ranking of the
error kinds students actually hit.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from ..common.httpkit import HttpService, Request, Response
from ..store.client import StoreClient

RULES_TABLE = "rephrase_rules"


class RuleError(ValueError):
    pass


@dataclass
class RephraseRule:
    rule_id: str
    pattern: str
    template: str
    order: int = 0
    rank_count: int = 0
    _compiled: Optional[re.Pattern] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        try:
            self._compiled = re.compile(self.pattern)
        except re.error as exc:
            raise RuleError(f"rule {self.rule_id}: bad pattern {self.pattern!r}: {exc}")

    def to_row(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "pattern": self.pattern,
            "template": self.template,
            "order": self.order,
            "rank_count": self.rank_count,
        }

    @classmethod
    def from_row(cls, row: dict) -> "RephraseRule":
        return cls(
            rule_id=row["rule_id"],
            pattern=row["pattern"],
            template=row["template"],
            order=row.get("order", 0),
            rank_count=row.get("rank_count", 0),
        )


class _KeepMissing(dict):
    def __missing__(self, key):
        return "{" + key + "}"


def rephrase(diagnostics: list[dict], rules: list[RephraseRule]) -> list[dict]:
    """Rewrite each diagnostic by its first matching rule, in rule order.

    Mutates the matched rules' rank_count; diagnostics without a match pass
    through untouched.
    """
    ordered = sorted(rules, key=lambda r: (r.order, r.rule_id))
    out = []
    for diag in diagnostics:
        text = diag.get("text", "")
        rewritten = dict(diag)
        for rule in ordered:
            match = rule._compiled.search(text)
            if match is None:
                continue
            fields = _KeepMissing(
                line=diag.get("line", "?"), col=diag.get("col", "?"), file=diag.get("file", "?")
            )
            template = rule.template.format_map(fields)
            try:
                rewritten["text"] = match.expand(template)
            except re.error:
                rewritten["text"] = template
            rewritten["rephrased_by"] = rule.rule_id
            rule.rank_count += 1
            break
        out.append(rewritten)
    return out


def ranking(rules: list[RephraseRule]) -> list[RephraseRule]:
    """Rules by how often they matched, most frequent first; stable on ties."""
    return sorted(rules, key=lambda r: (-r.rank_count, r.order, r.rule_id))


class RephraserPlugin:
    """HTTP feedback service: POST /rephrase rewrites the diagnostics it is
    sent; GET /ranking reports rule frequencies.

    Rules live in the store so instructors can edit them live from the
    control panel; they are re-read on every call (hot reload), and match
    counts are written back.
    """

    def __init__(self, store: StoreClient, host: str = "127.0.0.1", port: int = 0):
        self.store = store
        self.service = HttpService(host=host, port=port)
        self.service.add_route("POST", "/rephrase", self._h_rephrase)
        self.service.add_route("GET", "/ranking", self._h_ranking)

    @property
    def host(self) -> str:
        return self.service.host

    @property
    def port(self) -> int:
        return self.service.port

    def start(self) -> None:
        self.service.start()

    def stop(self) -> None:
        self.service.stop()

    def _load_rules(self) -> list[RephraseRule]:
        rules = []
        for row in self.store.scan_payloads(RULES_TABLE):
            try:
                rules.append(RephraseRule.from_row(row))
            except RuleError:
                continue  # bad rule rows are skipped, not fatal
        return rules

    def _h_rephrase(self, req: Request) -> Response:
        body = req.json()
        diagnostics = body.get("diagnostics") or []
        rules = self._load_rules()
        before = {r.rule_id: r.rank_count for r in rules}
        rewritten = rephrase(diagnostics, rules)
        for rule in rules:
            if rule.rank_count != before[rule.rule_id]:
                self.store.write(RULES_TABLE, rule.rule_id, rule.to_row())
        items = [d["text"] for d in rewritten if "rephrased_by" in d]
        return Response.json({"diagnostics": rewritten, "items": items})

    def _h_ranking(self, req: Request) -> Response:
        ranked = ranking(self._load_rules())
        return Response.json(
            {"ranking": [{"rule_id": r.rule_id, "pattern": r.pattern, "rank_count": r.rank_count} for r in ranked]}
        )


def seed_default_rules(store: StoreClient) -> None:
    """A starter rule set for the default course language."""
    defaults = [
        ("expected ':'", "You are probably missing a colon at the end of line {line}.", 0),
        (r"invalid syntax", "Check line {line}: the syntax is not valid there.", 1),
        (r"name '(\w+)' is not defined", "You used the name '\\1' before defining it (line {line}).", 2),
        (r"unexpected indent", "Line {line} is indented more than expected.", 3),
        (r"was never closed", "A bracket or quote opened near line {line} was never closed.", 4),
    ]
    for i, (pattern, template, order) in enumerate(defaults):
        rule = RephraseRule(rule_id=f"rule-{i:03d}", pattern=pattern, template=template, order=order)
        store.write(RULES_TABLE, rule.rule_id, rule.to_row())
