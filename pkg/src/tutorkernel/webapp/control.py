"""Control panel: engine settings, plugin integration, rephrase rules.

Config writes validate before landing in the store; engines pick changes up
on their next poll, no restarts anywhere.
"""
from __future__ import annotations

from ..common.httpkit import HttpError, Request, Response
from ..engine.config import CONFIG_TABLE, ENGINE_CONFIG_KEY, EngineConfig
from ..plugins.manifest import ManifestError, validate_manifest
from ..plugins.rephrase import RULES_TABLE, RephraseRule, RuleError

_NUMERIC_FIELDS = ("time_quota_ms", "memory_quota_bytes", "output_cap_bytes",
                   "max_concurrent", "request_timeout_ms", "autosave_period_s")


def current_config(app) -> EngineConfig:
    payload = app.store.get(CONFIG_TABLE, ENGINE_CONFIG_KEY)
    if payload:
        try:
            return EngineConfig.from_row(payload)
        except (ValueError, KeyError):
            pass
    return EngineConfig()


def get_config(app, req: Request) -> Response:
    return Response.json(current_config(app).to_row())


def put_config(app, req: Request) -> Response:
    body = req.json()
    row = current_config(app).to_row()
    for key, value in body.items():
        if key not in row:
            raise HttpError(400, f"unknown config field {key!r}")
        if key in _NUMERIC_FIELDS:
            if not isinstance(value, int) or isinstance(value, bool):
                raise HttpError(400, f"{key} must be an integer")
        row[key] = value
    try:
        config = EngineConfig.from_row(row)
    except (TypeError, ValueError) as exc:
        raise HttpError(400, f"invalid config: {exc}")
    app.store.write(CONFIG_TABLE, ENGINE_CONFIG_KEY, config.to_row())
    return Response.json(config.to_row())


def integrate_plugin(app, req: Request) -> Response:
    """Register a feedback tool from its manifest; idempotent per name."""
    try:
        manifest = validate_manifest(req.json())
    except ManifestError as exc:
        raise HttpError(400, str(exc))
    app.store.write("plugin_manifests", manifest.name, manifest.to_row())
    config = current_config(app)
    config.plugins_enabled.setdefault(manifest.name, True)
    app.store.write(CONFIG_TABLE, ENGINE_CONFIG_KEY, config.to_row())
    return Response.json({"ok": True, "name": manifest.name})


def get_rules(app, req: Request) -> Response:
    rows = sorted(app.store.scan_payloads(RULES_TABLE), key=lambda r: (r["order"], r["rule_id"]))
    return Response.json({"rules": rows})


def put_rules(app, req: Request) -> Response:
    """Replace the rephrase rule set; patterns are validated up front."""
    rules_raw = req.json().get("rules")
    if not isinstance(rules_raw, list):
        raise HttpError(400, "rules must be a list")
    rules = []
    for i, raw in enumerate(rules_raw):
        try:
            rules.append(
                RephraseRule(
                    rule_id=raw.get("rule_id") or f"rule-{i:03d}",
                    pattern=raw["pattern"],
                    template=raw["template"],
                    order=raw.get("order", i),
                    rank_count=raw.get("rank_count", 0),
                )
            )
        except KeyError as exc:
            raise HttpError(400, f"rules[{i}] is missing {exc}")
        except RuleError as exc:
            raise HttpError(400, str(exc))
    for record in app.store.scan(RULES_TABLE):
        app.store.delete(RULES_TABLE, record["key"])
    for rule in rules:
        app.store.write(RULES_TABLE, rule.rule_id, rule.to_row())
    return Response.json({"count": len(rules)})
