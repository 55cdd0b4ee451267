"""Feedback-tool integration manifests.

A manifest is a JSON file:

    {
      "name": "<name_of_the_feedback_tool>",
      "services": [
        {
          "trigger": "<event_to_execute_this_service>",
          "containers": ["<instance ids hosting the service>"],
          "port": <port where the service listens>,
          "endpoint": "<url path for this service>"
        }
      ]
    }

Triggers form a closed set; `containers` entries are registry instance ids of
kind PLUGIN:<name>. Integration replaces any previous manifest of the same
name and requires no restart of anything.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Trigger(str, Enum):
    ON_COMPILE = "ON_COMPILE"
    PRE_COMPILE = "PRE_COMPILE"
    ON_EVALUATE = "ON_EVALUATE"
    ON_ACCEPTED = "ON_ACCEPTED"


class ManifestError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class PluginService:
    trigger: Trigger
    containers: list[str]
    port: int
    endpoint: str

    def to_row(self) -> dict:
        return {
            "trigger": self.trigger.value,
            "containers": list(self.containers),
            "port": self.port,
            "endpoint": self.endpoint,
        }


@dataclass
class PluginManifest:
    name: str
    services: list[PluginService] = field(default_factory=list)

    def to_row(self) -> dict:
        return {"name": self.name, "services": [s.to_row() for s in self.services]}

    @classmethod
    def from_row(cls, row: dict) -> "PluginManifest":
        return validate_manifest(row)


def validate_manifest(raw: dict) -> PluginManifest:
    if not isinstance(raw, dict):
        raise ManifestError("(root)", "manifest must be a JSON object")
    name = raw.get("name")
    if not name or not isinstance(name, str):
        raise ManifestError("name", "required non-empty string")
    services_raw = raw.get("services")
    if not isinstance(services_raw, list) or not services_raw:
        raise ManifestError("services", "required non-empty list")
    services: list[PluginService] = []
    for i, svc in enumerate(services_raw):
        where = f"services[{i}]"
        if not isinstance(svc, dict):
            raise ManifestError(where, "must be an object")
        trigger_raw = svc.get("trigger")
        try:
            trigger = Trigger(trigger_raw)
        except ValueError:
            valid = ", ".join(t.value for t in Trigger)
            raise ManifestError(f"{where}.trigger", f"{trigger_raw!r} is not one of: {valid}")
        containers = svc.get("containers")
        if not isinstance(containers, list) or not containers or not all(
            isinstance(c, str) and c for c in containers
        ):
            raise ManifestError(f"{where}.containers", "required non-empty list of instance ids")
        port = svc.get("port")
        if not isinstance(port, int) or not (0 < port < 65536):
            raise ManifestError(f"{where}.port", "required port number")
        endpoint = svc.get("endpoint")
        if not isinstance(endpoint, str) or not endpoint:
            raise ManifestError(f"{where}.endpoint", "required url path")
        services.append(PluginService(trigger, list(containers), port, endpoint))
    return PluginManifest(name=name, services=services)
