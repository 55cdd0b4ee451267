"""Deployment configuration: an INI file with operator-familiar keys.

    [cluster]
    NUM_WEBAPP = 2
    NUM_ENGINE = 2
    NUM_STORE = 3
    NUM_CACHE = 2
    APPORT = 8080
    REGISTRY_PORT = 8500
    COURSE_ID = cs101
    DATA_DIR = ./cluster-data
    UI_DIR =
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass


class PlanError(ValueError):
    pass


@dataclass
class DeploymentPlan:
    num_webapp: int = 2
    num_engine: int = 2
    num_store: int = 3
    num_cache: int = 2
    apport: int = 8080
    registry_port: int = 8500
    course_id: str = "demo"
    data_dir: str = "./cluster-data"
    ui_dir: str = ""
    autoscale: bool = False

    def __post_init__(self):
        if min(self.num_webapp, self.num_engine, self.num_store) < 1:
            raise PlanError("webapp, engine and store counts must be at least 1")
        if self.num_cache < 1:
            raise PlanError("at least one cache shard is required")
        if self.apport == self.registry_port:
            raise PlanError("APPORT and REGISTRY_PORT must differ")

    @property
    def run_dir(self) -> str:
        return os.path.join(self.data_dir, "run")

    @property
    def log_dir(self) -> str:
        return os.path.join(self.data_dir, "logs")


def load_plan(path: str) -> DeploymentPlan:
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise PlanError(f"cannot read config file {path!r}")
    if "cluster" not in parser:
        raise PlanError("config file needs a [cluster] section")
    section = parser["cluster"]

    def get_int(key: str, default: int) -> int:
        raw = section.get(key, str(default))
        try:
            return int(raw)
        except ValueError:
            raise PlanError(f"{key} must be an integer, got {raw!r}")

    return DeploymentPlan(
        num_webapp=get_int("NUM_WEBAPP", 2),
        num_engine=get_int("NUM_ENGINE", 2),
        num_store=get_int("NUM_STORE", 3),
        num_cache=get_int("NUM_CACHE", 2),
        apport=get_int("APPORT", 8080),
        registry_port=get_int("REGISTRY_PORT", 8500),
        course_id=section.get("COURSE_ID", "demo"),
        data_dir=section.get("DATA_DIR", "./cluster-data"),
        ui_dir=section.get("UI_DIR", ""),
        autoscale=section.get("AUTOSCALE", "0").strip() in ("1", "true", "yes"),
    )
