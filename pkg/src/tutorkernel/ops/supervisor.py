"""Child-process supervision: each service instance is a daemon subprocess
with its own log file and pidfile under the deployment data directory.

Stops drain first: the instance is deregistered, traffic moves away within a
watch latency, then the process gets SIGTERM (graceful) and finally SIGKILL.
"""
from __future__ import annotations

import json
import os
import signal
import subprocess
import sys
import time
from typing import Optional

from ..common.util import new_id
from ..registry.client import RegistryClient
from .config import DeploymentPlan

DAEMON_KINDS = (
    "registryd",
    "storereplica",
    "storeproxy",
    "cacheshard",
    "webapp",
    "engine",
    "gateway",
    "scaler-monitor",
    "plugin-rephraser",
)


class Supervisor:
    def __init__(self, plan: DeploymentPlan, registry: Optional[RegistryClient] = None):
        self.plan = plan
        self.registry = registry or RegistryClient("127.0.0.1", plan.registry_port)
        os.makedirs(plan.run_dir, exist_ok=True)
        os.makedirs(plan.log_dir, exist_ok=True)

    # -- process management ---------------------------------------------------

    def spawn(self, kind: str, extra_args: Optional[list[str]] = None,
              instance_id: Optional[str] = None) -> str:
        if kind not in DAEMON_KINDS:
            raise ValueError(f"unknown daemon kind {kind!r}")
        instance_id = instance_id or new_id(_short(kind))
        argv = [
            sys.executable, "-m", "tutorkernel.daemon",
            "--kind", kind,
            "--instance-id", instance_id,
            "--registry", f"127.0.0.1:{self.plan.registry_port}",
            "--data-dir", self.plan.data_dir,
            "--course", self.plan.course_id,
        ] + (extra_args or [])
        log_path = os.path.join(self.plan.log_dir, f"{instance_id}.log")
        with open(log_path, "ab") as log_file:
            proc = subprocess.Popen(
                argv, stdout=log_file, stderr=log_file, start_new_session=True
            )
        meta = {"instance_id": instance_id, "kind": kind, "pid": proc.pid, "argv": argv}
        with open(self._meta_path(instance_id), "w", encoding="utf-8") as fh:
            json.dump(meta, fh)
        return instance_id

    def stop_instance(self, instance_id: str, drain: bool = True, drain_s: float = 1.5) -> None:
        meta = self._read_meta(instance_id)
        try:
            self.registry.deregister(instance_id)
        except Exception:
            pass
        if drain:
            time.sleep(drain_s)  # watchers move traffic off before the process dies
        if meta is not None:
            _terminate(meta["pid"])
            os.unlink(self._meta_path(instance_id))

    def running(self) -> list[dict]:
        out = []
        if not os.path.isdir(self.plan.run_dir):
            return out
        for name in sorted(os.listdir(self.plan.run_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(self.plan.run_dir, name), encoding="utf-8") as fh:
                meta = json.load(fh)
            meta["alive"] = _alive(meta["pid"])
            out.append(meta)
        return out

    def stop_all(self, drain: bool = False) -> int:
        stopped = 0
        # reverse spawn order: traffic layers first, registry last
        order = {kind: i for i, kind in enumerate(DAEMON_KINDS)}
        for meta in sorted(self.running(), key=lambda m: -order.get(m["kind"], 0)):
            self.stop_instance(meta["instance_id"], drain=drain, drain_s=0.5)
            stopped += 1
        return stopped

    def instances_of(self, kind: str) -> list[dict]:
        return [m for m in self.running() if m["kind"] == kind]

    # -- helpers ------------------------------------------------------------------

    def _meta_path(self, instance_id: str) -> str:
        return os.path.join(self.plan.run_dir, f"{instance_id}.json")

    def _read_meta(self, instance_id: str) -> Optional[dict]:
        path = self._meta_path(instance_id)
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def wait_passing(self, kind: str, expect: int, timeout_s: float = 30.0) -> bool:
        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            try:
                if len(self.registry.passing_instances(kind)) >= expect:
                    return True
            except Exception:
                pass
            time.sleep(0.2)
        return False


def _short(kind: str) -> str:
    return {"storereplica": "store", "storeproxy": "stproxy", "cacheshard": "cache",
            "scaler-monitor": "scaler", "plugin-rephraser": "rephraser"}.get(kind, kind)


def _alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
        return True
    except ProcessLookupError:
        return False
    except PermissionError:
        return True


def _terminate(pid: int, grace_s: float = 5.0) -> None:
    try:
        os.killpg(pid, signal.SIGTERM)
    except (ProcessLookupError, PermissionError):
        try:
            os.kill(pid, signal.SIGTERM)
        except (ProcessLookupError, PermissionError):
            return
    deadline = time.monotonic() + grace_s
    while time.monotonic() < deadline:
        if not _alive(pid):
            return
        time.sleep(0.05)
    try:
        os.killpg(pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        try:
            os.kill(pid, signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            pass
