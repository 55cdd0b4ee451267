"""Operations CLI.

    opsctl deploy  [-c config.ini] [--force]
    opsctl clean   [-c config.ini] [--purge-data]
    opsctl status  [-c config.ini]
    opsctl upscale KIND / downscale KIND
    opsctl update KIND / restart KIND
    opsctl integrate-feedback-tool MANIFEST.json
    opsctl seed    [-c config.ini]

Exit codes: 0 ok, 1 user error, 2 system error.
"""
from __future__ import annotations

import argparse
import json
import shutil
import socket
import sys
import time

from .. import __version__
from ..model.fixture import seed_accounts
from ..engine.corpus import seed_corpus
from ..plugins.manifest import ManifestError, validate_manifest
from ..plugins.rephrase import seed_default_rules
from ..registry.client import RegistryClient
from ..store.client import StoreClient
from .config import DeploymentPlan, PlanError, load_plan
from .supervisor import Supervisor

OK, USER_ERROR, SYSTEM_ERROR = 0, 1, 2
_SCALABLE = {"webapp": "WEBAPP", "engine": "ENGINE"}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="opsctl")
    parser.add_argument("-c", "--config", default="config.ini")
    sub = parser.add_subparsers(dest="command", required=True)
    deploy_p = sub.add_parser("deploy")
    deploy_p.add_argument("--force", action="store_true")
    clean_p = sub.add_parser("clean")
    clean_p.add_argument("--purge-data", action="store_true")
    sub.add_parser("status")
    for name in ("upscale", "downscale", "update", "restart"):
        p = sub.add_parser(name)
        p.add_argument("kind", choices=sorted(_SCALABLE))
    integrate_p = sub.add_parser("integrate-feedback-tool")
    integrate_p.add_argument("manifest")
    sub.add_parser("seed")
    args = parser.parse_args(argv)

    try:
        plan = load_plan(args.config) if args.config else DeploymentPlan()
    except PlanError as exc:
        if args.command in ("deploy", "clean", "status", "seed") and args.config == "config.ini":
            plan = DeploymentPlan()  # no config file: run on defaults
        else:
            print(f"config error: {exc}", file=sys.stderr)
            return USER_ERROR

    try:
        return _dispatch(args, plan)
    except PlanError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USER_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return SYSTEM_ERROR


def _dispatch(args, plan: DeploymentPlan) -> int:
    supervisor = Supervisor(plan)
    registry = supervisor.registry

    if args.command == "deploy":
        return _deploy(plan, supervisor, registry, args.force)
    if args.command == "clean":
        return _clean(plan, supervisor, args.purge_data)
    if args.command == "status":
        return _status(plan, supervisor, registry)
    if args.command == "upscale":
        iid = supervisor.spawn(_kind_daemon(args.kind))
        ok = supervisor.wait_passing(_SCALABLE[args.kind], 1)
        print(f"spawned {iid} ({'PASSING' if ok else 'pending'})")
        return OK
    if args.command == "downscale":
        return _downscale(args.kind, supervisor, registry)
    if args.command in ("update", "restart"):
        return _rolling_restart(args.kind, supervisor, registry, note=args.command)
    if args.command == "integrate-feedback-tool":
        return _integrate(args.manifest, registry)
    if args.command == "seed":
        return _seed(plan, registry)
    return USER_ERROR


def _port_free(port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            s.bind(("127.0.0.1", port))
            return True
        except OSError:
            return False


def _deploy(plan, supervisor: Supervisor, registry: RegistryClient, force: bool) -> int:
    live = [m for m in supervisor.running() if m["alive"]]
    if live and not force:
        print(f"{len(live)} instances already running; use --force to redeploy", file=sys.stderr)
        return USER_ERROR
    if live and force:
        supervisor.stop_all()
        time.sleep(0.5)
    # diagnose port conflicts before starting anything
    for name, port in (("REGISTRY_PORT", plan.registry_port), ("APPORT", plan.apport)):
        if not _port_free(port):
            print(f"port conflict: {name}={port} is already in use", file=sys.stderr)
            return USER_ERROR

    supervisor.spawn("registryd", ["--port", str(plan.registry_port)])
    deadline = time.monotonic() + 15
    while time.monotonic() < deadline:
        try:
            registry.kinds()
            break
        except Exception:
            time.sleep(0.2)
    else:
        print("registry did not come up", file=sys.stderr)
        return SYSTEM_ERROR

    for _ in range(plan.num_store):
        supervisor.spawn("storereplica")
        supervisor.wait_passing("STORE", 1)
    supervisor.wait_passing("STORE", plan.num_store)
    supervisor.spawn("storeproxy")
    supervisor.wait_passing("STORE_PROXY", 1)
    for _ in range(plan.num_cache):
        supervisor.spawn("cacheshard")
    supervisor.wait_passing("CACHE", plan.num_cache)
    for _ in range(plan.num_engine):
        supervisor.spawn("engine")
    for _ in range(plan.num_webapp):
        supervisor.spawn("webapp")
    gateway_args = ["--port", str(plan.apport)]
    if plan.ui_dir:
        gateway_args += ["--static-dir", plan.ui_dir]
    supervisor.spawn("gateway", gateway_args)
    if plan.autoscale:
        supervisor.spawn("scaler-monitor", ["--scale-kind", "WEBAPP"])
        supervisor.spawn("scaler-monitor", ["--scale-kind", "ENGINE"])

    ok = (
        supervisor.wait_passing("WEBAPP", plan.num_webapp)
        and supervisor.wait_passing("ENGINE", plan.num_engine)
        and supervisor.wait_passing("GATEWAY", 1)
    )
    if not ok:
        print("deployment did not converge to PASSING", file=sys.stderr)
        return SYSTEM_ERROR
    print(f"deployed: gateway on http://127.0.0.1:{plan.apport}, "
          f"registry status on http://127.0.0.1:{plan.registry_port}/status")
    return OK


def _clean(plan, supervisor: Supervisor, purge_data: bool) -> int:
    stopped = supervisor.stop_all()
    print(f"stopped {stopped} instances")
    if purge_data:
        shutil.rmtree(plan.data_dir, ignore_errors=True)
        print(f"removed {plan.data_dir}")
    return OK


def _status(plan, supervisor: Supervisor, registry: RegistryClient) -> int:
    for meta in supervisor.running():
        print(f"{meta['instance_id']:24s} {meta['kind']:16s} pid={meta['pid']} "
              f"{'alive' if meta['alive'] else 'DEAD'}")
    try:
        for kind in registry.kinds():
            view = registry.view(kind)
            passing = sum(1 for r in view["instances"] if r["health"] == "PASSING")
            print(f"registry: {kind}: {passing}/{len(view['instances'])} PASSING")
    except Exception:
        print("registry: unreachable")
    return OK


def _kind_daemon(kind: str) -> str:
    return {"webapp": "webapp", "engine": "engine"}[kind]


def _downscale(kind: str, supervisor: Supervisor, registry: RegistryClient) -> int:
    service_kind = _SCALABLE[kind]
    instances = registry.passing_instances(service_kind)
    if len(instances) <= 1:
        print(f"refusing to downscale {kind} below one instance", file=sys.stderr)
        return USER_ERROR
    victim = max(instances, key=lambda r: (r["registered_at"], r["instance_id"]))
    supervisor.stop_instance(victim["instance_id"], drain=True)
    print(f"stopped {victim['instance_id']}")
    return OK


def _rolling_restart(kind: str, supervisor: Supervisor, registry: RegistryClient, note: str) -> int:
    """Replace instances one at a time; the pool never goes empty when it
    started with more than one instance."""
    service_kind = _SCALABLE[kind]
    olds = supervisor.instances_of(_kind_daemon(kind))
    if not olds:
        print(f"no {kind} instances to {note}", file=sys.stderr)
        return USER_ERROR
    for meta in olds:
        replacement = supervisor.spawn(_kind_daemon(kind))
        if not supervisor.wait_passing(service_kind, len(olds) + 1):
            print(f"replacement {replacement} never went PASSING", file=sys.stderr)
            return SYSTEM_ERROR
        supervisor.stop_instance(meta["instance_id"], drain=True)
        print(f"{note}: replaced {meta['instance_id']} with {replacement} (version {__version__})")
    return OK


def _integrate(manifest_path: str, registry: RegistryClient) -> int:
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"cannot read manifest: {exc}", file=sys.stderr)
        return USER_ERROR
    except ValueError as exc:
        print(f"manifest is not valid JSON: {exc}", file=sys.stderr)
        return USER_ERROR
    try:
        manifest = validate_manifest(raw)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return USER_ERROR
    store = _store(registry)
    store.write("plugin_manifests", manifest.name, manifest.to_row())
    print(f"integrated feedback tool {manifest.name!r} "
          f"({len(manifest.services)} service(s)); engines pick it up on their next config poll")
    return OK


def _seed(plan, registry: RegistryClient) -> int:
    store = _store(registry)
    for account in seed_accounts():
        store.write("accounts", account.user_id, account.to_row())
    seed_corpus(store)
    seed_default_rules(store)
    print("seeded course accounts, problem corpus and rephrase rules")
    return OK


def _store(registry: RegistryClient) -> StoreClient:
    instances = registry.passing_instances("STORE_PROXY")
    if not instances:
        raise RuntimeError("no store proxy registered; is the system deployed?")
    rec = instances[0]
    return StoreClient(rec["address"]["host"], rec["address"]["port"])


if __name__ == "__main__":
    sys.exit(main())
