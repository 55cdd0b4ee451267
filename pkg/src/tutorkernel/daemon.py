"""Subprocess entrypoint for every service kind.

The supervisor launches `python -m tutorkernel.daemon --kind <kind> ...`; the
daemon builds the service, registers it, and runs until SIGTERM, at which
point it deregisters, waits a drain grace, and exits. A store replica that
finds healthy peers copies their state before registering and reconciles once
more after (rejoin protocol).
"""
from __future__ import annotations

import argparse
import os
import signal
import sys
import threading
import time

from .cache.client import CacheCluster
from .cache.server import CacheShard
from .common.httpkit import SamplePublisher
from .engine.service import EngineService
from .gateway.server import Gateway
from .plugins.rephrase import RephraserPlugin
from .registry.client import RegistryClient, Watcher
from .registry.server import RegistryServer
from .scaler.monitor import ScalerConfig, ScalerMonitor
from .store.client import StoreClient
from .store.proxy import StoreProxy
from .store.replica import StoreReplica

_CHECK_INTERVAL_MS = int(os.environ.get("TK_CHECK_INTERVAL_MS", "2000"))
_DRAIN_GRACE_S = float(os.environ.get("TK_DRAIN_GRACE_S", "1.0"))


def main(argv=None) -> int:
    sys.setswitchinterval(0.001)  # I/O-heavy services: cut GIL handoff latency
    parser = argparse.ArgumentParser(prog="tutorkernel.daemon")
    parser.add_argument("--kind", required=True)
    parser.add_argument("--instance-id", required=True)
    parser.add_argument("--registry", default="")
    parser.add_argument("--data-dir", default="./cluster-data")
    parser.add_argument("--course", default="demo")
    parser.add_argument("--port", type=int, default=0)
    parser.add_argument("--static-dir", default="")
    parser.add_argument("--scale-kind", default="WEBAPP")
    args = parser.parse_args(argv)

    registry = None
    if args.registry:
        host, port = args.registry.rsplit(":", 1)
        registry = RegistryClient(host, int(port))

    stop_event = threading.Event()
    signal.signal(signal.SIGTERM, lambda *_: stop_event.set())
    signal.signal(signal.SIGINT, lambda *_: stop_event.set())

    cleanup = _start(args, registry, stop_event)
    stop_event.wait()
    if registry is not None:
        try:
            registry.deregister(args.instance_id)
        except Exception:
            pass
        time.sleep(_DRAIN_GRACE_S)  # let watchers move traffic away first
    cleanup()
    return 0


def _start(args, registry, stop_event):
    kind = args.kind
    iid = args.instance_id
    data = args.data_dir

    def register(service_kind: str, host: str, port: int, probe: str | None = None):
        if registry is None:
            return
        registry.register(
            iid, service_kind, host, port,
            probe=probe or f"tcp://{host}:{port}",
            interval_ms=_CHECK_INTERVAL_MS,
        )

    if kind == "registryd":
        server = RegistryServer(
            port=args.port, journal_path=os.path.join(data, "registry", "journal.jsonl")
        )
        server.start()
        print(f"registry listening on {server.host}:{server.port}", flush=True)
        return server.stop

    if kind == "storereplica":
        replica = StoreReplica(
            iid, journal_path=os.path.join(data, "store", iid, "journal.jsonl"), port=args.port
        )
        replica.start()
        peer = _first_passing(registry, "STORE")
        if peer is not None:
            replica.anti_entropy(peer["address"]["host"], peer["address"]["port"])
        register("STORE", replica.server.host, replica.server.port)
        if peer is not None:
            # close the copy gap once traffic can already reach us
            def late_reconcile():
                time.sleep(2 * _CHECK_INTERVAL_MS / 1000.0)
                try:
                    replica.reconcile(peer["address"]["host"], peer["address"]["port"])
                except Exception:
                    pass

            threading.Thread(target=late_reconcile, daemon=True).start()
        return replica.stop

    if kind == "storeproxy":
        proxy = StoreProxy(port=args.port)
        proxy.start()
        watcher = Watcher(
            registry, "STORE",
            lambda view, stale: proxy.apply_view(view.get("instances", []), stale=stale),
        )
        watcher.start()
        register("STORE_PROXY", proxy.server.host, proxy.server.port)
        return lambda: (watcher.stop(), proxy.stop())

    if kind == "cacheshard":
        shard = CacheShard(iid, port=args.port)
        shard.start()
        register("CACHE", shard.host, shard.port)
        return shard.stop

    if kind in ("webapp", "engine"):
        store = _store_client(registry)
        cache, cache_watcher = _cache_cluster(registry)
        if kind == "webapp":
            from .webapp.service import WebApp

            svc = WebApp(iid, store, cache, registry, course_id=args.course, port=args.port)
            svc.start()
            register("WEBAPP", svc.host, svc.port, probe=f"http://{svc.host}:{svc.port}/healthz")
            publisher = SamplePublisher(
                registry.kv_put, "WEBAPP", iid, svc.service.rt_window, _CHECK_INTERVAL_MS
            )
        else:
            svc = EngineService(
                iid, store, cache, registry,
                scratch_root=os.path.join(data, "scratch", iid), port=args.port,
            )
            svc.start()
            register("ENGINE", svc.host, svc.port, probe=f"http://{svc.host}:{svc.port}/healthz")
            publisher = SamplePublisher(
                registry.kv_put, "ENGINE", iid, svc.service.rt_window, _CHECK_INTERVAL_MS
            )
        publisher.start()
        return lambda: (publisher.stop(), cache_watcher.stop(), svc.stop())

    if kind == "gateway":
        gw = Gateway(
            registry,
            port=args.port,
            access_log_path=os.path.join(data, "logs", f"{iid}.access.log"),
            static_dir=args.static_dir or None,
        )
        gw.start()
        register("GATEWAY", gw.host, gw.port)
        return gw.stop

    if kind == "scaler-monitor":
        from .ops.config import DeploymentPlan
        from .ops.supervisor import Supervisor

        plan = DeploymentPlan(data_dir=data, registry_port=int(args.registry.rsplit(":", 1)[1]))
        supervisor = Supervisor(plan, registry)
        monitor = ScalerMonitor(
            ScalerConfig(kind=args.scale_kind, publish_interval_ms=_CHECK_INTERVAL_MS),
            registry,
            supervisor,
            audit_log_path=os.path.join(data, "logs", f"scaler-{args.scale_kind}.log"),
        )
        monitor.start()
        return monitor.stop

    if kind == "plugin-rephraser":
        store = _store_client(registry)
        plugin = RephraserPlugin(store, port=args.port)
        plugin.start()
        register("PLUGIN:rephraser", plugin.host, plugin.port,
                 probe=f"http://{plugin.host}:{plugin.port}/healthz")
        return plugin.stop

    raise SystemExit(f"unknown daemon kind {kind!r}")


def _first_passing(registry, kind: str):
    if registry is None:
        return None
    try:
        instances = registry.passing_instances(kind)
    except Exception:
        return None
    return instances[0] if instances else None


def _store_client(registry) -> StoreClient:
    deadline = time.monotonic() + 30.0
    while time.monotonic() < deadline:
        rec = _first_passing(registry, "STORE_PROXY")
        if rec is not None:
            return StoreClient(rec["address"]["host"], rec["address"]["port"])
        time.sleep(0.2)
    raise SystemExit("no store proxy became available")


def _cache_cluster(registry) -> tuple[CacheCluster, Watcher]:
    cluster = CacheCluster({})

    def apply(view: dict, stale: bool) -> None:
        if stale:
            return
        cluster.set_shards(
            {
                rec["instance_id"]: (rec["address"]["host"], rec["address"]["port"])
                for rec in view.get("instances", [])
                if rec["health"] == "PASSING"
            }
        )

    try:
        apply(registry.view("CACHE"), False)
    except Exception:
        pass
    watcher = Watcher(registry, "CACHE", apply)
    watcher.start()
    return cluster, watcher


if __name__ == "__main__":
    sys.exit(main())
