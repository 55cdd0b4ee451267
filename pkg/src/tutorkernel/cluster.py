"""In-process deployment: every service as an object in one process, wired
through real sockets and the real registry, with fast health checks.

This is the desk-scale harness behind the test suite and the experiment
scripts. Component kills here are real socket teardowns, so failure behavior
matches the subprocess deployment driven by opsctl.
"""
from __future__ import annotations

import json
import tempfile
import time
from typing import Optional

from .cache.client import CacheCluster
from .cache.server import CacheShard
from .common.httpkit import SamplePublisher, http_json, http_request
from .common.util import new_id
from .engine.config import EngineConfig
from .engine.service import EngineService
from .gateway.server import Gateway
from .model.fixture import seed_accounts
from .registry.client import RegistryClient, Watcher
from .registry.server import RegistryServer
from .store.client import StoreClient
from .store.proxy import StoreProxy
from .store.replica import StoreReplica
from .webapp.service import WebApp


class LocalCluster:
    def __init__(
        self,
        webapps: int = 2,
        engines: int = 2,
        store_replicas: int = 3,
        cache_shards: int = 2,
        check_interval_ms: int = 300,
        engine_config: Optional[EngineConfig] = None,
        config_poll_s: float = 0.5,
        with_gateway: bool = True,
        publish_samples: bool = False,
        course_id: str = "demo",
    ):
        self.check_interval_ms = check_interval_ms
        self.engine_config = engine_config
        self.config_poll_s = config_poll_s
        self.with_gateway = with_gateway
        self.publish_samples = publish_samples
        self.course_id = course_id
        self._counts = (webapps, engines, store_replicas, cache_shards)

        self.registry_server: Optional[RegistryServer] = None
        self.registry: Optional[RegistryClient] = None
        self.replicas: dict[str, StoreReplica] = {}
        self.store_proxy: Optional[StoreProxy] = None
        self.shards: dict[str, CacheShard] = {}
        self.webapps: dict[str, WebApp] = {}
        self.engines: dict[str, EngineService] = {}
        self.gateway: Optional[Gateway] = None
        self._watchers: list[Watcher] = []
        self._publishers: list[SamplePublisher] = []
        self.scratch = tempfile.mkdtemp(prefix="cluster-")

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> "LocalCluster":
        webapps, engines, store_replicas, cache_shards = self._counts
        self.registry_server = RegistryServer(probe_timeout_s=0.5)
        self.registry_server.start()
        self.registry = RegistryClient(self.registry_server.host, self.registry_server.port)

        for _ in range(store_replicas):
            self.add_store_replica()
        self.store_proxy = StoreProxy()
        self.store_proxy.start()
        proxy_watch = Watcher(
            self.registry, "STORE",
            lambda view, stale: self.store_proxy.apply_view(view.get("instances", []), stale=stale),
            poll_timeout_ms=2000,
        )
        proxy_watch.start()
        self._watchers.append(proxy_watch)
        self._register("stproxy-0", "STORE_PROXY", *self._split(self.store_proxy.address))
        self.store_proxy.apply_view(self.registry.view("STORE")["instances"])

        for _ in range(cache_shards):
            self.add_cache_shard()

        for _ in range(engines):
            self.add_engine()
        for _ in range(webapps):
            self.add_webapp()

        if self.with_gateway:
            self.gateway = Gateway(self.registry)
            self.gateway.start()
            self._register("gateway-0", "GATEWAY", self.gateway.host, self.gateway.port)
            for kind in ("WEBAPP", "ENGINE"):
                self.gateway.apply_view(kind, self.registry.view(kind)["instances"])
        return self

    def stop(self) -> None:
        for publisher in self._publishers:
            publisher.stop()
        for watcher in self._watchers:
            watcher.stop()
        if self.gateway:
            self.gateway.stop()
        for svc in list(self.webapps.values()) + list(self.engines.values()):
            svc.stop()
        for shard in self.shards.values():
            shard.stop()
        if self.store_proxy:
            self.store_proxy.stop()
        for replica in self.replicas.values():
            replica.stop()
        if self.registry_server:
            self.registry_server.stop()

    # -- component management ---------------------------------------------------

    def _register(self, iid: str, kind: str, host: str, port: int, probe: str | None = None):
        self.registry.register(
            iid, kind, host, port, probe=probe, interval_ms=self.check_interval_ms
        )

    @staticmethod
    def _split(address: str) -> tuple[str, int]:
        host, port = address.rsplit(":", 1)
        return host, int(port)

    def add_store_replica(self, join: bool = True) -> str:
        iid = f"store-{len(self.replicas)}"
        replica = StoreReplica(iid)
        replica.start()
        healthy = [r for r in self.replicas.values()]
        if join and healthy:
            peer = healthy[0]
            replica.anti_entropy(peer.server.host, peer.server.port)
        self.replicas[iid] = replica
        self._register(iid, "STORE", replica.server.host, replica.server.port)
        if join and healthy:
            replica.reconcile(healthy[0].server.host, healthy[0].server.port)
        return iid

    def add_cache_shard(self) -> str:
        iid = f"cache-{len(self.shards)}"
        shard = CacheShard(iid)
        shard.start()
        self.shards[iid] = shard
        self._register(iid, "CACHE", shard.host, shard.port)
        return iid

    def add_engine(self) -> str:
        iid = new_id("engine")
        svc = EngineService(
            iid,
            self.store_client(),
            self.cache_cluster(),
            self.registry,
            config=self.engine_config,
            scratch_root=None,
            config_poll_s=self.config_poll_s,
        )
        svc.start()
        self.engines[iid] = svc
        self._register(iid, "ENGINE", svc.host, svc.port, probe=f"http://{svc.host}:{svc.port}/healthz")
        if self.publish_samples:
            publisher = SamplePublisher(
                self.registry.kv_put, "ENGINE", iid, svc.service.rt_window, self.check_interval_ms
            )
            publisher.start()
            self._publishers.append(publisher)
        self._sync_gateway()
        return iid

    def add_webapp(self) -> str:
        iid = new_id("webapp")
        svc = WebApp(
            iid, self.store_client(), self.cache_cluster(), self.registry, course_id=self.course_id
        )
        svc.start()
        self.webapps[iid] = svc
        self._register(iid, "WEBAPP", svc.host, svc.port, probe=f"http://{svc.host}:{svc.port}/healthz")
        if self.publish_samples:
            publisher = SamplePublisher(
                self.registry.kv_put, "WEBAPP", iid, svc.service.rt_window, self.check_interval_ms
            )
            publisher.start()
            self._publishers.append(publisher)
        self._sync_gateway()
        return iid

    def _sync_gateway(self) -> None:
        if self.gateway is not None:
            for kind in ("WEBAPP", "ENGINE"):
                self.gateway.apply_view(kind, self.registry.view(kind)["instances"])

    def kill_webapp(self, instance_id: str) -> None:
        """Hard crash: connections reset, no deregistration."""
        self.webapps.pop(instance_id).kill()

    def kill_engine(self, instance_id: str) -> None:
        self.engines.pop(instance_id).kill()

    def kill_store_replica(self, instance_id: str) -> None:
        self.replicas.pop(instance_id).kill()

    def kill_cache_shard(self, instance_id: str) -> None:
        self.shards[instance_id].kill()

    def remove_webapp(self, instance_id: str) -> None:
        """Graceful removal: deregister, drain, stop."""
        self.registry.deregister(instance_id)
        self.wait_views_applied()
        self.webapps.pop(instance_id).stop()

    def wait_views_applied(self, settle_s: float = 0.5) -> None:
        time.sleep(settle_s)

    # -- clients ---------------------------------------------------------------

    def store_client(self) -> StoreClient:
        host, port = self._split(self.store_proxy.address)
        return StoreClient(host, port)

    def cache_cluster(self) -> CacheCluster:
        return CacheCluster(
            {iid: (shard.host, shard.port) for iid, shard in self.shards.items()}
        )

    def seed(self, students: int = 20, tas: int = 4, tutors: int = 2) -> None:
        store = self.store_client()
        for account in seed_accounts(students=students, tas=tas, tutors=tutors):
            store.write("accounts", account.user_id, account.to_row())

    # -- HTTP helpers (through the gateway when present) --------------------------

    def _front(self) -> tuple[str, int]:
        if self.gateway is not None:
            return self.gateway.host, self.gateway.port
        svc = next(iter(self.webapps.values()))
        return svc.host, svc.port

    def api(self, method: str, path: str, token: str | None = None,
            body: dict | None = None, timeout: float = 30.0) -> tuple[int, dict]:
        host, port = self._front()
        headers = {"X-Session-Token": token} if token else {}
        return http_json(method, host, port, path, body, headers=headers, timeout=timeout)

    def api_raw(self, method: str, path: str, token: str | None = None,
                timeout: float = 30.0) -> tuple[int, bytes]:
        host, port = self._front()
        headers = {"X-Session-Token": token} if token else {}
        status, _, payload = http_request(method, host, port, path, None, headers, timeout)
        return status, payload

    def login(self, login_name: str, credential: str | None = None) -> str:
        status, body = self.api(
            "POST", "/api/login",
            body={"login": login_name, "credential": credential or login_name},
        )
        if status != 200:
            raise RuntimeError(f"login failed for {login_name}: {status} {body}")
        return body["token"]

    def wait_all_passing(self, expectations: dict[str, int], timeout_s: float = 15.0) -> bool:
        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            ok = True
            for kind, expect in expectations.items():
                if len(self.registry.passing_instances(kind)) < expect:
                    ok = False
                    break
            if ok:
                return True
            time.sleep(0.1)
        return False
