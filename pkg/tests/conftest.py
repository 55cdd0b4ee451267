from __future__ import annotations

import time

import pytest

from tutorkernel.cache.client import CacheCluster
from tutorkernel.cache.server import CacheShard
from tutorkernel.store.client import StoreClient
from tutorkernel.store.proxy import StoreProxy
from tutorkernel.store.replica import StoreReplica


@pytest.fixture
def store_trio():
    """Three replicas behind a proxy, plus a client."""
    replicas = [StoreReplica(f"st{i}") for i in range(3)]
    for r in replicas:
        r.start()
    proxy = StoreProxy()
    proxy.start()
    for r in replicas:
        proxy.add_replica(r.instance_id, r.server.host, r.server.port)
    client = StoreClient(proxy.server.host, proxy.server.port)
    yield replicas, proxy, client
    client.close()
    proxy.stop()
    for r in replicas:
        r.stop()


@pytest.fixture
def cache_pair():
    shards = [CacheShard(f"c{i}") for i in range(2)]
    for s in shards:
        s.start()
    cluster = CacheCluster({s.instance_id: (s.host, s.port) for s in shards})
    yield shards, cluster
    cluster.close()
    for s in shards:
        s.stop()


def wait_until(predicate, timeout_s: float = 10.0, interval_s: float = 0.05) -> bool:
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(interval_s)
    return False


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {name}: {verdict} ({report.duration:.1f}s)")
