from __future__ import annotations

import threading
import time

import pytest

from tutorkernel.common.httpkit import HttpService
from tutorkernel.registry.client import RegistryClient, Watcher
from tutorkernel.registry.server import RegistryServer

from conftest import wait_until


@pytest.fixture
def registry():
    server = RegistryServer(probe_timeout_s=0.3)
    server.start()
    client = RegistryClient(server.host, server.port)
    yield server, client
    server.stop()


@pytest.fixture
def probe_target():
    svc = HttpService()
    svc.start()
    yield svc
    svc.stop()


def _register(client, target, iid="i1", kind="ENGINE", interval_ms=150, threshold=3):
    client.register(
        iid, kind, target.host, target.port,
        probe=f"tcp://{target.host}:{target.port}",
        interval_ms=interval_ms, failure_threshold=threshold,
    )


class TestRegistration:
    def test_register_appears_in_view(self, registry, probe_target):
        _, client = registry
        _register(client, probe_target)
        view = client.view("ENGINE")
        assert [r["instance_id"] for r in view["instances"]] == ["i1"]
        assert view["instances"][0]["health"] == "PASSING"

    def test_duplicate_id_replaces(self, registry, probe_target):
        _, client = registry
        _register(client, probe_target)
        replaced = client.register("i1", "ENGINE", probe_target.host, probe_target.port + 1)
        assert replaced is True
        view = client.view("ENGINE")
        assert len(view["instances"]) == 1
        assert view["instances"][0]["address"]["port"] == probe_target.port + 1

    def test_deregister_idempotent(self, registry, probe_target):
        _, client = registry
        _register(client, probe_target)
        client.deregister("i1")
        client.deregister("i1")  # no-op
        client.deregister("never-existed")  # no-op
        assert client.view("ENGINE")["instances"] == []


class TestHealth:
    def test_flips_failing_after_threshold_consecutive_failures(self, registry):
        _, client = registry
        # register against a port nothing listens on: reachable-at-registration
        # is the caller's business; the checker sees pure failures
        client.register("dead", "ENGINE", "127.0.0.1", 1, probe="tcp://127.0.0.1:1",
                        interval_ms=100, failure_threshold=3)
        assert wait_until(
            lambda: client.view("ENGINE")["instances"][0]["health"] == "FAILING"
            if client.view("ENGINE")["instances"] else False,
            timeout_s=3,
        )

    def test_hysteresis_exactly_threshold_failures(self, registry, probe_target):
        server, client = registry
        _register(client, probe_target, interval_ms=100, threshold=3)
        wait_until(lambda: client.view("ENGINE")["instances"][0]["last_check"] > 0, timeout_s=3)
        probe_target.stop()  # probes start failing now
        flip_started = time.monotonic()
        assert wait_until(
            lambda: client.view("ENGINE")["instances"][0]["health"] == "FAILING", timeout_s=3
        )
        elapsed = time.monotonic() - flip_started
        assert elapsed >= 0.15, f"flipped after {elapsed:.3f}s: fewer than 3 consecutive failures"

    def test_single_success_restores_passing(self, registry):
        import socket

        server, client = registry
        # bound but not listening: connections are refused until listen()
        flappy = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        flappy.bind(("127.0.0.1", 0))
        host, port = flappy.getsockname()
        client.register("flappy", "ENGINE", host, port, probe=f"tcp://{host}:{port}",
                        interval_ms=100, failure_threshold=2)
        assert wait_until(lambda: client.view("ENGINE")["instances"][0]["health"] == "FAILING", 3)
        flappy.listen(16)  # one successful probe is enough to recover
        assert wait_until(lambda: client.view("ENGINE")["instances"][0]["health"] == "PASSING", 3)
        flappy.close()

    def test_crashed_instance_auto_removed_after_five_intervals(self, registry, probe_target):
        _, client = registry
        _register(client, probe_target, interval_ms=100)
        probe_target.kill()
        assert wait_until(lambda: client.view("ENGINE")["instances"] == [], timeout_s=5)


class TestWatch:
    def test_add_two_kill_one(self, registry):
        _, client = registry
        a, b = HttpService(), HttpService()
        a.start()
        b.start()
        client.register("w-a", "WEBAPP", a.host, a.port, interval_ms=100)
        client.register("w-b", "WEBAPP", b.host, b.port, interval_ms=100)
        b.kill()
        def final_state():
            instances = client.view("WEBAPP")["instances"]
            passing = [r for r in instances if r["health"] == "PASSING"]
            return len(passing) == 1 and passing[0]["instance_id"] == "w-a"
        assert wait_until(final_state, timeout_s=5)
        a.stop()

    def test_watch_of_empty_kind_returns_single_empty_view(self, registry):
        _, client = registry
        view = client.watch("NOTHING", since=-1, timeout_ms=200)
        assert view["instances"] == [] and view["version"] == 0

    def test_rapid_flips_coalesce(self, registry, probe_target):
        server, client = registry
        views: list[dict] = []
        lock = threading.Lock()

        def collect(view, stale):
            if not stale:
                with lock:
                    views.append(view)

        watcher = Watcher(client, "ENGINE", collect, poll_timeout_ms=500)
        watcher.start()
        flips = 100
        for i in range(flips):
            client.register("flip", "ENGINE", probe_target.host, probe_target.port,
                            interval_ms=10_000)
            client.deregister("flip")
        def settled():
            with lock:
                return views and views[-1]["version"] >= 2 * flips
        assert wait_until(settled, timeout_s=5)
        watcher.stop()
        with lock:
            assert len(views) <= 2 * flips  # coalesced, never one event per change
            assert views[-1]["instances"] == []  # correct final view

    def test_watch_blocks_until_change(self, registry, probe_target):
        _, client = registry
        version = client.view("ENGINE")["version"]
        result = {}

        def poll():
            result["view"] = client.watch("ENGINE", since=version, timeout_ms=5000)

        t = threading.Thread(target=poll)
        t.start()
        time.sleep(0.2)
        _register(client, probe_target)
        t.join(timeout=5)
        assert not t.is_alive()
        assert [r["instance_id"] for r in result["view"]["instances"]] == ["i1"]


class TestKvAnnex:
    def test_put_get_list(self, registry):
        _, client = registry
        client.kv_put("scaler/WEBAPP/w1/7", {"mean_rt_ms": 12.5})
        client.kv_put("scaler/WEBAPP/w2/7", {"mean_rt_ms": 20.0})
        client.kv_put("scaler/ENGINE/e1/7", {"mean_rt_ms": 99.0})
        assert client.kv_get("scaler/WEBAPP/w1/7")["mean_rt_ms"] == 12.5
        entries = client.kv_list("scaler/WEBAPP/")
        assert sorted(entries) == ["scaler/WEBAPP/w1/7", "scaler/WEBAPP/w2/7"]
        assert client.kv_get("scaler/none", default="absent") == "absent"


class TestJournal:
    def test_restart_recovers_membership(self, tmp_path, probe_target):
        journal = str(tmp_path / "registry.jsonl")
        server = RegistryServer(journal_path=journal)
        server.start()
        client = RegistryClient(server.host, server.port)
        client.register("keep", "ENGINE", probe_target.host, probe_target.port, interval_ms=60_000)
        client.register("drop", "ENGINE", probe_target.host, probe_target.port, interval_ms=60_000)
        client.deregister("drop")
        server.stop()

        reborn = RegistryServer(journal_path=journal)
        reborn.start()
        client2 = RegistryClient(reborn.host, reborn.port)
        ids = [r["instance_id"] for r in client2.view("ENGINE")["instances"]]
        assert ids == ["keep"]
        reborn.stop()


class TestStatusPage:
    def test_status_page_lists_nodes(self, registry, probe_target):
        server, client = registry
        _register(client, probe_target, iid="engine-7")
        from tutorkernel.common.httpkit import http_request

        status, headers, body = http_request("GET", server.host, server.port, "/status")
        assert status == 200
        assert "text/html" in headers["content-type"]
        assert b"engine-7" in body and b"PASSING" in body
