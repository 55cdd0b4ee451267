from __future__ import annotations

import itertools
import threading
import time

import pytest

from tutorkernel.common.httpkit import HttpService, Response, http_json
from tutorkernel.gateway.routes import RouteRule, RouteTable, ENGINE, WEBAPP
from tutorkernel.gateway.server import Gateway


class TestRouting:
    def test_engine_prefix(self):
        assert RouteTable().route("/engine/compile") == ENGINE

    def test_default_is_webapp(self):
        assert RouteTable().route("/editor/event/42") == WEBAPP

    def test_longest_prefix_wins_over_rule_permutations(self):
        # oracle: recompute the winner by explicit longest-match, for every
        # ordering of the rule list
        rules = [RouteRule("/a", WEBAPP), RouteRule("/a/b", ENGINE), RouteRule("/a/b/c/d", WEBAPP)]
        paths = ["/a", "/a/x", "/a/b", "/a/b/c", "/a/b/c/d/e", "/zzz"]
        for perm in itertools.permutations(rules):
            table = RouteTable(perm)
            for path in paths:
                matches = [r for r in rules if (path + "/").startswith(r.path_prefix.rstrip("/") + "/")]
                expected = max(matches, key=lambda r: len(r.path_prefix)).target_kind if matches else WEBAPP
                assert table.route(path) == expected, (perm, path)

    def test_prefix_matches_segments_not_raw_text(self):
        table = RouteTable((RouteRule("/api", WEBAPP), RouteRule("/engine", ENGINE)))
        assert table.route("/engineering") == WEBAPP  # not the /engine rule


@pytest.fixture
def backend_pair():
    services = []
    for name in ("web-a", "web-b"):
        svc = HttpService()
        svc.add_route("GET", "/api/who", lambda req, name=name: Response.json({"who": name}))
        svc.add_route("POST", "/api/echo", lambda req: Response.json(req.json()))
        svc.add_route("GET", "/api/slow", lambda req: (time.sleep(0.4), Response.json({"ok": 1}))[1])
        svc.start()
        services.append((name, svc))
    yield services
    for _, svc in services:
        svc.stop()


def _view(services):
    return [
        {"instance_id": name, "health": "PASSING",
         "address": {"host": svc.host, "port": svc.port}}
        for name, svc in services
    ]


@pytest.fixture
def gateway(backend_pair):
    gw = Gateway(registry=None)
    gw.apply_view(WEBAPP, _view(backend_pair))
    gw.start()
    yield gw
    gw.stop()


class TestDispatch:
    def test_forwards_and_relays_body(self, gateway):
        status, body = http_json("POST", gateway.host, gateway.port, "/api/echo", {"x": 1})
        assert status == 200 and body == {"x": 1}

    def test_sequential_requests_follow_tie_break(self, gateway):
        # sequential requests always release before the next dispatch: counts
        # return to zero, the tie-break sends everything to the lowest id
        for _ in range(5):
            _, body = http_json("GET", gateway.host, gateway.port, "/api/who")
            assert body["who"] == "web-a"

    def test_concurrent_requests_alternate(self, gateway):
        seen = []
        lock = threading.Lock()

        def call():
            _, body = http_json("GET", gateway.host, gateway.port, "/api/slow", timeout=5)
            with lock:
                seen.append(body)

        threads = [threading.Thread(target=call) for _ in range(2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        # two in-flight requests must land on different backends
        assert len(gateway.dispatch_log) == 2
        assert {iid for _, iid in gateway.dispatch_log} == {"web-a", "web-b"}

    def test_empty_pool_returns_503_with_retry_after(self, gateway):
        from tutorkernel.common.httpkit import http_request

        status, headers, _ = http_request("GET", gateway.host, gateway.port, "/engine/compile")
        assert status == 503
        assert headers.get("retry-after") == "1"

    def test_backend_killed_mid_request_gives_502_then_survivor_serves(self, backend_pair):
        gw = Gateway(registry=None)
        gw.apply_view(WEBAPP, _view(backend_pair))
        gw.start()
        name, victim = backend_pair[0]
        results = {}

        def slow_call():
            results["slow"] = http_json("GET", gw.host, gw.port, "/api/slow", timeout=5)

        t = threading.Thread(target=slow_call)
        t.start()
        time.sleep(0.1)  # request is in flight on web-a (lowest id)
        victim.kill()
        t.join(timeout=5)
        assert results["slow"][0] == 502  # that caller failed, no retry
        status, body = http_json("GET", gw.host, gw.port, "/api/who")
        assert status == 200 and body["who"] == "web-b"  # next request reroutes
        gw.stop()


class TestApplyView:
    def test_new_instance_receives_next_dispatch(self, backend_pair, gateway):
        fresh = HttpService()
        fresh.add_route("GET", "/api/who", lambda req: Response.json({"who": "web-0new"}))
        fresh.start()
        # keep existing counts busy so the fresh zero-connection instance wins
        gateway.apply_view(WEBAPP, _view(backend_pair) + _view([("a-aaa", fresh)]))
        _, body = http_json("GET", gateway.host, gateway.port, "/api/who")
        assert body["who"] == "web-0new"  # 0 connections + lowest id among ties
        fresh.stop()

    def test_failing_instance_gets_no_new_dispatches(self, backend_pair, gateway):
        view = _view(backend_pair)
        view[0]["health"] = "FAILING"
        gateway.apply_view(WEBAPP, view)
        for _ in range(4):
            _, body = http_json("GET", gateway.host, gateway.port, "/api/who")
            assert body["who"] == "web-b"

    def test_identical_views_cause_no_churn(self, backend_pair, gateway):
        view = _view(backend_pair)
        before = gateway.pools[WEBAPP].snapshot()
        for _ in range(5):
            gateway.apply_view(WEBAPP, view)
        assert gateway.pools[WEBAPP].snapshot() == before

    def test_removed_instance_drains(self, backend_pair, gateway):
        results = {}

        def slow_call():
            results["r"] = http_json("GET", gateway.host, gateway.port, "/api/slow", timeout=5)

        t = threading.Thread(target=slow_call)
        t.start()
        time.sleep(0.1)  # in flight on web-a
        gateway.apply_view(WEBAPP, _view(backend_pair[1:]))  # web-a removed
        assert "web-a" in gateway.pools[WEBAPP].draining()
        _, body = http_json("GET", gateway.host, gateway.port, "/api/who")
        assert body["who"] == "web-b"  # no new dispatches to the draining one
        t.join(timeout=5)
        assert results["r"][0] == 200  # the in-flight request finished fine
        assert gateway.pools[WEBAPP].draining() == set()


class TestStaticBundle:
    def test_ui_prefix_serves_the_bundle_with_spa_fallback(self, backend_pair, tmp_path):
        (tmp_path / "index.html").write_text("<!doctype html><title>app</title>")
        (tmp_path / "app.js").write_text("console.log('ready')")
        gw = Gateway(registry=None, static_dir=str(tmp_path))
        gw.apply_view(WEBAPP, _view(backend_pair))
        gw.start()
        from tutorkernel.common.httpkit import http_request

        status, headers, body = http_request("GET", gw.host, gw.port, "/ui/app.js")
        assert status == 200 and b"ready" in body
        assert "javascript" in headers["content-type"]
        # SPA deep links fall back to index.html
        status, _, body = http_request("GET", gw.host, gw.port, "/ui/editor/ev1/p-sum")
        assert status == 200 and b"app" in body
        # path traversal stays inside the bundle
        status, _, _ = http_request("GET", gw.host, gw.port, "/ui/../../etc/passwd")
        assert status != 200 or b"root:" not in body
        # /api traffic still proxies
        status, _, body = http_request("GET", gw.host, gw.port, "/api/who")
        assert status == 200
        gw.stop()


class TestAccessLog:
    def test_combined_format_with_rt_field(self, backend_pair, tmp_path):
        log_path = str(tmp_path / "access.log")
        gw = Gateway(registry=None, access_log_path=log_path)
        gw.apply_view(WEBAPP, _view(backend_pair))
        gw.start()
        http_json("GET", gw.host, gw.port, "/api/who")
        gw.stop()
        line = open(log_path).read().strip()
        parts = line.split()
        assert '"GET' in line and "/api/who" in line
        assert int(parts[-1]) > 0  # trailing response-time microseconds field
