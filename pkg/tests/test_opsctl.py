from __future__ import annotations

import json
import os
import socket
import time

import pytest

from tutorkernel.ops.cli import main as opsctl
from tutorkernel.ops.config import PlanError, load_plan
from tutorkernel.registry.client import RegistryClient

from conftest import wait_until


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _write_config(path, **overrides) -> str:
    values = {
        "NUM_WEBAPP": 1, "NUM_ENGINE": 1, "NUM_STORE": 1, "NUM_CACHE": 1,
        "APPORT": _free_port(), "REGISTRY_PORT": _free_port(),
        "COURSE_ID": "t101", "DATA_DIR": str(path / "data"),
    }
    values.update(overrides)
    lines = "\n".join(f"{k} = {v}" for k, v in values.items())
    config = path / "config.ini"
    config.write_text(f"[cluster]\n{lines}\n")
    return str(config)


class TestPlan:
    def test_parses_operator_keys(self, tmp_path):
        path = _write_config(tmp_path, NUM_WEBAPP=3, NUM_ENGINE=2)
        plan = load_plan(path)
        assert plan.num_webapp == 3 and plan.num_engine == 2
        assert plan.course_id == "t101"

    def test_counts_below_one_rejected(self, tmp_path):
        path = _write_config(tmp_path, NUM_STORE=0)
        with pytest.raises(PlanError):
            load_plan(path)

    def test_port_collision_rejected(self, tmp_path):
        path = _write_config(tmp_path, APPORT=9999, REGISTRY_PORT=9999)
        with pytest.raises(PlanError):
            load_plan(path)

    def test_non_numeric_count_rejected(self, tmp_path):
        path = _write_config(tmp_path, NUM_ENGINE="many")
        with pytest.raises(PlanError):
            load_plan(path)

    def test_missing_file_rejected(self):
        with pytest.raises(PlanError):
            load_plan("/nonexistent/config.ini")


@pytest.mark.slow
class TestDeployment:
    """Real subprocess deployment driven through the CLI."""

    @pytest.fixture
    def deployment(self, tmp_path):
        config = _write_config(tmp_path)
        os.environ["TK_CHECK_INTERVAL_MS"] = "300"
        yield config, load_plan(config)
        os.environ.pop("TK_CHECK_INTERVAL_MS", None)
        opsctl(["-c", config, "clean", "--purge-data"])

    def test_deploy_status_seed_integrate_clean(self, deployment, tmp_path, capsys):
        config, plan = deployment
        assert opsctl(["-c", config, "deploy"]) == 0

        registry = RegistryClient("127.0.0.1", plan.registry_port)
        for kind, expect in (("STORE", 1), ("STORE_PROXY", 1), ("CACHE", 1),
                             ("WEBAPP", 1), ("ENGINE", 1), ("GATEWAY", 1)):
            assert len(registry.passing_instances(kind)) == expect, kind

        # refuse a second deploy over the live system
        assert opsctl(["-c", config, "deploy"]) == 1
        capsys.readouterr()

        assert opsctl(["-c", config, "seed"]) == 0
        assert opsctl(["-c", config, "status"]) == 0
        out = capsys.readouterr().out
        assert "WEBAPP" in out and "PASSING" in out

        # end-to-end through the real gateway: login with a seeded account
        from tutorkernel.common.httpkit import http_json

        status, body = http_json("POST", "127.0.0.1", plan.apport, "/api/login",
                                 {"login": "s001", "credential": "s001"})
        assert status == 200 and body["role"] == "STUDENT"

        # integrate a feedback tool manifest through the CLI
        manifest = tmp_path / "tool.json"
        manifest.write_text(json.dumps({
            "name": "rephraser",
            "services": [{"trigger": "ON_COMPILE", "containers": ["rephraser-1"],
                          "port": 8099, "endpoint": "/rephrase"}],
        }))
        assert opsctl(["-c", config, "integrate-feedback-tool", str(manifest)]) == 0
        assert opsctl(["-c", config, "integrate-feedback-tool", str(manifest)]) == 0  # idempotent

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"name": "x", "services": [{"trigger": "ON_SAVE",
                                  "containers": ["c"], "port": 1, "endpoint": "/"}]}))
        assert opsctl(["-c", config, "integrate-feedback-tool", str(bad)]) == 1
        err = capsys.readouterr().err
        assert "trigger" in err  # names the offending field

        assert opsctl(["-c", config, "clean"]) == 0
        assert wait_until(lambda: not _alive_pids(plan), timeout_s=10)
        # clean is idempotent from any state
        assert opsctl(["-c", config, "clean"]) == 0

    def test_upscale_downscale(self, deployment):
        config, plan = deployment
        assert opsctl(["-c", config, "deploy"]) == 0
        registry = RegistryClient("127.0.0.1", plan.registry_port)
        assert opsctl(["-c", config, "upscale", "webapp"]) == 0
        assert wait_until(lambda: len(registry.passing_instances("WEBAPP")) == 2, 20)
        assert opsctl(["-c", config, "downscale", "webapp"]) == 0
        assert wait_until(lambda: len(registry.passing_instances("WEBAPP")) == 1, 20)
        # refuse to go below one
        assert opsctl(["-c", config, "downscale", "webapp"]) == 1

    def test_rolling_restart_under_load_zero_503(self, tmp_path):
        import threading
        import time as _time

        from tutorkernel.common.httpkit import http_json

        config = _write_config(tmp_path, NUM_WEBAPP=2)
        os.environ["TK_CHECK_INTERVAL_MS"] = "300"
        plan = load_plan(config)
        try:
            assert opsctl(["-c", config, "deploy"]) == 0
            assert opsctl(["-c", config, "seed"]) == 0
            status, body = http_json("POST", "127.0.0.1", plan.apport, "/api/login",
                                     {"login": "s001", "credential": "s001"})
            assert status == 200
            token = body["token"]

            outcomes: list[int] = []
            stop = threading.Event()
            lock = threading.Lock()

            def hammer():
                while not stop.is_set():
                    try:
                        st, _ = http_json("GET", "127.0.0.1", plan.apport, "/api/home",
                                          headers={"X-Session-Token": token}, timeout=10)
                    except Exception:
                        st = 599
                    with lock:
                        outcomes.append(st)

            threads = [threading.Thread(target=hammer) for _ in range(4)]
            for t in threads:
                t.start()
            _time.sleep(0.5)
            assert opsctl(["-c", config, "restart", "webapp"]) == 0
            _time.sleep(0.5)
            stop.set()
            for t in threads:
                t.join(timeout=15)
            # the pool never emptied: every request during the restart succeeded
            bad = [s for s in outcomes if s != 200]
            assert not bad, f"{len(bad)} failed requests during rolling restart: {bad[:5]}"
            registry = RegistryClient("127.0.0.1", plan.registry_port)
            assert len(registry.passing_instances("WEBAPP")) == 2
        finally:
            os.environ.pop("TK_CHECK_INTERVAL_MS", None)
            opsctl(["-c", config, "clean", "--purge-data"])

    def test_port_conflict_aborts_before_starting(self, tmp_path, capsys):
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        config = _write_config(tmp_path, APPORT=port)
        plan = load_plan(config)
        assert opsctl(["-c", config, "deploy"]) == 1
        assert "port conflict" in capsys.readouterr().err
        assert not _alive_pids(plan)  # nothing was started
        blocker.close()


def _alive_pids(plan) -> bool:
    run_dir = os.path.join(plan.data_dir, "run")
    if not os.path.isdir(run_dir):
        return False
    for name in os.listdir(run_dir):
        if name.endswith(".json"):
            with open(os.path.join(run_dir, name)) as fh:
                meta = json.load(fh)
            try:
                os.kill(meta["pid"], 0)
                return True
            except ProcessLookupError:
                continue
    return False
