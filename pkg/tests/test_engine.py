from __future__ import annotations

import re
import subprocess
import sys
import threading
import time

import pytest
from hypothesis import given, settings, strategies as st

from tutorkernel.cache.sessions import SessionStore
from tutorkernel.common.httpkit import http_json
from tutorkernel.engine.admission import AdmissionGate, Busy
from tutorkernel.engine.config import EngineConfig
from tutorkernel.engine.corpus import CORPUS, seed_corpus
from tutorkernel.engine.diagnostics import parse_diagnostics, roundtrip
from tutorkernel.engine.judge import judge_output, normalize_output
from tutorkernel.engine.service import EngineService

PY = sys.executable


# -- judge normalization -----------------------------------------------------------


def oracle_normalize(data: bytes) -> bytes:
    """Independent re-statement of the comparison rule, regex-based."""
    text = re.sub(rb"[ \t\r]+\n", b"\n", data)
    text = re.sub(rb"[ \t\r]+$", b"", text)
    return re.sub(rb"\n+$", b"", text).rstrip(b"\n")


NORMALIZATION_PAIRS = [
    (b"a \nb\n", b"a\nb", True),
    (b"a\nb\n\n\n", b"a\nb", True),
    (b"a\t \nb", b"a\nb\n", True),
    (b"", b"\n", True),
    (b"a\nb", b"a b", False),
    (b" a\nb", b"a\nb", False),  # leading whitespace counts
    (b"a\n\nb", b"a\nb", False),  # interior blank lines count
    (b"A", b"a", False),
]


class TestNormalization:
    @pytest.mark.parametrize("left,right,expected", NORMALIZATION_PAIRS)
    def test_crafted_pairs_match_oracle(self, left, right, expected):
        assert judge_output(left, right) is expected
        assert (oracle_normalize(left) == oracle_normalize(right)) is expected

    @given(st.binary(max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_agrees_with_oracle_on_random_bytes(self, data):
        assert normalize_output(data) == oracle_normalize(data)

    def test_trailing_whitespace_only_difference_passes(self):
        assert judge_output(b"5   \n", b"5\n")


# -- diagnostics --------------------------------------------------------------------


def _compiler_stderr(code: str, tmp_dir: str = "/tmp") -> str:
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".py", dir=tmp_dir, delete=False) as fh:
        fh.write(code)
        path = fh.name
    proc = subprocess.run([PY, "-m", "py_compile", path], capture_output=True)
    return proc.stderr.decode()


class TestDiagnostics:
    def test_missing_colon_has_line_number(self):
        raw = _compiler_stderr("def f()\n    return 1\n")
        diags = parse_diagnostics(raw, "python")
        assert len(diags) >= 1
        assert diags[0].line == 1
        assert "Error" in diags[0].text

    def test_round_trip_is_lossless(self):
        samples = [
            "def f(:\n    pass\n",
            "x = (1\n",
            "if True\n    pass\n",
            "print 'old'\n",
        ]
        for code in samples:
            raw = _compiler_stderr(code)
            diags = parse_diagnostics(raw, "python")
            assert roundtrip(diags) == raw, f"round-trip broke for {code!r}"

    def test_gcc_style_line(self):
        raw = "main.c:3:5: error: expected ';' before 'return'\n    3 |     x = 1\n"
        diags = parse_diagnostics(raw, "gcc")
        assert diags[0].file == "main.c"
        assert diags[0].line == 3 and diags[0].col == 5
        assert diags[0].severity == "error"
        assert "expected ';'" in diags[0].text
        assert roundtrip(diags) == raw

    def test_empty_input(self):
        assert parse_diagnostics("", "python") == []


# -- admission gate ------------------------------------------------------------------


class TestAdmission:
    def test_bound_respected_and_watermark(self):
        gate = AdmissionGate(2)
        running = []
        done = threading.Event()

        def job(i):
            gate.acquire(10)
            running.append(i)
            time.sleep(0.2)
            gate.release()
            if len(running) == 5:
                done.set()

        threads = [threading.Thread(target=job, args=(i,)) for i in range(5)]
        started = time.monotonic()
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        makespan = time.monotonic() - started
        assert gate.max_running == 2  # never 3 running at once
        assert 0.55 <= makespan < 1.5  # ceil(5/2) waves of 0.2s

    def test_limit_one_serializes_fifo(self):
        gate = AdmissionGate(1)
        order = []
        lock = threading.Lock()
        barrier = threading.Barrier(4)

        def job(i):
            if i > 0:
                barrier.wait()  # jobs 1..3 queue while 0 is running
                time.sleep(0.02 * i)  # stagger arrivals in index order
            gate.acquire(10)
            with lock:
                order.append(i)
            time.sleep(0.05)
            gate.release()

        gate.acquire(10)  # hold the slot while the queue forms
        threads = [threading.Thread(target=job, args=(i,)) for i in range(1, 4)]
        warmup = threading.Thread(target=barrier.wait)
        warmup.start()
        for t in threads:
            t.start()
        time.sleep(0.3)
        gate.release()
        for t in threads:
            t.join()
        warmup.join()
        assert order == [1, 2, 3]

    def test_queue_timeout_is_busy(self):
        gate = AdmissionGate(1)
        gate.acquire(10)
        with pytest.raises(Busy):
            gate.acquire(0.1)
        gate.release()


# -- engine service over HTTP ----------------------------------------------------------


@pytest.fixture
def engine(store_trio, cache_pair):
    _, _, store = store_trio
    _, cache = cache_pair
    seed_corpus(store)
    config = EngineConfig(max_concurrent=4, time_quota_ms=1500, request_timeout_ms=20000)
    svc = EngineService("eng-test", store, cache, registry=None, config=config, config_poll_s=30)
    svc.start()
    sessions = SessionStore(cache)
    token = sessions.create("u-s001", "STUDENT")
    yield svc, token, store
    svc.stop()


def _call(svc, token, action, body):
    return http_json("POST", svc.host, svc.port, f"/engine/{action}", body,
                     headers={"X-Session-Token": token}, timeout=60)


class TestCompile:
    def test_hello_world_ok_no_diagnostics(self, engine):
        svc, token, _ = engine
        status, res = _call(svc, token, "compile", {"code": "print('hello')\n"})
        assert status == 200 and res["status"] == "OK"
        assert res["diagnostics"] == []

    def test_syntax_error_carries_line_number(self, engine):
        svc, token, _ = engine
        status, res = _call(svc, token, "compile", {"code": "def f(:\n    pass\n"})
        assert res["status"] == "COMPILE_ERROR"
        assert res["diagnostics"] and res["diagnostics"][0]["line"] == 1

    def test_course_context_logs_exactly_one_row(self, engine):
        svc, token, store = engine
        before = len(store.scan("logs"))
        _call(svc, token, "compile", {
            "code": "print(1)\n",
            "context": {"kind": "course", "event_id": "ev1", "problem_id": "p-echo"},
        })
        assert len(store.scan("logs")) == before + 1

    def test_scratchpad_context_never_logs(self, engine):
        svc, token, store = engine
        before = len(store.scan("logs"))
        _call(svc, token, "compile", {"code": "print(1)\n", "context": {"kind": "scratchpad"}})
        _call(svc, token, "execute", {"code": "print(1)\n", "context": {"kind": "scratchpad"}})
        assert len(store.scan("logs")) == before

    def test_unauthenticated_rejected(self, engine):
        svc, _, _ = engine
        status, _ = http_json("POST", svc.host, svc.port, "/engine/compile", {"code": "x"})
        assert status == 401


class TestExecute:
    def test_echo_stdin(self, engine):
        svc, token, _ = engine
        status, res = _call(svc, token, "execute",
                            {"code": "print(input())\n", "stdin": "42\n"})
        assert res["status"] == "OK" and res["stdout"] == "42\n"

    def test_infinite_loop_is_time_limit(self, engine):
        svc, token, _ = engine
        status, res = _call(svc, token, "execute", {"code": "while True: pass\n"})
        assert res["status"] == "TIME_LIMIT"

    def test_execute_of_broken_code_compiles_first(self, engine):
        # protocol order: a run without a compile artifact must compile, never raw-run
        svc, token, _ = engine
        status, res = _call(svc, token, "execute", {"code": "def f(:\n"})
        assert res["status"] == "COMPILE_ERROR"
        assert res["diagnostics"]


class TestEvaluate:
    def test_model_solutions_pass_their_own_tests(self, engine):
        svc, token, _ = engine
        for cp in CORPUS[:4]:
            status, res = _call(svc, token, "evaluate", {
                "code": cp.solution,
                "context": {"kind": "course", "event_id": "ev1", "problem_id": cp.problem_id},
            })
            verdicts = [t["verdict"] for t in res["per_test"]]
            assert verdicts == ["PASS"] * len(cp.tests), (cp.problem_id, res)

    def test_wrong_variant_matches_independent_runner(self, engine):
        """Oracle: run the buggy program directly with subprocess and compare
        raw outputs byte-wise; PASS count must match the engine verdicts."""
        svc, token, _ = engine
        cp = next(c for c in CORPUS if c.problem_id == "p-sum")
        buggy = cp.variants["wrong"]
        expected_verdicts = []
        for stdin, expected in cp.tests:
            proc = subprocess.run([PY, "-c", buggy], input=stdin.encode(),
                                  capture_output=True, timeout=10)
            ok = proc.returncode == 0 and oracle_normalize(proc.stdout) == oracle_normalize(expected.encode())
            expected_verdicts.append("PASS" if ok else ("FAIL" if proc.returncode == 0 else "RTE"))
        status, res = _call(svc, token, "evaluate", {
            "code": buggy,
            "context": {"kind": "course", "event_id": "ev1", "problem_id": cp.problem_id},
        })
        assert [t["verdict"] for t in res["per_test"]] == expected_verdicts

    def test_errors_never_abort_remaining_tests(self, engine):
        svc, token, _ = engine
        cp = next(c for c in CORPUS if c.problem_id == "p-sum")
        status, res = _call(svc, token, "evaluate", {
            "code": cp.variants["crash"],
            "context": {"kind": "course", "event_id": "ev1", "problem_id": cp.problem_id},
        })
        assert len(res["per_test"]) == len(cp.tests)  # one verdict per test, always

    def test_hidden_tests_report_verdict_without_expected_output(self, engine):
        svc, token, _ = engine
        status, res = _call(svc, token, "evaluate", {
            "code": "print(input())\n",
            "context": {"kind": "course", "event_id": "ev1", "problem_id": "p-echo"},
        })
        visible = [t for t in res["per_test"] if t["visible"]]
        hidden = [t for t in res["per_test"] if not t["visible"]]
        assert visible and hidden
        assert all("expected_output" in t for t in visible)
        assert all("expected_output" not in t for t in hidden)

    def test_compile_error_evaluation_reports_and_logs(self, engine):
        svc, token, store = engine
        status, res = _call(svc, token, "evaluate", {
            "code": "def f(:\n",
            "context": {"kind": "course", "event_id": "ev1", "problem_id": "p-echo"},
        })
        assert res["status"] == "COMPILE_ERROR"
        assert res["per_test"] == []


class TestTooling:
    def test_unknown_tool_is_internal_error(self, engine):
        svc, token, _ = engine
        status, res = _call(svc, token, "tool", {"tool": "nonesuch"})
        assert res["status"] == "INTERNAL"
        assert "not registered" in res["stderr"]


class TestDelays:
    def test_per_action_delay_throttles_hammering(self, store_trio, cache_pair):
        _, _, store = store_trio
        _, cache = cache_pair
        config = EngineConfig(max_concurrent=2, request_timeout_ms=10000)
        config.per_action_delay_ms["compile"] = 500
        svc = EngineService("eng-delay", store, cache, config=config, config_poll_s=30)
        svc.start()
        token = SessionStore(cache).create("u1", "STUDENT")
        first, _ = _call(svc, token, "compile", {"code": "print(1)\n"})
        second, body = _call(svc, token, "compile", {"code": "print(2)\n"})
        assert first == 200
        assert second == 429  # too soon for the same user and action
        other = SessionStore(cache).create("u2", "STUDENT")
        third, _ = _call(svc, other, "compile", {"code": "print(3)\n"})
        assert third == 200  # the spacing is per user
        time.sleep(0.6)
        fourth, _ = _call(svc, token, "compile", {"code": "print(4)\n"})
        assert fourth == 200
        svc.stop()


class TestBusy:
    def test_saturation_past_timeout_returns_busy(self, store_trio, cache_pair):
        _, _, store = store_trio
        _, cache = cache_pair
        config = EngineConfig(max_concurrent=1, time_quota_ms=3000, request_timeout_ms=3500)
        svc = EngineService("eng-busy", store, cache, config=config, config_poll_s=30)
        svc.start()
        token = SessionStore(cache).create("u1", "STUDENT")
        slow = "import time; time.sleep(2.5)\n"
        results = []

        def call():
            results.append(_call(svc, token, "execute", {"code": slow}))

        threads = [threading.Thread(target=call) for _ in range(3)]
        for t in threads:
            t.start()
            time.sleep(0.05)
        for t in threads:
            t.join()
        statuses = sorted(r[1].get("status", "") for r in results)
        assert "BUSY" in statuses  # the tail job bounced instead of running late
        assert any(s == "OK" for s in statuses)
        svc.stop()


class TestHostileSoak:
    def test_hostile_programs_never_change_benign_results(self, store_trio, cache_pair):
        """100 hostile + 100 benign interleaved; benign outputs byte-identical
        to solo runs and the engine stays live throughout."""
        _, _, store = store_trio
        _, cache = cache_pair
        config = EngineConfig(max_concurrent=8, time_quota_ms=300,
                              output_cap_bytes=16 << 10, request_timeout_ms=60000)
        svc = EngineService("eng-soak", store, cache, config=config, config_poll_s=30)
        svc.start()
        token = SessionStore(cache).create("u1", "STUDENT")

        hostile = [
            "while True: pass\n",
            "b = bytearray(1 << 30)\n",
            "import sys\nwhile True: sys.stdout.write('x' * 65536)\n",
            "import sys; sys.exit(9)\n",
        ]
        benign = [f"print({i} * 7)\n" for i in range(100)]
        solo = {}
        for code in benign[:10]:  # solo baseline for a sample
            _, res = _call(svc, token, "execute", {"code": code})
            solo[code] = res["stdout"]

        results = {}
        lock = threading.Lock()

        def run(code):
            _, res = _call(svc, token, "execute", {"code": code})
            with lock:
                results[code] = res

        threads = []
        for i in range(100):
            threads.append(threading.Thread(target=run, args=(hostile[i % len(hostile)] + f"# {i}\n",)))
            threads.append(threading.Thread(target=run, args=(benign[i],)))
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        for code, expected_stdout in solo.items():
            assert results[code]["stdout"] == expected_stdout
            assert results[code]["status"] == "OK"
        # engine still answers after the soak
        status, _ = _call(svc, token, "execute", {"code": "print('alive')\n"})
        assert status == 200
        svc.stop()
