from __future__ import annotations

import sys

import pytest

from tutorkernel.engine.sandbox import run_sandboxed

PY = sys.executable
QUOTAS = dict(time_quota_ms=2000, memory_quota_bytes=256 << 20, output_cap_bytes=64 << 10)


def _run(code: str, stdin: bytes = b"", **overrides):
    kwargs = dict(QUOTAS)
    kwargs.update(overrides)
    return run_sandboxed([PY, "-c", code], stdin=stdin, **kwargs)


class TestBasics:
    def test_echo_stdin_byte_exact(self):
        result = _run("import sys; sys.stdout.write(sys.stdin.read())", stdin=b"42\n")
        assert result.exit_code == 0
        assert result.stdout == b"42\n"

    def test_stderr_captured(self):
        result = _run("import sys; sys.stderr.write('oops'); sys.exit(3)")
        assert result.exit_code == 3
        assert result.stderr == b"oops"

    def test_scratch_cwd_is_writable_and_private(self):
        result = _run("open('f.txt','w').write('x'); print(open('f.txt').read())")
        assert result.stdout == b"x\n"


class TestTimeQuota:
    def test_busy_loop_killed_at_quota_with_bounded_slack(self):
        result = _run("while True: pass", time_quota_ms=1000)
        assert result.timed_out
        assert 1000 <= result.wall_ms < 1500, result.wall_ms  # slack under 500ms

    def test_sleep_loop_also_killed(self):
        # wall-clock watchdog catches sleepers that burn no CPU
        result = _run("import time\nwhile True: time.sleep(0.1)", time_quota_ms=500)
        assert result.timed_out
        assert result.wall_ms < 1200


class TestMemoryQuota:
    def test_gigabyte_allocation_under_small_quota(self):
        result = _run("b = bytearray(1 << 30); print(len(b))", memory_quota_bytes=64 << 20)
        assert result.memory_limited
        assert result.exit_code != 0

    def test_allocation_within_quota_succeeds(self):
        result = _run("b = bytearray(8 << 20); print(len(b))", memory_quota_bytes=256 << 20)
        assert result.exit_code == 0
        assert result.stdout.strip() == str(8 << 20).encode()


class TestOutputCap:
    def test_output_flood_limited(self):
        result = _run(
            "import sys\n"
            "while True: sys.stdout.write('x' * 65536)",
            output_cap_bytes=64 << 10,
            time_quota_ms=5000,
        )
        assert result.output_limited
        assert len(result.stdout) <= 64 << 10

    def test_output_within_cap_untouched(self):
        result = _run("print('y' * 100)", output_cap_bytes=64 << 10)
        assert not result.output_limited
        assert result.stdout == b"y" * 100 + b"\n"


class TestIsolation:
    def test_fresh_scratch_per_run(self):
        first = _run("open('marker','w').write('1'); print('ok')")
        second = _run("import os; print(os.path.exists('marker'))")
        assert first.stdout == b"ok\n"
        assert second.stdout == b"False\n"

    def test_environment_is_scrubbed(self):
        result = _run("import os; print(sorted(k for k in os.environ if k not in "
                      "('PATH','HOME','LANG','LC_ALL','LC_CTYPE','PWD')))")
        assert result.stdout.strip() == b"[]"

    def test_network_detached_when_supported(self):
        from tutorkernel.engine.sandbox import _unshare_prefix

        if not _unshare_prefix():
            pytest.skip("no unprivileged network namespaces on this host")
        result = _run(
            "import socket\n"
            "s = socket.socket()\n"
            "s.settimeout(2)\n"
            "try:\n"
            "    s.connect(('127.0.0.1', 80))\n"
            "    print('connected')\n"
            "except OSError as e:\n"
            "    print('blocked')\n",
            time_quota_ms=5000,
        )
        assert result.stdout.strip() == b"blocked"
