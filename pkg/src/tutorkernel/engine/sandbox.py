"""Quota-limited child-process sandbox.

Each job runs in a scratch working directory as a new process group with OS
resource limits: a wall-clock watchdog plus RLIMIT_CPU for time, RLIMIT_AS for
memory, and RLIMIT_FSIZE for output (stdout/stderr go to files, so a flooding
program is killed by the kernel at the cap). The network is detached via an
unshared namespace when the host allows it. Nothing a quota-violating program
does can leak into another job: every job gets a fresh directory and group.
"""
from __future__ import annotations

import os
import resource
import shutil
import signal
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from typing import Optional

_UNSHARE: Optional[list[str]] = None


def _unshare_prefix() -> list[str]:
    """['unshare', '-rn'] when the kernel allows unprivileged net namespaces."""
    global _UNSHARE
    if _UNSHARE is None:
        try:
            probe = subprocess.run(
                ["unshare", "-rn", "true"], capture_output=True, timeout=5
            )
            _UNSHARE = ["unshare", "-rn"] if probe.returncode == 0 else []
        except (OSError, subprocess.TimeoutExpired):
            _UNSHARE = []
    return _UNSHARE


@dataclass
class SandboxResult:
    exit_code: int  # negative means killed by that signal
    timed_out: bool
    output_limited: bool
    memory_limited: bool
    stdout: bytes
    stderr: bytes
    wall_ms: float


_MEMORY_MARKERS = (b"MemoryError", b"std::bad_alloc", b"Out of memory", b"Cannot allocate memory")


def run_sandboxed(
    argv: list[str],
    *,
    stdin: bytes = b"",
    time_quota_ms: int,
    memory_quota_bytes: int,
    output_cap_bytes: int,
    cwd: Optional[str] = None,
    isolate_network: bool = True,
    extra_file_budget: int = 0,
) -> SandboxResult:
    scratch = cwd or tempfile.mkdtemp(prefix="job-")
    owns_scratch = cwd is None
    stdout_path = os.path.join(scratch, ".stdout")
    stderr_path = os.path.join(scratch, ".stderr")
    stdin_path = os.path.join(scratch, ".stdin")
    with open(stdin_path, "wb") as fh:
        fh.write(stdin)

    # one byte past the cap: an overrun is then visible in the file size even
    # for runtimes that turn SIGXFSZ into a caught EFBIG instead of dying
    file_budget = output_cap_bytes + 1 + extra_file_budget

    def limits():
        os.setsid()
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))
        cpu_s = max(1, (time_quota_ms + 999) // 1000 + 1)
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_s, cpu_s + 1))
        resource.setrlimit(resource.RLIMIT_AS, (memory_quota_bytes, memory_quota_bytes))
        resource.setrlimit(resource.RLIMIT_FSIZE, (file_budget, file_budget))

    command = (_unshare_prefix() if isolate_network else []) + list(argv)
    started = time.monotonic()
    watchdog_fired = threading.Event()
    try:
        with open(stdin_path, "rb") as fh_in, open(stdout_path, "wb") as fh_out, open(
            stderr_path, "wb"
        ) as fh_err:
            proc = subprocess.Popen(
                command,
                stdin=fh_in,
                stdout=fh_out,
                stderr=fh_err,
                cwd=scratch,
                preexec_fn=limits,
                env={"PATH": os.environ.get("PATH", "/usr/bin:/bin"), "HOME": scratch,
                     "LANG": "C.UTF-8", "LC_ALL": "C.UTF-8"},
            )

            def on_timeout():
                watchdog_fired.set()
                _kill_group(proc)

            killer = threading.Timer(time_quota_ms / 1000.0, on_timeout)
            killer.daemon = True
            killer.start()
            try:
                exit_code = proc.wait()
            finally:
                killer.cancel()
                _kill_group(proc)
        wall_ms = (time.monotonic() - started) * 1000.0
        timed_out = watchdog_fired.is_set()

        stdout = _read_capped(stdout_path, output_cap_bytes)
        stderr = _read_capped(stderr_path, output_cap_bytes)
        output_limited = (
            exit_code == -signal.SIGXFSZ
            or os.path.getsize(stdout_path) > output_cap_bytes
            or os.path.getsize(stderr_path) > output_cap_bytes
        )
        memory_limited = exit_code != 0 and any(m in stderr for m in _MEMORY_MARKERS)
        # CPU backstop fired before the wall watchdog: still a time-limit kill
        if exit_code == -signal.SIGXCPU:
            timed_out = True
        return SandboxResult(
            exit_code=exit_code,
            timed_out=timed_out,
            output_limited=output_limited and not timed_out,
            memory_limited=memory_limited and not timed_out,
            stdout=stdout,
            stderr=stderr,
            wall_ms=wall_ms,
        )
    finally:
        if owns_scratch:
            shutil.rmtree(scratch, ignore_errors=True)


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass


def _read_capped(path: str, cap: int) -> bytes:
    with open(path, "rb") as fh:
        return fh.read(cap)
