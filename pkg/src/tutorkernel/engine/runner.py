"""Compile and run mechanics on top of the sandbox.

Compiled artifacts are cached by (language, code) digest, so an execute or
evaluate after a compile reuses the artifact, and execute/evaluate without a
prior compile transparently compiles first; a raw run never happens.
"""
from __future__ import annotations

import hashlib
import os
import shutil
import tempfile
import threading
from dataclasses import dataclass
from typing import Optional

from .config import EngineConfig, LanguageSpec
from .diagnostics import Diagnostic, parse_diagnostics
from .jobs import JobStatus
from .sandbox import SandboxResult, run_sandboxed

_COMPILE_FILE_BUDGET = 32 << 20  # compilers write artifacts; program output caps don't apply
_ARTIFACT_CACHE_MAX = 4096
_ARTIFACT_IDLE_S = 600.0  # never prune an artifact touched more recently than this


@dataclass
class CompileOutcome:
    status: JobStatus
    diagnostics: list[Diagnostic]
    stderr: str
    artifact_dir: Optional[str]
    wall_ms: float
    cached: bool = False


class JobRunner:
    def __init__(self, scratch_root: Optional[str] = None):
        self.scratch_root = scratch_root or tempfile.mkdtemp(prefix="engine-")
        self.artifacts_root = os.path.join(self.scratch_root, "artifacts")
        os.makedirs(self.artifacts_root, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _digest_lock(self, digest: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(digest, threading.Lock())

    def compile(self, code: str, lang: LanguageSpec, config: EngineConfig) -> CompileOutcome:
        digest = hashlib.sha256(f"{lang.label}\x1f{code}".encode("utf-8")).hexdigest()
        artifact_dir = os.path.join(self.artifacts_root, digest)
        with self._digest_lock(digest):
            if os.path.exists(os.path.join(artifact_dir, ".ok")):
                os.utime(artifact_dir)  # keep hot artifacts out of the pruner's reach
                return CompileOutcome(JobStatus.OK, [], "", artifact_dir, 0.0, cached=True)
            shutil.rmtree(artifact_dir, ignore_errors=True)
            os.makedirs(artifact_dir)
            src = os.path.join(artifact_dir, lang.source_file)
            out = os.path.join(artifact_dir, "program")
            with open(src, "w", encoding="utf-8") as fh:
                fh.write(code)
            argv = _fill(lang.compile_argv, src=src, out=out, flags=lang.flags)
            try:
                # compilers parse untrusted code but never execute it, so the
                # network namespace (and its churn cost) is reserved for runs
                result = run_sandboxed(
                    argv,
                    time_quota_ms=config.time_quota_ms,
                    memory_quota_bytes=max(config.memory_quota_bytes, 512 << 20),
                    output_cap_bytes=256 << 10,
                    cwd=artifact_dir,
                    isolate_network=False,
                    extra_file_budget=_COMPILE_FILE_BUDGET,
                )
            except FileNotFoundError as exc:
                return CompileOutcome(
                    JobStatus.INTERNAL,
                    [],
                    f"compiler unavailable: {exc}",
                    None,
                    0.0,
                )
            stderr = result.stderr.decode("utf-8", "replace")
            if result.timed_out:
                return CompileOutcome(JobStatus.TIME_LIMIT, [], stderr, None, result.wall_ms)
            if result.exit_code == 127:
                return CompileOutcome(JobStatus.INTERNAL, [], stderr or "compiler not found", None, result.wall_ms)
            if result.exit_code != 0:
                diags = parse_diagnostics(stderr, lang.diagnostic_style)
                return CompileOutcome(JobStatus.COMPILE_ERROR, diags, stderr, None, result.wall_ms)
            with open(os.path.join(artifact_dir, ".ok"), "w") as fh:
                fh.write(digest)
            self._prune_artifacts()
            return CompileOutcome(JobStatus.OK, [], stderr, artifact_dir, result.wall_ms)

    def run(
        self,
        artifact_dir: str,
        lang: LanguageSpec,
        stdin: bytes,
        config: EngineConfig,
    ) -> SandboxResult:
        """Run a compiled artifact on stdin, in a fresh scratch directory."""
        run_dir = tempfile.mkdtemp(prefix="run-", dir=self.scratch_root)
        try:
            for name in os.listdir(artifact_dir):
                if name.startswith("."):
                    continue
                src_path = os.path.join(artifact_dir, name)
                dst_path = os.path.join(run_dir, name)
                if os.path.isdir(src_path):
                    shutil.copytree(src_path, dst_path)
                else:
                    shutil.copy2(src_path, dst_path)
            src = os.path.join(run_dir, lang.source_file)
            out = os.path.join(run_dir, "program")
            argv = _fill(lang.run_argv, src=src, out=out, flags=lang.flags)
            return run_sandboxed(
                argv,
                stdin=stdin,
                time_quota_ms=config.time_quota_ms,
                memory_quota_bytes=config.memory_quota_bytes,
                output_cap_bytes=config.output_cap_bytes,
                cwd=run_dir,
            )
        finally:
            shutil.rmtree(run_dir, ignore_errors=True)

    def _prune_artifacts(self) -> None:
        entries = [os.path.join(self.artifacts_root, n) for n in os.listdir(self.artifacts_root)]
        if len(entries) <= _ARTIFACT_CACHE_MAX:
            return
        import time as _time

        now = _time.time()
        stale = []
        for path in entries:
            try:
                if now - os.path.getmtime(path) > _ARTIFACT_IDLE_S:
                    stale.append(path)
            except OSError:
                continue
        stale.sort(key=lambda p: os.path.getmtime(p))
        for path in stale[: len(entries) - _ARTIFACT_CACHE_MAX]:
            shutil.rmtree(path, ignore_errors=True)

    def cleanup(self) -> None:
        shutil.rmtree(self.scratch_root, ignore_errors=True)


def _fill(template: list[str], *, src: str, out: str, flags: list[str]) -> list[str]:
    argv: list[str] = []
    for part in template:
        if part == "{flags}":
            argv.extend(flags)
        else:
            argv.append(part.replace("{src}", src).replace("{out}", out))
    return argv
