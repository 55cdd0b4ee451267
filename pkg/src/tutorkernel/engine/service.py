"""The compute service: compile, execute, evaluate and tool endpoints.

Every request is session-authenticated against the cache, admitted through
the bounded-concurrency gate, run in the sandbox, decorated with plugin
feedback, and logged to the store when it belongs to a course or practice
assignment and logging for that action is on. Configuration is re-read from
the store on a short poll, so control-panel edits apply without restarts.
"""
from __future__ import annotations

import threading
import time
from typing import Optional

from ..cache.client import CacheCluster
from ..cache.sessions import SessionStore
from ..common.httpkit import HttpService, HttpError, Request, Response
from ..common.util import new_id, now_ms
from ..model.records import TestCase
from ..model.roles import Role
from ..plugins.dispatch import PluginDispatcher
from ..plugins.manifest import PluginManifest, Trigger
from ..registry.client import RegistryClient
from ..store.client import StoreClient
from ..store.errors import StoreUnavailable
from .admission import AdmissionGate, Busy
from .config import CONFIG_TABLE, ENGINE_CONFIG_KEY, EngineConfig
from .jobs import EngineJob, JobAction, JobContext, JobResult, JobStatus, PerTest, Verdict
from .judge import judge_output
from .runner import JobRunner

MANIFESTS_TABLE = "plugin_manifests"
LOGS_TABLE = "logs"
_ACTION_KEY = {JobAction.COMPILE: "compile", JobAction.EXECUTE: "execute", JobAction.EVALUATE: "evaluate"}


class EngineService:
    def __init__(
        self,
        instance_id: str,
        store: StoreClient,
        cache: CacheCluster,
        registry: Optional[RegistryClient] = None,
        config: Optional[EngineConfig] = None,
        scratch_root: Optional[str] = None,
        host: str = "127.0.0.1",
        port: int = 0,
        config_poll_s: float = 5.0,
        plugin_timeout_s: float = 2.0,
    ):
        self.instance_id = instance_id
        self.store = store
        self.registry = registry
        self.sessions = SessionStore(cache)
        self.cache = cache
        self.config = config or EngineConfig()
        self.runner = JobRunner(scratch_root)
        self.gate = AdmissionGate(self.config.max_concurrent)
        self.dispatcher = PluginDispatcher(self._resolve_plugin, timeout_s=plugin_timeout_s)
        self._manifests: list[PluginManifest] = []
        self._config_poll_s = config_poll_s
        self._stop = threading.Event()
        self._plugin_view_cache: dict[str, tuple[float, dict]] = {}
        self._view_lock = threading.Lock()

        self.service = HttpService(host=host, port=port)
        s = self.service
        s.add_route("POST", "/engine/compile", lambda r: self._h_job(r, JobAction.COMPILE))
        s.add_route("POST", "/engine/execute", lambda r: self._h_job(r, JobAction.EXECUTE))
        s.add_route("POST", "/engine/evaluate", lambda r: self._h_job(r, JobAction.EVALUATE))
        s.add_route("POST", "/engine/tool", lambda r: self._h_job(r, JobAction.TOOL))
        s.add_route("GET", "/engine/stats", self._h_stats)

    @property
    def host(self) -> str:
        return self.service.host

    @property
    def port(self) -> int:
        return self.service.port

    def start(self) -> None:
        self.reload_config()
        self.service.start()
        threading.Thread(target=self._config_loop, daemon=True).start()

    def stop(self) -> None:
        self._stop.set()
        self.service.stop()

    def kill(self) -> None:
        self._stop.set()
        self.service.kill()

    # -- config sync -----------------------------------------------------------

    def _config_loop(self) -> None:
        while not self._stop.wait(self._config_poll_s):
            try:
                self.reload_config()
            except StoreUnavailable:
                continue  # keep the last-known config through a store outage

    def reload_config(self) -> None:
        try:
            payload = self.store.get(CONFIG_TABLE, ENGINE_CONFIG_KEY)
        except StoreUnavailable:
            payload = None
        if payload:
            try:
                self.config = EngineConfig.from_row(payload)
            except (ValueError, KeyError):
                pass  # malformed row: keep running on the previous config
        self.gate.set_limit(self.config.max_concurrent)
        try:
            rows = self.store.scan_payloads(MANIFESTS_TABLE)
            self._manifests = []
            for row in rows:
                try:
                    self._manifests.append(PluginManifest.from_row(row))
                except ValueError:
                    continue
        except StoreUnavailable:
            pass

    # -- handlers ---------------------------------------------------------------

    def _h_stats(self, req: Request) -> Response:
        stats = self.gate.stats()
        stats["instance_id"] = self.instance_id
        return Response.json(stats)

    def _h_job(self, req: Request, action: JobAction) -> Response:
        session = self._auth(req)
        body = req.json()
        context = self._context_for(session, body)
        job = EngineJob(
            job_id=new_id("job"),
            action=action,
            code=body.get("code", ""),
            language=body.get("language"),
            context=context,
            stdin=body.get("stdin", ""),
            tool=body.get("tool"),
            tool_params=body.get("params") or {},
        )
        config = self.config  # one consistent view per job
        self._enforce_delay(session["user_id"], action, config)

        if action == JobAction.EVALUATE:
            job.test_set = self._load_tests(job, body)
            if not job.test_set:
                raise HttpError(400, "evaluation requires a problem with test cases")

        budget_s = config.request_timeout_ms / 1000.0
        try:
            self.gate.acquire(budget_s)
        except Busy:
            return Response.json({"status": "BUSY", "error": "engine saturated"}, status=503)
        try:
            result = self._run_job(job, config)
        finally:
            self.gate.release()

        if self._should_log(job, config):
            result.log_id = self._log_attempt(job, result)
        return Response.json(result.to_row())

    def _auth(self, req: Request) -> dict:
        token = req.headers.get("x-session-token") or req.query.get("token")
        session = self.sessions.lookup(token)
        if session is None:
            raise HttpError(401, "missing or invalid session")
        return session

    def _context_for(self, session: dict, body: dict) -> JobContext:
        context = JobContext.from_row(body.get("context") or {})
        if not context.user_id:
            context.user_id = session["user_id"]
        role = session.get("role")
        if role == Role.STUDENT.value:
            # students only run work as themselves, never admin contexts
            context.user_id = session["user_id"]
            if context.kind == "admin":
                context.kind = "scratchpad"
        return context

    def _enforce_delay(self, user_id: str, action: JobAction, config: EngineConfig) -> None:
        key_name = _ACTION_KEY.get(action)
        if key_name is None:
            return
        delay_ms = config.per_action_delay_ms.get(key_name, 0)
        if delay_ms <= 0:
            return
        cache_key = f"delay:{key_name}:{user_id}"
        if self.cache.get(cache_key) is not None:
            raise HttpError(429, f"{key_name} allowed once per {delay_ms}ms")
        self.cache.set(cache_key, b"1", delay_ms / 1000.0)

    def _load_tests(self, job: EngineJob, body: dict) -> list[TestCase]:
        if body.get("test_set"):
            return [TestCase.from_row(t) for t in body["test_set"]]
        problem_id = job.context.problem_id or body.get("problem_id")
        if not problem_id:
            raise HttpError(400, "evaluate needs a problem_id or explicit test_set")
        job.context.problem_id = problem_id
        rows = self.store.scan_payloads("testcases", "problem_id", problem_id)
        return [TestCase.from_row(r) for r in sorted(rows, key=lambda r: r["test_id"])]

    # -- job execution -------------------------------------------------------------

    def _run_job(self, job: EngineJob, config: EngineConfig) -> JobResult:
        started = time.monotonic()
        if job.action == JobAction.TOOL:
            result = self._run_tool(job)
        elif job.action == JobAction.COMPILE:
            result = self._run_compile(job, config)
        elif job.action == JobAction.EXECUTE:
            result = self._run_execute(job, config)
        else:
            result = self._run_evaluate(job, config)
        result.wall_ms = (time.monotonic() - started) * 1000.0
        return result

    def _run_compile(self, job: EngineJob, config: EngineConfig) -> JobResult:
        pre = self._dispatch(Trigger.PRE_COMPILE, job, None)
        try:
            lang = config.language(job.language)
        except KeyError as exc:
            return JobResult(job.job_id, job.action, JobStatus.INTERNAL, stderr=str(exc), feedback=pre)
        outcome = self.runner.compile(job.code, lang, config)
        result = JobResult(
            job.job_id,
            job.action,
            outcome.status,
            diagnostics=outcome.diagnostics,
            stderr=outcome.stderr,
        )
        result.feedback = pre + self._dispatch(Trigger.ON_COMPILE, job, result)
        return result

    def _run_execute(self, job: EngineJob, config: EngineConfig) -> JobResult:
        try:
            lang = config.language(job.language)
        except KeyError as exc:
            return JobResult(job.job_id, job.action, JobStatus.INTERNAL, stderr=str(exc))
        outcome = self.runner.compile(job.code, lang, config)
        if outcome.status != JobStatus.OK:
            return JobResult(
                job.job_id, job.action, outcome.status,
                diagnostics=outcome.diagnostics, stderr=outcome.stderr,
            )
        run = self.runner.run(outcome.artifact_dir, lang, job.stdin.encode("utf-8"), config)
        return JobResult(
            job.job_id,
            job.action,
            _status_for(run),
            stdout=run.stdout.decode("utf-8", "replace"),
            stderr=run.stderr.decode("utf-8", "replace"),
        )

    def _run_evaluate(self, job: EngineJob, config: EngineConfig) -> JobResult:
        try:
            lang = config.language(job.language)
        except KeyError as exc:
            return JobResult(job.job_id, job.action, JobStatus.INTERNAL, stderr=str(exc), per_test=[])
        outcome = self.runner.compile(job.code, lang, config)
        if outcome.status != JobStatus.OK:
            result = JobResult(
                job.job_id, job.action, outcome.status,
                diagnostics=outcome.diagnostics, stderr=outcome.stderr, per_test=[],
            )
            result.feedback = self._dispatch(Trigger.ON_EVALUATE, job, result)
            return result
        per_test: list[PerTest] = []
        for test in job.test_set:
            run = self.runner.run(outcome.artifact_dir, lang, test.input.encode("utf-8"), config)
            if run.timed_out:
                verdict = Verdict.TLE
            elif run.exit_code != 0 or run.output_limited or run.memory_limited:
                verdict = Verdict.RTE
            elif judge_output(run.stdout, test.expected_output.encode("utf-8")):
                verdict = Verdict.PASS
            else:
                verdict = Verdict.FAIL
            per_test.append(
                PerTest(
                    test_id=test.test_id,
                    verdict=verdict,
                    visible=test.visible,
                    expected_output=test.expected_output if test.visible else None,
                    actual_output=run.stdout.decode("utf-8", "replace") if test.visible else None,
                )
            )
        result = JobResult(job.job_id, job.action, JobStatus.OK, per_test=per_test)
        result.feedback = self._dispatch(Trigger.ON_EVALUATE, job, result)
        if result.all_passed:
            result.feedback += self._dispatch(Trigger.ON_ACCEPTED, job, result)
        return result

    def _run_tool(self, job: EngineJob) -> JobResult:
        manifest = next((m for m in self._manifests if m.name == job.tool), None)
        if manifest is None or not manifest.services:
            return JobResult(
                job.job_id, job.action, JobStatus.INTERNAL,
                stderr=f"tool {job.tool!r} is not registered",
            )
        service = manifest.services[0]
        items = self.dispatcher.dispatch(
            service.trigger,
            {"job": _job_row(job), "params": job.tool_params},
            [PluginManifest(manifest.name, [service])],
            self.config.plugins_enabled,
        )
        return JobResult(job.job_id, job.action, JobStatus.OK, feedback=items)

    # -- plugins ----------------------------------------------------------------

    def _dispatch(self, trigger: Trigger, job: EngineJob, result: Optional[JobResult]) -> list[dict]:
        if not self._manifests:
            return []
        payload = {"job": _job_row(job)}
        if result is not None:
            payload["status"] = result.status.value
            payload["diagnostics"] = [d.to_row() for d in result.diagnostics]
            if result.per_test is not None:
                payload["per_test"] = [t.to_row() for t in result.per_test]
        return self.dispatcher.dispatch(trigger, payload, self._manifests, self.config.plugins_enabled)

    def _resolve_plugin(self, kind: str, instance_id: str) -> Optional[tuple[str, int]]:
        if self.registry is None:
            return None
        now = time.monotonic()
        with self._view_lock:
            cached = self._plugin_view_cache.get(kind)
            if cached is None or now - cached[0] > 1.0:
                try:
                    view = self.registry.view(kind)
                except Exception:
                    view = {"instances": []}
                cached = (now, view)
                self._plugin_view_cache[kind] = cached
        for rec in cached[1].get("instances", []):
            if rec["instance_id"] == instance_id and rec["health"] == "PASSING":
                return rec["address"]["host"], rec["address"]["port"]
        return None

    # -- logging ------------------------------------------------------------------

    def _should_log(self, job: EngineJob, config: EngineConfig) -> bool:
        if job.action == JobAction.TOOL:
            return False
        if job.context.assignment_key is None:
            return False  # scratchpad and admin work is never logged
        return config.logging_enabled.get(_ACTION_KEY[job.action], True)

    def _log_attempt(self, job: EngineJob, result: JobResult) -> Optional[str]:
        try:
            seq = self.store.bump("counters", "logs")
            log_id = f"log-{seq:08d}"
            self.store.write(
                LOGS_TABLE,
                log_id,
                {
                    "log_id": log_id,
                    "seq": seq,
                    "assignment_key": job.context.assignment_key.as_string(),
                    "action": job.action.value,
                    "at": now_ms(),
                    "status": result.status.value,
                    "snapshot_id": job.context.snapshot_id,
                    "diagnostics": [d.to_row() for d in result.diagnostics[:20]],
                    "verdict_counts": result.verdict_counts() if result.per_test is not None else None,
                    "engine": self.instance_id,
                },
            )
            return log_id
        except StoreUnavailable:
            return None


def _job_row(job: EngineJob) -> dict:
    return {
        "job_id": job.job_id,
        "action": job.action.value,
        "language": job.language,
        "code": job.code,
        "context": job.context.to_row(),
    }


def _status_for(run) -> JobStatus:
    if run.timed_out:
        return JobStatus.TIME_LIMIT
    if run.output_limited:
        return JobStatus.OUTPUT_LIMIT
    if run.memory_limited:
        return JobStatus.MEMORY_LIMIT
    if run.exit_code != 0:
        return JobStatus.RUNTIME_ERROR
    return JobStatus.OK
