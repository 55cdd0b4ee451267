"""Auto-scaling monitor.

Instances publish their rolling mean response time each interval; the monitor
averages the reporters, tracks a signed streak of consecutive hot or cold
intervals, and scales after the streak threshold: a short streak heats up (one
new instance), a much longer one (10x by default) cools down (drain and stop
the newest instance). A mid-band interval resets the streak. `decide` is a
pure function, so a recorded trace replays to the identical decision
sequence.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Protocol, Sequence

from ..common.util import now_ms
from ..registry.client import RegistryClient

log = logging.getLogger(__name__)


class Decision(str, Enum):
    UPSCALE = "UPSCALE"
    DOWNSCALE = "DOWNSCALE"
    HOLD = "HOLD"


@dataclass(frozen=True)
class ScalerConfig:
    kind: str = "WEBAPP"
    window_n: int = 100
    publish_interval_ms: int = 2000
    t_high_ms: float = 250.0
    t_low_ms: float = 50.0
    streak_up: int = 3
    streak_down: int = 30  # cooldown takes 10x the heat-up streak by default
    min_instances: int = 1
    max_instances: int = 4

    def __post_init__(self):
        if self.t_low_ms >= self.t_high_ms:
            raise ValueError("t_low must be below t_high")
        if self.streak_up >= self.streak_down:
            raise ValueError("streak_up must be below streak_down")
        if self.min_instances < 1:
            raise ValueError("min_instances must be at least 1")


@dataclass(frozen=True)
class ScalerState:
    streak: int = 0  # +k: k consecutive hot intervals; -k: k consecutive cold
    last_action_at: int = 0


def publish_sample(instance_id: str, window: Sequence[float], interval: int,
                   window_n: int = 100) -> Optional[dict]:
    """Mean response time over the last (up to window_n) values; None when idle."""
    values = list(window)[-window_n:]
    if not values:
        return None
    return {
        "instance_id": instance_id,
        "interval": interval,
        "mean_rt_ms": sum(values) / len(values),
    }


def aggregate(means: Sequence[float]) -> Optional[float]:
    """Cluster mean over the instances that reported this interval."""
    values = list(means)
    if not values:
        return None
    return sum(values) / len(values)


def decide(
    state: ScalerState,
    cluster_mean: Optional[float],
    current_count: int,
    config: ScalerConfig,
) -> tuple[Decision, ScalerState]:
    """One interval's scaling decision. Pure: no clocks, no I/O.

    No samples at all leave the streak untouched (skipped interval). The
    streak resets only on an action or a mid-band interval; hitting the
    threshold while pinned at a bound holds without resetting.
    """
    if cluster_mean is None:
        return Decision.HOLD, state
    if cluster_mean > config.t_high_ms:
        streak = state.streak + 1 if state.streak > 0 else 1
    elif cluster_mean < config.t_low_ms:
        streak = state.streak - 1 if state.streak < 0 else -1
    else:
        return Decision.HOLD, replace(state, streak=0)
    if streak >= config.streak_up and current_count < config.max_instances:
        return Decision.UPSCALE, replace(state, streak=0)
    if -streak >= config.streak_down and current_count > config.min_instances:
        return Decision.DOWNSCALE, replace(state, streak=0)
    return Decision.HOLD, replace(state, streak=streak)


class SupervisorLike(Protocol):
    def spawn(self, kind: str) -> str: ...

    def stop_instance(self, instance_id: str, drain: bool = True) -> None: ...


class ScalerMonitor:
    """Periodic monitor for one service kind.

    Reads the previous interval's samples from the registry KV annex, ignores
    instances no longer registered, decides, and acts through the supervisor.
    A failed action is retried next interval without re-accumulating the
    streak. Each decision appends one audit line:
    ``interval mean streak decision count``.
    """

    def __init__(
        self,
        config: ScalerConfig,
        registry: RegistryClient,
        supervisor: SupervisorLike,
        audit_log_path: Optional[str] = None,
    ):
        self.config = config
        self.registry = registry
        self.supervisor = supervisor
        self.state = ScalerState()
        self.audit_log_path = audit_log_path
        self._pending: Optional[Decision] = None
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()

    def _loop(self) -> None:
        while not self._stop.wait(self.config.publish_interval_ms / 1000.0):
            try:
                self.tick()
            except Exception as exc:
                log.warning("scaler tick failed: %s", exc)

    def tick(self) -> Decision:
        interval = now_ms() // self.config.publish_interval_ms - 1
        try:
            passing = self.registry.passing_instances(self.config.kind)
        except Exception:
            return Decision.HOLD  # registry outage: do nothing this interval
        registered = {rec["instance_id"]: rec for rec in passing}
        count = len(registered)

        entries = self.registry.kv_list(f"scaler/{self.config.kind}/")
        means = []
        for path, sample in entries.items():
            parts = path.split("/")
            if len(parts) != 4:
                continue
            _, _, instance_id, sample_interval = parts
            if instance_id not in registered:
                continue  # stale sample from a deregistered instance
            if int(sample_interval) != interval:
                continue
            means.append(float(sample["mean_rt_ms"]))

        if self._pending is not None:
            decision, self._pending = self._pending, None
        else:
            mean = aggregate(means)
            decision, self.state = decide(self.state, mean, count, self.config)
            self._audit(interval, mean, decision, count)
        if decision != Decision.HOLD:
            try:
                self.act(decision, registered)
                self.state = replace(self.state, last_action_at=now_ms())
            except Exception as exc:
                log.warning("scale action %s failed, retrying next interval: %s", decision, exc)
                self._pending = decision
        return decision

    def act(self, decision: Decision, registered: dict[str, dict]) -> None:
        if decision == Decision.UPSCALE:
            instance_id = self.supervisor.spawn(self.config.kind)
            log.info("upscaled %s: spawned %s", self.config.kind, instance_id)
        elif decision == Decision.DOWNSCALE:
            victim = max(registered.values(), key=lambda r: (r["registered_at"], r["instance_id"]))
            self.supervisor.stop_instance(victim["instance_id"], drain=True)
            log.info("downscaled %s: stopped %s", self.config.kind, victim["instance_id"])

    def _audit(self, interval: int, mean: Optional[float], decision: Decision, count: int) -> None:
        if not self.audit_log_path:
            return
        line = f"{interval} {'-' if mean is None else f'{mean:.3f}'} {self.state.streak} {decision.value} {count}\n"
        with open(self.audit_log_path, "a", encoding="utf-8") as fh:
            fh.write(line)
