#!/usr/bin/env python3
"""Load experiment: N concurrent simulated students against a deployment.

Deploy first (opsctl deploy + opsctl seed), then:

    python scripts/load_experiment.py --gateway 127.0.0.1:8080 --students 200

Each student logs in, saves a few versions with think time, compiles, some
evaluate, and checks the home view. Prints per-operation latency percentiles
and the error count.
"""
from __future__ import annotations

import argparse
import random
import threading
import time

from tutorkernel.common.httpkit import http_json
from tutorkernel.common.util import now_ms

SOLUTION = "a, b = map(int, input().split())\nprint(a + b)\n"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--gateway", default="127.0.0.1:8080")
    parser.add_argument("--students", type=int, default=200)
    parser.add_argument("--think-min", type=float, default=5.0)
    parser.add_argument("--think-max", type=float, default=70.0)
    parser.add_argument("--problem", default="p-sum")
    args = parser.parse_args()
    host, port = args.gateway.rsplit(":", 1)
    port = int(port)

    def api(method, path, token=None, body=None, timeout=60.0):
        headers = {"X-Session-Token": token} if token else {}
        return http_json(method, host, port, path, body, headers=headers, timeout=timeout)

    status, teacher_login = api("POST", "/api/login",
                                body={"login": "teacher1", "credential": "teacher1"})
    if status != 200:
        print("cannot login as the seeded teacher; run opsctl seed first")
        return 1
    teacher = teacher_login["token"]
    _, event = api("POST", "/api/events", teacher, {"kind": "LAB", "title": "load experiment"})
    eid = event["event_id"]
    now = now_ms()
    api("POST", f"/api/events/{eid}/schedules", teacher,
        {"start": now - 3_600_000, "end": now + 3_600_000})
    students = [f"u-s{i:03d}" for i in range(1, args.students + 1)]
    status, body = api("POST", f"/api/events/{eid}/assign", teacher,
                       {"strategy": "SAME_FOR_ALL", "problem_ids": [args.problem],
                        "seed": 1, "students": students})
    if status != 200:
        print("assignment failed:", body)
        return 1

    by_op: dict[str, list[float]] = {}
    errors: list[tuple] = []
    lock = threading.Lock()

    def timed(op, method, path, token, body):
        started = time.monotonic()
        try:
            status, reply = api(method, path, token, body)
        except Exception as exc:
            with lock:
                errors.append((op, repr(exc)[:80]))
            return None
        with lock:
            by_op.setdefault(op, []).append((time.monotonic() - started) * 1000)
            if not (200 <= status < 300):
                errors.append((op, status, str(reply)[:80]))
        return reply

    def session(index: int):
        rng = random.Random(index)
        login = f"s{index:03d}"
        think = lambda: time.sleep(rng.uniform(args.think_min, args.think_max))
        reply = timed("login", "POST", "/api/login", None,
                      {"login": login, "credential": login})
        if not reply or "token" not in reply:
            return
        token = reply["token"]
        think()
        for i, stimulus in enumerate(["MANUAL_SAVE", "AUTO_SAVE", "COMPILE"]):
            timed("save", "POST", "/api/editor/save", token,
                  {"event": eid, "problem": args.problem,
                   "code": SOLUTION + f"# {login} v{i}\n", "stimulus": stimulus})
            think()
        timed("compile", "POST", "/engine/compile", token,
              {"code": SOLUTION + f"# {login}\n",
               "context": {"kind": "course", "event_id": eid, "problem_id": args.problem}})
        if index % 5 == 0:
            think()
            timed("evaluate", "POST", "/engine/evaluate", token,
                  {"code": SOLUTION,
                   "context": {"kind": "course", "event_id": eid, "problem_id": args.problem}})
        timed("home", "GET", "/api/home", token, None)

    threads = [threading.Thread(target=session, args=(i,))
               for i in range(1, args.students + 1)]
    started = time.monotonic()
    for t in threads:
        t.start()
        time.sleep(0.08)
    for t in threads:
        t.join()
    wall = time.monotonic() - started

    total = sum(len(v) for v in by_op.values())
    print(f"\n{total} requests from {args.students} students in {wall:.1f}s; "
          f"{len(errors)} errors")
    for op, vals in sorted(by_op.items()):
        vals.sort()
        print(f"  {op:9s} n={len(vals):5d} p50={vals[len(vals) // 2]:7.0f}ms "
              f"p95={vals[int(len(vals) * 0.95)]:7.0f}ms max={vals[-1]:7.0f}ms")
    for err in errors[:10]:
        print("  error:", err)
    return 1 if errors else 0


if __name__ == "__main__":
    raise SystemExit(main())
