#!/usr/bin/env python3
"""Engine scaling experiment: compile throughput at 1, 2 and 4 engine
instances, against in-process clusters (every run gets a fresh one).

    python scripts/scaling_experiment.py --duration 10
"""
from __future__ import annotations

import argparse
import shutil
import threading
import time

from tutorkernel.cluster import LocalCluster
from tutorkernel.engine.config import EngineConfig


def workload() -> tuple[str, str, str]:
    if shutil.which("gcc"):
        chunk = "#include <stdio.h>\n" + "\n".join(
            f"int f{i}(int x) {{ int a = {i}; for (int j = 0; j < 9; j++) a += x * j; return a; }}"
            for i in range(150)
        ) + "\nint main(void) { printf(\"%d\\n\", f0(1)); return 0; }\n"
        return "c", chunk, "//"
    chunk = "\n".join(f"def f{i}(x):\n    return x * {i} + {i % 7}" for i in range(5000))
    return "python", chunk, "#"


def throughput(engines: int, duration_s: float) -> float:
    language, chunk, comment = workload()
    config = EngineConfig(max_concurrent=1, time_quota_ms=20000, request_timeout_ms=60000)
    cluster = LocalCluster(webapps=1, engines=engines, store_replicas=1,
                           cache_shards=1, engine_config=config).start()
    try:
        cluster.seed(students=2, tas=1, tutors=1)
        token = cluster.login("s001")
        completed = [0]
        stop = threading.Event()
        lock = threading.Lock()

        def worker(wid: int):
            n = 0
            while not stop.is_set():
                code = chunk + f"\n{comment} worker {wid} job {n}\n"
                status, body = cluster.api("POST", "/engine/compile", token,
                                           {"code": code, "language": language,
                                            "context": {"kind": "scratchpad"}}, timeout=60)
                if status == 200 and body.get("status") == "OK":
                    with lock:
                        completed[0] += 1
                n += 1

        threads = [threading.Thread(target=worker, args=(w,)) for w in range(2 * engines)]
        started = time.monotonic()
        for t in threads:
            t.start()
        time.sleep(duration_s)
        stop.set()
        for t in threads:
            t.join(timeout=90)
        return completed[0] / (time.monotonic() - started)
    finally:
        cluster.stop()


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--duration", type=float, default=10.0)
    parser.add_argument("--counts", default="1,2,4")
    args = parser.parse_args()
    previous = None
    for count in [int(c) for c in args.counts.split(",")]:
        rate = throughput(count, args.duration)
        note = f" ({rate / previous:.2f}x)" if previous else ""
        print(f"{count} engine(s): {rate:.2f} compiles/s{note}")
        previous = rate
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
