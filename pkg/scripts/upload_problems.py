#!/usr/bin/env python3
"""Pack a directory of problems into a bulk-upload call.

Expected layout (one subdirectory per problem):

    problems/
      two-sum/
        statement.md        # problem statement (plain text or markdown)
        solution.py         # model solution
        template.py         # optional starter template
        meta.json           # optional: {"title": ..., "category": ..., "practice": bool}
        tests/
          01.in  01.out     # paired input/expected-output files
          02.in  02.out
          hidden/           # tests in here are invisible to students
            03.in 03.out

    python scripts/upload_problems.py problems/ --gateway 127.0.0.1:8080 \
        --login tutor01 --credential tutor01
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from tutorkernel.common.httpkit import http_json


def read(path: str, default: str = "") -> str:
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    return default


def collect_tests(tests_dir: str, visible: bool) -> list[dict]:
    out = []
    if not os.path.isdir(tests_dir):
        return out
    for name in sorted(os.listdir(tests_dir)):
        if name == "hidden":
            out.extend(collect_tests(os.path.join(tests_dir, name), visible=False))
            continue
        if not name.endswith(".in"):
            continue
        stem = name[:-3]
        out_path = os.path.join(tests_dir, stem + ".out")
        if not os.path.exists(out_path):
            print(f"warning: {name} has no matching .out; skipped", file=sys.stderr)
            continue
        out.append({
            "input": read(os.path.join(tests_dir, name)),
            "expected_output": read(out_path),
            "visible": visible,
        })
    return out


def pack_problem(path: str) -> dict:
    meta = {}
    meta_path = os.path.join(path, "meta.json")
    if os.path.exists(meta_path):
        meta = json.loads(read(meta_path))
    name = os.path.basename(path.rstrip("/"))
    solution = ""
    template = ""
    for entry in os.listdir(path):
        if entry.startswith("solution."):
            solution = read(os.path.join(path, entry))
        elif entry.startswith("template."):
            template = read(os.path.join(path, entry))
    return {
        "problem_id": meta.get("problem_id", f"p-{name}"),
        "title": meta.get("title", name.replace("-", " ").title()),
        "statement": read(os.path.join(path, "statement.md")),
        "solution_code": solution,
        "template_code": template,
        "category": meta.get("category", ""),
        "practice": bool(meta.get("practice", False)),
        "tests": collect_tests(os.path.join(path, "tests"), visible=True),
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("directory")
    parser.add_argument("--gateway", default="127.0.0.1:8080")
    parser.add_argument("--login", required=True)
    parser.add_argument("--credential", required=True)
    args = parser.parse_args()

    problems = []
    for name in sorted(os.listdir(args.directory)):
        path = os.path.join(args.directory, name)
        if os.path.isdir(path):
            problems.append(pack_problem(path))
    if not problems:
        print("no problem directories found", file=sys.stderr)
        return 1

    host, port = args.gateway.rsplit(":", 1)
    status, body = http_json("POST", host, int(port), "/api/login",
                             {"login": args.login, "credential": args.credential})
    if status != 200:
        print(f"login failed: {body}", file=sys.stderr)
        return 1
    status, body = http_json("POST", host, int(port), "/api/problems/bulk",
                             {"problems": problems},
                             headers={"X-Session-Token": body["token"]})
    if status != 201:
        print(f"upload failed: {body}", file=sys.stderr)
        return 1
    print(f"uploaded: {', '.join(body['created'])}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
