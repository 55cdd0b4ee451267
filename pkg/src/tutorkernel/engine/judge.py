"""Output comparison for evaluation.

Default normalization: strip trailing whitespace from each line and drop
trailing blank lines, then compare bytes. Nothing else is forgiven: interior
whitespace, ordering and case all count.
"""
from __future__ import annotations

_TRAILING = b" \t\r"


def normalize_output(data: bytes) -> bytes:
    lines = [line.rstrip(_TRAILING) for line in data.split(b"\n")]
    while lines and lines[-1] == b"":
        lines.pop()
    return b"\n".join(lines)


def judge_output(actual: bytes, expected: bytes) -> bool:
    return normalize_output(actual) == normalize_output(expected)
