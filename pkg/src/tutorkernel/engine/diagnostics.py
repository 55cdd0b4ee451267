"""Structured compiler diagnostics.

Parsing is lossless: every diagnostic keeps the raw text block it came from,
and concatenating the raw blocks reproduces the compiler output byte for
byte. Structured fields (file, line, col, severity, text) are best-effort.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, asdict

_GCC_LINE = re.compile(
    r"^(?P<file>[^:\n]+):(?P<line>\d+):(?:(?P<col>\d+):)?\s*(?P<severity>error|warning|note|fatal error):\s*(?P<text>.*)$"
)
_PY_FILE_LINE = re.compile(r'^\s*File "(?P<file>[^"]+)", line (?P<line>\d+)')
_PY_ERROR_LINE = re.compile(r"^(?P<kind>\w*(?:Error|Warning|Exception))\s*:\s*(?P<text>.*)$")


@dataclass
class Diagnostic:
    file: str
    line: int
    col: int
    severity: str
    text: str
    raw: str

    def to_row(self) -> dict:
        return asdict(self)

    @classmethod
    def from_row(cls, row: dict) -> "Diagnostic":
        return cls(**{k: row[k] for k in cls.__dataclass_fields__ if k in row})


def parse_diagnostics(raw: str, style: str = "python") -> list[Diagnostic]:
    if not raw:
        return []
    if style == "gcc":
        return _parse_gcc(raw)
    return _parse_python(raw)


def _parse_gcc(raw: str) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    pending: list[str] = []

    def flush_into_last():
        if pending and out:
            out[-1].raw += "".join(pending)
            pending.clear()

    for line in raw.splitlines(keepends=True):
        match = _GCC_LINE.match(line.rstrip("\n"))
        if match:
            flush_into_last()
            out.append(
                Diagnostic(
                    file=match.group("file"),
                    line=int(match.group("line")),
                    col=int(match.group("col") or 0),
                    severity="error" if "error" in match.group("severity") else match.group("severity"),
                    text=match.group("text"),
                    raw=line,
                )
            )
        else:
            pending.append(line)
    if out:
        flush_into_last()
    elif pending:
        out.append(Diagnostic("", 0, 0, "error", raw.strip(), "".join(pending)))
    return out


def _parse_python(raw: str) -> list[Diagnostic]:
    """One diagnostic per traceback-style block ending in a *Error line."""
    out: list[Diagnostic] = []
    block: list[str] = []
    file, line_no = "", 0
    for line in raw.splitlines(keepends=True):
        block.append(line)
        loc = _PY_FILE_LINE.match(line)
        if loc:
            file, line_no = loc.group("file"), int(loc.group("line"))
        err = _PY_ERROR_LINE.match(line.strip())
        if err:
            caret_col = _caret_col(block)
            out.append(
                Diagnostic(
                    file=file,
                    line=line_no,
                    col=caret_col,
                    severity="error",
                    text=f"{err.group('kind')}: {err.group('text')}".rstrip(": "),
                    raw="".join(block),
                )
            )
            block = []
            file, line_no = "", 0
    if block:
        if out:
            out[-1].raw += "".join(block)
        else:
            out.append(Diagnostic("", 0, 0, "error", raw.strip(), "".join(block)))
    return out


def _caret_col(block: list[str]) -> int:
    for line in reversed(block):
        stripped = line.rstrip("\n")
        if stripped.strip() and set(stripped.strip()) <= {"^", "~"}:
            return len(stripped) - len(stripped.lstrip()) + 1
    return 0


def roundtrip(diagnostics: list[Diagnostic]) -> str:
    return "".join(d.raw for d in diagnostics)
