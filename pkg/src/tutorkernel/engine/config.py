"""Engine configuration: sandbox quotas, admission bound, per-action delays,
logging toggles, and the language table.

The live config is a store row (table "config", key "engine") that teachers
edit from the control panel; engine instances poll it and apply changes
without restarting. Adding a programming language is a config edit: a label
mapped to compile/run argv templates.
"""
from __future__ import annotations

import shutil
import sys
from dataclasses import dataclass, field, asdict
from typing import Optional

CONFIG_TABLE = "config"
ENGINE_CONFIG_KEY = "engine"


@dataclass
class LanguageSpec:
    label: str
    source_file: str
    compile_argv: list[str]  # {src} -> source path, {out} -> artifact path, {flags} -> flag splice
    run_argv: list[str]
    flags: list[str] = field(default_factory=list)
    diagnostic_style: str = "python"  # python | gcc

    def to_row(self) -> dict:
        return asdict(self)

    @classmethod
    def from_row(cls, row: dict) -> "LanguageSpec":
        return cls(**{k: row[k] for k in cls.__dataclass_fields__ if k in row})


def _python_spec() -> LanguageSpec:
    return LanguageSpec(
        label="python",
        source_file="main.py",
        # -I -S: no site import, no env: faster and stricter; diagnostics unchanged
        compile_argv=[sys.executable, "-I", "-S", "-X", "utf8", "-m", "py_compile", "{src}"],
        run_argv=[sys.executable, "-X", "utf8", "{src}"],
        diagnostic_style="python",
    )


def _c_spec() -> LanguageSpec:
    return LanguageSpec(
        label="c",
        source_file="main.c",
        compile_argv=["gcc", "{flags}", "-o", "{out}", "{src}"],
        run_argv=["{out}"],
        flags=["-O2", "-std=c11"],
        diagnostic_style="gcc",
    )


def default_languages() -> dict[str, LanguageSpec]:
    languages = {"python": _python_spec()}
    if shutil.which("gcc"):
        languages["c"] = _c_spec()
    return languages


DEFAULT_LANGUAGES = default_languages()


@dataclass
class EngineConfig:
    time_quota_ms: int = 2000
    memory_quota_bytes: int = 256 << 20
    output_cap_bytes: int = 64 << 10
    max_concurrent: int = 2
    request_timeout_ms: int = 30000  # queue wait + run time bound
    per_action_delay_ms: dict[str, int] = field(
        default_factory=lambda: {"compile": 0, "execute": 0, "evaluate": 0}
    )
    logging_enabled: dict[str, bool] = field(
        default_factory=lambda: {"compile": True, "execute": True, "evaluate": True}
    )
    plugins_enabled: dict[str, bool] = field(default_factory=dict)
    default_language: str = "python"
    languages: dict[str, LanguageSpec] = field(default_factory=default_languages)
    autosave_period_s: int = 120  # consumed by the editor UI, stored alongside

    def __post_init__(self):
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be at least 1")
        if min(self.time_quota_ms, self.memory_quota_bytes, self.output_cap_bytes) <= 0:
            raise ValueError("quotas must be positive")
        if self.request_timeout_ms <= self.time_quota_ms:
            raise ValueError("request timeout must exceed the job time quota")

    def language(self, label: Optional[str]) -> LanguageSpec:
        spec = self.languages.get(label or self.default_language)
        if spec is None:
            raise KeyError(f"no such language {label!r}")
        return spec

    def to_row(self) -> dict:
        row = asdict(self)
        row["languages"] = {k: v.to_row() for k, v in self.languages.items()}
        return row

    @classmethod
    def from_row(cls, row: dict) -> "EngineConfig":
        kwargs = {k: row[k] for k in cls.__dataclass_fields__ if k in row}
        if "languages" in kwargs:
            kwargs["languages"] = {
                k: LanguageSpec.from_row(v) for k, v in kwargs["languages"].items()
            }
        return cls(**kwargs)
