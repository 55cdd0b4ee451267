from .config import EngineConfig, LanguageSpec, DEFAULT_LANGUAGES
from .jobs import EngineJob, JobResult, JobAction, JobStatus, Verdict
from .sandbox import SandboxResult, run_sandboxed
from .judge import normalize_output, judge_output
from .service import EngineService

__all__ = [
    "EngineConfig",
    "LanguageSpec",
    "DEFAULT_LANGUAGES",
    "EngineJob",
    "JobResult",
    "JobAction",
    "JobStatus",
    "Verdict",
    "SandboxResult",
    "run_sandboxed",
    "normalize_output",
    "judge_output",
    "EngineService",
]
