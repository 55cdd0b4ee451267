from .queries import (
    code_size_series,
    save_progression,
    error_timeline,
    execution_sequence,
    course_statistics,
    dashboard,
    error_class,
)
from .csvout import rows_to_csv

__all__ = [
    "code_size_series",
    "save_progression",
    "error_timeline",
    "execution_sequence",
    "course_statistics",
    "dashboard",
    "error_class",
    "rows_to_csv",
]
