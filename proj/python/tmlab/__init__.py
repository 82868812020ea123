"""Transactional memory models, checkers and metrics."""

from ._tmlab import (
    FormatError,
    check_history,
    enumerate,
    is_observable,
    run,
    schedule_accepts,
    tm_names,
)

__all__ = [
    "FormatError",
    "check_history",
    "enumerate",
    "is_observable",
    "run",
    "schedule_accepts",
    "tm_names",
]
