"""Job service: configs, persistence, lifecycle manager, HTTP API, CLI."""

from .config import ConfigError, JobConfig, default_home, parse_config
from .manager import JobManager
from .store import (
    LEGAL_TRANSITIONS,
    STATUSES,
    IllegalTransition,
    JobError,
    JobRecord,
    JobStore,
    UnknownJob,
)

__all__ = [
    "ConfigError",
    "JobConfig",
    "default_home",
    "parse_config",
    "JobManager",
    "LEGAL_TRANSITIONS",
    "STATUSES",
    "IllegalTransition",
    "JobError",
    "JobRecord",
    "JobStore",
    "UnknownJob",
]
