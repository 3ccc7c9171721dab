from .dispatcher import Dispatcher, is_plain, primitive
from .exceptions import (
    ConfigError,
    ConstraintError,
    DataError,
    DifferentiationError,
    DivergenceError,
    DomainError,
    GhocError,
    NonConvergenceError,
    NumericInputError,
    ParameterError,
    ShapeError,
    inner_error_default_handler,
)
from .profiler import (
    EventGuard,
    GhocProfiler,
    ProfileGuard,
    event_end,
    event_register,
    event_start,
)
from .utils import (
    Cache,
    Singleton,
    SolveLogger,
    hashable,
    is_strict_mode,
    log,
    log_do,
    log_level,
    profile_path,
)

__all__ = [
    "GhocError",
    "ParameterError",
    "ConfigError",
    "ConstraintError",
    "DataError",
    "ShapeError",
    "DomainError",
    "NumericInputError",
    "DivergenceError",
    "NonConvergenceError",
    "DifferentiationError",
    "inner_error_default_handler",
    "Dispatcher",
    "primitive",
    "is_plain",
    "Singleton",
    "Cache",
    "SolveLogger",
    "log",
    "log_do",
    "log_level",
    "is_strict_mode",
    "profile_path",
    "hashable",
    "event_start",
    "event_end",
    "event_register",
    "EventGuard",
    "GhocProfiler",
    "ProfileGuard",
]
