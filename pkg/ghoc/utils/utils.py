from __future__ import annotations

import os
import threading
from collections import OrderedDict
from typing import Any, Generic, TypeVar

T = TypeVar("T")


class Singleton(Generic[T]):
    def __init__(self, cls: type[T]):
        self._cls = cls
        self._instance = {}
        self._lock = threading.Lock()

    def __call__(self) -> T:
        with self._lock:
            if self._cls not in self._instance:
                self._instance[self._cls] = self._cls()
        return self._instance[self._cls]


def log_level() -> int:
    return int(os.environ.get("LOG_LEVEL", "0"))


def log(level, *args):
    """Print ``args`` without a trailing newline when ``LOG_LEVEL >= level``."""
    if level <= log_level():
        print(*args, end="")


def log_do(level, fn):
    if level <= log_level():
        fn()


class Cache:
    """
    Memoizes ``value_fn`` under ``key_fn``. A ``None`` key bypasses the cache.
    With ``max_entries`` set, the oldest entry is evicted first.
    """

    def __init__(self, max_entries: int | None = None):
        self.cache: OrderedDict[Any, Any] = OrderedDict()
        self.max_entries = max_entries
        self.hit_num = 0
        self.miss_num = 0

    def __call__(self, *args, **kwargs):
        cache_key = self.key_fn(*args, **kwargs)
        if cache_key is None:
            return self.value_fn(*args, **kwargs)
        if cache_key in self.cache:
            log(5, "cache hit: ", self.describe_key(cache_key), "\n")
            self.hit_num += 1
            return self.cache[cache_key]
        self.miss_num += 1
        value = self.value_fn(*args, **kwargs)
        self.cache[cache_key] = value
        if self.max_entries is not None and len(self.cache) > self.max_entries:
            self.cache.popitem(last=False)
        return value

    def clear(self):
        self.cache.clear()
        self.hit_num = 0
        self.miss_num = 0

    def describe_key(self, key) -> str:
        return repr(key)

    def key_fn(self, *args, **kwargs):
        raise NotImplementedError()

    def value_fn(self, *args, **kwargs):
        raise NotImplementedError()


def is_strict_mode():
    return os.environ.get("STRICT_MODE", "0") == "1"


def profile_path() -> str | None:
    return os.environ.get("GHOC_PROFILE", None)


def hashable(obj):
    try:
        hash(obj)
        return True
    except TypeError:
        return False


@Singleton
class SolveLogger:
    """
    Process-wide counters of model evaluations, printed as a banner at
    ``LOG_LEVEL >= 1`` after each solve. Updates are serialized, so solves
    running in worker threads count correctly.
    """

    solve_num: int
    cost_evals: int
    gradient_evals: int
    iterations: int

    def __init__(self):
        self._lock = threading.Lock()
        self.clear()

    def clear(self):
        with self._lock:
            self.solve_num = 0
            self.cost_evals = 0
            self.gradient_evals = 0
            self.iterations = 0
            self.last: dict[str, Any] = {}

    def add_evals(self, cost: int = 0, gradient: int = 0):
        with self._lock:
            self.cost_evals += cost
            self.gradient_evals += gradient

    def add_solve(self, **summary):
        with self._lock:
            self.solve_num += 1
            self.iterations += summary.get("iterations", 0)
            self.last = summary

    def __str__(self):
        strs = []
        strs.append("---------------- ghoc solve info ----------------")
        strs.append(f"SolveNum: {self.solve_num}")
        strs.append(f"CostEvals: {self.cost_evals}")
        strs.append(f"GradientEvals: {self.gradient_evals}")
        strs.append(f"Iterations: {self.iterations}")
        for key, value in self.last.items():
            strs.append(f"  {key}: {value}")
        strs.append("---------------- ghoc solve info ----------------")
        return "\n".join(strs)

    def __repr__(self):
        return self.__str__()

    def print_info(self):
        print(self)
