"""
Event profiler for simulations and solves.

Events are marked in the code with ``EventGuard``, ``event_register`` or the
``event_start``/``event_end`` pair. They are only recorded while at least one
``GhocProfiler`` is enabled and when ``EVENT_LEVEL`` (default 1) is greater
than the event's level, so per-day events (level 1) stay silent unless asked
for with ``EVENT_LEVEL=2``.

Each thread nests its events under the current record on its own stack, so
events from worker threads never become children of another thread's events.
"""

from __future__ import annotations

import atexit
import json
import os
import threading
import time
from collections import defaultdict
from contextlib import contextmanager
from functools import wraps

from .utils import log

_Profilers: set[GhocProfiler] = set()


def _clear_profilers():
    for profiler in set(_Profilers):
        profiler.disable(dump=True)


atexit.register(_clear_profilers)


class Event:
    __slots__ = ("name", "start_time", "end_time", "children")

    def __init__(self, name: str):
        self.name = name
        self.start_time: float | None = None
        self.end_time: float | None = None
        self.children: list[Event] = []

    def start(self):
        self.start_time = time.perf_counter()

    def end(self):
        if self.end_time is None:
            self.end_time = time.perf_counter()

    @property
    def lasted(self) -> float | None:
        if self.start_time is None or self.end_time is None:
            return None
        return self.end_time - self.start_time

    def to_dict(self, default_end: float) -> dict:
        end = self.end_time if self.end_time is not None else default_end
        return {
            "name": self.name,
            "start_time": self.start_time,
            "end_time": end,
            "lasted": end - self.start_time,
            "sub_events": [c.to_dict(default_end) for c in self.children],
        }

    def __repr__(self):
        return f"[Event: {self.name}](start: {self.start_time}, end: {self.end_time}, lasted: {self.lasted})"


class GhocProfiler:
    def __init__(self, outpath: str | None = None):
        if outpath is None:
            outpath = os.path.join(
                os.getcwd(), f"ghoc_profile_{os.getpid()}.json"
            )
        self.outpath = outpath
        self.records: list[Event] = []
        self._local = threading.local()

    def enable(self, tag: str | None = None):
        if self in _Profilers:
            return
        record = Event(tag or f"Record_{len(self.records)}")
        record.start()
        self.records.append(record)
        _Profilers.add(self)

    def disable(self, dump: bool = False):
        if self in _Profilers:
            self.records[-1].end()
            _Profilers.remove(self)
        if dump:
            self.dump_json()

    def _stack(self) -> list[Event]:
        stack = getattr(self._local, "stack", None)
        if not stack or stack[0] is not self.records[-1]:
            stack = self._local.stack = [self.records[-1]]
        return stack

    def push(self, event: Event):
        stack = self._stack()
        stack[-1].children.append(event)
        stack.append(event)

    def pop(self, event: Event):
        stack = self._stack()
        if len(stack) > 1 and event is stack[-1]:
            stack.pop()

    def summary(self) -> dict[str, dict[str, float]]:
        """Total seconds and call count per event name over all records."""
        totals: dict[str, list[float]] = defaultdict(lambda: [0.0, 0])

        def visit(event: Event):
            if event.lasted is not None:
                totals[event.name][0] += event.lasted
                totals[event.name][1] += 1
            for child in event.children:
                visit(child)

        for record in self.records:
            for child in record.children:
                visit(child)
        return {
            name: {"seconds": seconds, "calls": int(calls)}
            for name, (seconds, calls) in sorted(totals.items())
        }

    def to_dict(self) -> dict:
        end = self.records[-1].end_time or time.perf_counter()
        return {
            "name": "Main",
            "start_time": self.records[0].start_time,
            "end_time": end,
            "lasted": end - self.records[0].start_time,
            "sub_events": [r.to_dict(end) for r in self.records],
            "summary": self.summary(),
        }

    def dump_json(self):
        if not self.records:
            return
        with open(self.outpath, "w") as fp:
            json.dump(self.to_dict(), fp, indent=4)
        log(1, f"[profiler] JSON dumped to {self.outpath}\n")


@contextmanager
def ProfileGuard(outpath: str | None = None):
    profiler = GhocProfiler(outpath)
    try:
        profiler.enable()
        yield profiler
    finally:
        profiler.disable(dump=outpath is not None)


def event_start(event_name: str, event_level: int = 0) -> Event | None:
    if _Profilers and int(os.environ.get("EVENT_LEVEL", "1")) > event_level:
        event = Event(event_name)
        for profiler in tuple(_Profilers):
            profiler.push(event)
        event.start()
        return event
    return None


def event_end(event: Event | None):
    if event is not None:
        event.end()
        for profiler in tuple(_Profilers):
            profiler.pop(event)


def event_register(event_name: str, event_level: int = 0):
    def event_wrapper(func):
        @wraps(func)
        def call_with_event(*args, **kwargs):
            event = event_start(event_name, event_level)
            try:
                return func(*args, **kwargs)
            finally:
                event_end(event)

        return call_with_event

    return event_wrapper


@contextmanager
def EventGuard(event_name: str, event_level: int = 0):
    event = event_start(event_name, event_level)
    try:
        yield event
    finally:
        event_end(event)
