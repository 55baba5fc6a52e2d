"""Injectable clock and id sources.

Production code uses the system clock and random UUIDs; tests inject fixed
variants so that persisted documents (timestamps, ids) are byte-stable
across runs.
"""

from __future__ import annotations

import uuid
from datetime import datetime, timedelta, timezone


def rfc3339(dt: datetime) -> str:
    """Format an aware datetime as RFC3339 with second precision."""
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class SystemClock:
    def now(self) -> str:
        return rfc3339(datetime.now(timezone.utc))


class FixedClock:
    """Deterministic clock: starts at `start` and advances `step` per call."""

    def __init__(self, start: str = "2025-01-01T00:00:00Z", step_seconds: int = 1):
        self._t = datetime.strptime(start, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
        self._step = timedelta(seconds=step_seconds)

    def now(self) -> str:
        current = self._t
        self._t = self._t + self._step
        return rfc3339(current)


class UuidIds:
    def new(self, kind: str) -> str:
        return f"{kind}-{uuid.uuid4().hex[:12]}"


class SequentialIds:
    """Deterministic ids like ``prj-0001``, counted per kind."""

    def __init__(self):
        self._counters: dict[str, int] = {}

    def new(self, kind: str) -> str:
        n = self._counters.get(kind, 0) + 1
        self._counters[kind] = n
        return f"{kind}-{n:04d}"
