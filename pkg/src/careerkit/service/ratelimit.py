"""Per-user sliding-window rate limiting (100 requests / 60 s)."""

from __future__ import annotations

import threading
import time
from collections import defaultdict, deque

LIMIT = 100
WINDOW_S = 60.0


class SlidingWindowLimiter:
    """Keeps the timestamps of accepted requests per user; a request is
    admitted only if fewer than `limit` were accepted in the trailing
    window. Thread-safe; the clock is injectable for tests."""

    def __init__(self, limit: int = LIMIT, window_s: float = WINDOW_S, clock=time.monotonic):
        self.limit = limit
        self.window_s = window_s
        self.clock = clock
        self._lock = threading.Lock()
        self._events: dict[str, deque[float]] = defaultdict(deque)

    def check(self, key: str) -> tuple[bool, float]:
        """Returns (allowed, retry_after_seconds)."""
        now = self.clock()
        with self._lock:
            events = self._events[key]
            cutoff = now - self.window_s
            while events and events[0] <= cutoff:
                events.popleft()
            if len(events) < self.limit:
                events.append(now)
                return True, 0.0
            return False, max(0.0, events[0] + self.window_s - now)
