"""Retry policy, per-host rate limiting and the retrying GET built on them."""

from __future__ import annotations

import logging
import math
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable
from urllib.parse import urlsplit

from .errors import FixtureMiss, RetriesExhausted, TransportError
from .transport import Request, Response, Transport, default_user_agent

log = logging.getLogger(__name__)

RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 4
    base_delay: float = 0.5
    multiplier: float = 2.0
    max_delay: float = 8.0

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.multiplier < 1:
            raise ValueError("multiplier must be >= 1")
        if self.base_delay < 0 or self.max_delay < 0:
            raise ValueError("delays must be non-negative")

    def delay(self, retry: int) -> float:
        """Backoff before retry number *retry* (1 = first retry)."""
        return min(self.base_delay * self.multiplier ** (retry - 1), self.max_delay)


class RateLimiter:
    """Caps request starts per host at *rate* per second.

    Consecutive requests to one host are spaced at least ``1/rate`` apart, and
    no half-open one-second window ever holds more than ``ceil(rate)`` of
    them. Slots are reserved under a lock and slept on outside it, so the
    limiter can be shared by worker threads. ``clock`` and ``sleep`` are
    injectable for tests.
    """

    def __init__(
        self,
        rate: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if not rate > 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.burst = math.ceil(rate)
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._history: dict[str, deque[float]] = {}

    def reserve(self, host: str) -> float:
        """Claim the next slot for *host*; returns how long to wait for it."""
        with self._lock:
            now = self._clock()
            recent = self._history.setdefault(host, deque(maxlen=self.burst))
            slot = now
            if recent:
                slot = max(slot, recent[-1] + 1.0 / self.rate)
            if len(recent) == self.burst:
                slot = max(slot, recent[0] + 1.0)
            recent.append(slot)
            return slot - now

    def acquire(self, host: str) -> None:
        wait = self.reserve(host)
        if wait > 0:
            self._sleep(wait)


def _retry_after(response: Response) -> float | None:
    value = response.header("Retry-After")
    if value is None:
        return None
    try:
        seconds = float(value)
    except ValueError:
        return None  # HTTP-date form is not worth supporting for this provider
    return max(seconds, 0.0)


def get_with_retry(
    url: str,
    transport: Transport,
    policy: RetryPolicy | None = None,
    limiter: RateLimiter | None = None,
    *,
    user_agent: str | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> Response:
    """GET *url*, retrying 429/5xx and transport errors with backoff.

    Returns the first non-retryable response (any status; the caller
    classifies it). Raises :class:`RetriesExhausted` once ``max_attempts``
    executions have failed transiently. A ``Retry-After`` header lengthens
    the wait but never shortens it below the policy's backoff.
    """
    policy = policy or RetryPolicy()
    request = Request(url=url, headers={"User-Agent": user_agent or default_user_agent()})
    host = urlsplit(url).netloc
    last = ""
    for attempt in range(1, policy.max_attempts + 1):
        if limiter is not None:
            limiter.acquire(host)
        hint = None
        try:
            response = transport.execute(request)
        except FixtureMiss:
            raise
        except TransportError as exc:
            last = str(exc)
        else:
            if response.status not in RETRYABLE_STATUSES:
                return response
            last = f"HTTP {response.status}"
            hint = _retry_after(response)
        if attempt == policy.max_attempts:
            break
        wait = policy.delay(attempt)
        if hint is not None:
            wait = max(wait, hint)
        log.debug("retrying %s in %.2fs after %s (attempt %d)", url, wait, last, attempt)
        sleep(wait)
    raise RetriesExhausted(url, policy.max_attempts, last)
