"""Test doubles: scripted transports and a virtual clock."""

from __future__ import annotations

import threading
from pathlib import Path

from stockharvest.errors import TransportError
from stockharvest.transport import Request, Response

FIXTURES = Path(__file__).parent / "fixtures"
REPLAY_DIR = FIXTURES / "replay"


class ScriptedTransport:
    """Plays back a fixed list of responses (or exceptions), one per call."""

    def __init__(self, script):
        self.script = list(script)
        self.requests: list[Request] = []
        self._lock = threading.Lock()

    def execute(self, request: Request) -> Response:
        with self._lock:
            self.requests.append(request)
            if not self.script:
                raise AssertionError(f"unexpected extra request to {request.url}")
            item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        if isinstance(item, int):
            return Response(item, b"")
        return item

    @property
    def calls(self) -> int:
        return len(self.requests)


class RoutingTransport:
    """Sends URLs containing a key to a dedicated transport, the rest to a default."""

    def __init__(self, default, routes: dict):
        self.default = default
        self.routes = routes

    def execute(self, request: Request) -> Response:
        for needle, transport in self.routes.items():
            if needle in request.url:
                return transport.execute(request)
        return self.default.execute(request)


class AlwaysStatus:
    def __init__(self, status: int):
        self.status = status
        self.calls = 0

    def execute(self, request):
        self.calls += 1
        return Response(self.status, b"Internal Server Error")


class VirtualClock:
    def __init__(self, start: float = 1000.0):
        self.now = start
        self.sleeps: list[float] = []

    def time(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.sleeps.append(seconds)
        self.now += seconds


class Unreachable:
    def execute(self, request):
        raise TransportError("ConnectionError: network unreachable")


def reference_round_half_even(text: str, places: int = 2) -> str:
    """Round a non-negative decimal string with digit arithmetic only."""
    whole, _, frac = text.partition(".")
    frac = frac.ljust(places, "0")
    keep, rest = frac[:places], frac[places:]
    scaled = int((whole or "0") + keep)
    if rest.strip("0"):
        first, tail = rest[0], rest[1:].strip("0")
        if first > "5" or (first == "5" and tail):
            scaled += 1
        elif first == "5" and scaled % 2 == 1:
            scaled += 1
    digits = str(scaled).rjust(places + 1, "0")
    return f"{digits[:-places]}.{digits[-places:]}" if places else digits
