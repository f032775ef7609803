"""Shared fixtures and the acceptance-criteria summary hook."""

from __future__ import annotations

import pytest

from helpers import REPLAY_DIR, VirtualClock
from stockharvest.transport import FixtureReplay

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def replay() -> FixtureReplay:
    return FixtureReplay(REPLAY_DIR)


@pytest.fixture
def clock() -> VirtualClock:
    return VirtualClock()


@pytest.fixture
def no_sleep():
    slept: list[float] = []
    return slept.append


@pytest.fixture
def acceptance():
    """Record a named acceptance criterion; a summary table is printed at the end."""

    class Recorder:
        def __init__(self):
            self.name = None

        def __call__(self, name: str):
            self.name = name
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            detail = "" if exc is None else f"{exc_type.__name__}: {exc}".splitlines()[0][:120]
            _ACCEPTANCE.append((self.name, exc is None, detail))
            return False

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
