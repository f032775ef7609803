"""Bar intervals, civil dates and the epoch-second window sent to the provider.

All conversions are done in UTC on the proleptic Gregorian calendar; leap
seconds are ignored, matching POSIX timestamps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from enum import Enum

from .errors import BadDateFormat, EmptyRange, InvalidCalendarDate, UnknownInterval

SECONDS_PER_DAY = 86_400
_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()
_DATE_RE = re.compile(r"(\d{4})-(\d{2})-(\d{2})\Z")

# End of the requested day; keeps the end date inclusive.
END_OF_DAY = (23, 59, 0)


class Interval(str, Enum):
    M1 = "1m"
    M2 = "2m"
    M5 = "5m"
    M15 = "15m"
    M30 = "30m"
    M60 = "60m"
    M90 = "90m"
    H1 = "1h"
    D1 = "1d"
    D5 = "5d"
    WK1 = "1wk"
    MO1 = "1mo"
    MO3 = "3mo"

    def __str__(self) -> str:
        return self.value

    @property
    def intraday(self) -> bool:
        return self.value[-1] in "mh"


DEFAULT_INTERVAL = Interval.D1


def parse_interval(text: str) -> Interval:
    """Exact match against the provider's interval tokens (no aliases)."""
    try:
        return Interval(text)
    except ValueError:
        raise UnknownInterval(
            f"unknown interval {text!r}; expected one of "
            + ", ".join(i.value for i in Interval)
        ) from None


def parse_civil_date(text: str) -> date:
    m = _DATE_RE.match(text)
    if not m:
        raise BadDateFormat(f"expected yyyy-mm-dd, got {text!r}")
    year, month, day = (int(g) for g in m.groups())
    try:
        return date(year, month, day)
    except ValueError as exc:
        raise InvalidCalendarDate(f"{text}: {exc}") from None


def format_civil_date(d: date) -> str:
    return f"{d.year:04d}-{d.month:02d}-{d.day:02d}"


def to_epoch_seconds(d: date, hh: int = 0, mm: int = 0, ss: int = 0) -> int:
    """Seconds since 1970-01-01T00:00:00Z for the given UTC civil instant."""
    if not (0 <= hh < 24 and 0 <= mm < 60 and 0 <= ss < 60):
        raise ValueError(f"time of day out of range: {hh:02d}:{mm:02d}:{ss:02d}")
    days = d.toordinal() - _EPOCH_ORDINAL
    return days * SECONDS_PER_DAY + hh * 3600 + mm * 60 + ss


@dataclass(frozen=True)
class DateRange:
    """Query window: start day at 00:00:00 UTC through end day at 23:59:00 UTC."""

    start: date
    end: date
    period1: int
    period2: int

    def __str__(self) -> str:
        return f"{format_civil_date(self.start)}..{format_civil_date(self.end)}"


def make_range(start: date, end: date) -> DateRange:
    if start > end:
        raise EmptyRange(f"start {start} is after end {end}")
    return DateRange(
        start=start,
        end=end,
        period1=to_epoch_seconds(start),
        period2=to_epoch_seconds(end, *END_OF_DAY),
    )
