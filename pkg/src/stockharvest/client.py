"""Historical quote download: URL construction, fetching and CSV to bars."""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from decimal import ROUND_FLOOR, ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import Callable, Union
from urllib.parse import quote

from .errors import DuplicateDate, EmptyBody, EmptyHistory, PermanentFetchError, SchemaError
from .throttle import RateLimiter, RetryPolicy, get_with_retry
from .timeframe import DateRange, Interval, format_civil_date
from .transport import Transport

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://query1.finance.yahoo.com"
DEFAULT_ROUNDING = 2

REQUIRED_COLUMNS = ("Date", "Open", "High", "Low", "Close", "Adj Close", "Volume")
OUTPUT_COLUMNS = ("Date", "Open", "High", "Low", "Close", "Volume")
PRICE_COLUMNS = ("Open", "High", "Low", "Close")

# Fragments of the provider's error bodies that mean "nothing in this window".
_NO_DATA_MARKERS = ("no data found", "data doesn't exist", "data doesn’t exist")

BarTime = Union[date, datetime]


@dataclass(frozen=True)
class QuoteRequest:
    ticker: str
    range: DateRange
    interval: Interval = Interval.D1


def build_download_url(req: QuoteRequest, base: str = DEFAULT_BASE_URL) -> str:
    return (
        f"{base.rstrip('/')}/v7/finance/download/{quote(req.ticker, safe='')}"
        f"?period1={req.range.period1}&period2={req.range.period2}"
        f"&interval={req.interval.value}&events=history&includeAdjustedClose=true"
    )


def _is_no_data(body: bytes) -> bool:
    text = body[:2048].decode("utf-8", errors="replace").lower()
    return any(marker in text for marker in _NO_DATA_MARKERS)


def fetch(
    req: QuoteRequest,
    transport: Transport,
    policy: RetryPolicy | None = None,
    limiter: RateLimiter | None = None,
    *,
    base: str = DEFAULT_BASE_URL,
    user_agent: str | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> bytes:
    """Download the raw CSV for *req*.

    Raises :class:`EmptyHistory` for 404s and for the provider's "no data"
    error bodies, :class:`PermanentFetchError` for other non-retryable
    statuses and :class:`RetriesExhausted` when transient failures persist.
    """
    url = build_download_url(req, base)
    response = get_with_retry(
        url, transport, policy, limiter, user_agent=user_agent, sleep=sleep
    )
    if 200 <= response.status < 300:
        return response.body
    if response.status == 404 or _is_no_data(response.body):
        raise EmptyHistory(req.ticker, f"HTTP {response.status}: no data for {req.ticker}")
    detail = response.body[:200].decode("utf-8", errors="replace").strip()
    raise PermanentFetchError(url, response.status, detail)


@dataclass
class QuoteTable:
    """Header plus string rows, straight from the provider CSV."""

    header: list[str]
    rows: list[list[str]] = field(default_factory=list)
    dropped_rows: int = 0

    def index(self, name: str) -> int:
        try:
            return self.header.index(name)
        except ValueError:
            raise SchemaError(f"missing column {name!r} (have {self.header})") from None


def parse_quote_csv(body: bytes) -> QuoteTable:
    """Split the CSV body into header and rows.

    Rows whose field count differs from the header are dropped and counted.
    """
    text = body.decode("utf-8-sig")
    if not text.strip():
        raise EmptyBody("empty quote body")
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader)]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"quote CSV lacks {missing} (header {header})")
    table = QuoteTable(header=header)
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            table.dropped_rows += 1
            continue
        table.rows.append(row)
    return table


def substitute_adjusted_close(table: QuoteTable) -> QuoteTable:
    """Use the adjusted close as Close, dropping the raw close.

    Output columns are Date, Open, High, Low, Close, Volume followed by any
    extra provider columns in their original order.
    """
    for name in ("Close", "Adj Close"):
        table.index(name)
    source = [
        "Adj Close" if name == "Close" else name
        for name in OUTPUT_COLUMNS
    ]
    extras = [h for h in table.header if h not in OUTPUT_COLUMNS and h != "Adj Close"]
    picks = [table.index(name) for name in source + extras]
    return QuoteTable(
        header=list(OUTPUT_COLUMNS) + extras,
        rows=[[row[i] for i in picks] for row in table.rows],
        dropped_rows=table.dropped_rows,
    )


@dataclass(frozen=True)
class Bar:
    date: BarTime
    open: Decimal
    high: Decimal
    low: Decimal
    close: Decimal
    volume: int

    def ohlc_consistent(self) -> bool:
        return self.low <= min(self.open, self.close) and self.high >= max(self.open, self.close)


@dataclass
class BarSeries:
    ticker: str
    bars: list[Bar] = field(default_factory=list)
    dropped_rows: int = 0
    ohlc_warnings: int = 0

    def __len__(self) -> int:
        return len(self.bars)


def round_price(value: Decimal, places: int, rounding: str = ROUND_HALF_EVEN) -> Decimal:
    """Round on the decimal value, e.g. ``Decimal('10.125') -> 10.12``."""
    return value.quantize(Decimal(1).scaleb(-places), rounding=rounding)


def parse_bar_time(text: str) -> BarTime:
    """Daily rows carry ``yyyy-mm-dd``; intraday rows an ISO timestamp (to UTC)."""
    text = text.strip()
    if len(text) == 10:
        return date.fromisoformat(text)
    stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def format_bar_time(value: BarTime) -> str:
    if isinstance(value, datetime):
        return value.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return format_civil_date(value)


def _price(text: str) -> Decimal | None:
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        return None
    if not value.is_finite() or value < 0:
        return None
    return value


def to_bar_series(
    table: QuoteTable,
    ticker: str,
    rounding: int | None = DEFAULT_ROUNDING,
    *,
    rounding_mode: str = ROUND_HALF_EVEN,
    strict: bool = False,
) -> BarSeries:
    """Convert a substituted table into validated, date-sorted bars.

    Rows with ``null`` or unparseable cells are dropped and counted. Rows
    whose low/high do not bracket open and close are kept with a warning,
    or dropped when *strict*. Prices are rounded when *rounding* is set.
    """
    cols = [table.index(name) for name in OUTPUT_COLUMNS]
    series = BarSeries(ticker=ticker, dropped_rows=table.dropped_rows)
    seen: set[BarTime] = set()
    for row in table.rows:
        cells = [row[i] for i in cols]
        try:
            when = parse_bar_time(cells[0])
        except ValueError:
            series.dropped_rows += 1
            continue
        prices = [_price(c) for c in cells[1:5]]
        volume = _price(cells[5])
        if any(p is None for p in prices) or volume is None:
            series.dropped_rows += 1
            continue
        bar = Bar(when, *prices, int(volume.to_integral_value(rounding=ROUND_FLOOR)))
        if not bar.ohlc_consistent():
            if strict:
                log.warning("%s %s: OHLC out of range, row rejected", ticker, cells[0])
                series.dropped_rows += 1
                continue
            log.warning("%s %s: OHLC out of range, row kept", ticker, cells[0])
            series.ohlc_warnings += 1
        if when in seen:
            raise DuplicateDate(f"{ticker}: duplicate bar for {cells[0]}")
        seen.add(when)
        if rounding is not None:
            bar = Bar(
                bar.date,
                *(round_price(p, rounding, rounding_mode) for p in prices),
                bar.volume,
            )
        series.bars.append(bar)
    series.bars.sort(key=lambda b: _sort_key(b.date))
    return series


def _sort_key(value: BarTime) -> datetime:
    if isinstance(value, datetime):
        return value
    return datetime(value.year, value.month, value.day, tzinfo=timezone.utc)
