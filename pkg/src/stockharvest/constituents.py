"""Index membership: scrape, read and normalize ticker lists."""

from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    ColumnNotFound,
    CsvParseError,
    EmptyConstituentList,
    InvalidSymbol,
    PermanentFetchError,
)
from .htmltables import extract_tables, select_symbol_column
from .throttle import RetryPolicy, get_with_retry
from .transport import Transport

log = logging.getLogger(__name__)

TICKER_RE = re.compile(r"[A-Z0-9][A-Z0-9.-]*\Z")

# Wikipedia writes class shares with a dot, the quote provider with a dash.
CLASS_SHARE_OVERRIDES: Mapping[str, str] = {"BRK.B": "BRK-B", "BF.B": "BF-B"}


class SourceKind(str, Enum):
    HTML_TABLE = "html"
    REMOTE_CSV = "csv"
    LOCAL_FILE = "file"
    INLINE_LIST = "inline"


@dataclass(frozen=True)
class IndexSource:
    kind: SourceKind
    locator: str
    column: str = ""
    table_hint: int | None = None
    overrides: Mapping[str, str] = field(default_factory=lambda: dict(CLASS_SHARE_OVERRIDES))

    def __post_init__(self):
        if self.kind in (SourceKind.HTML_TABLE, SourceKind.REMOTE_CSV) and not self.column:
            raise ValueError(f"{self.kind.value} source needs a column name")


@dataclass
class ConstituentList:
    index_name: str
    tickers: list[str]
    retrieved_at: datetime
    source: IndexSource

    def __len__(self) -> int:
        return len(self.tickers)


def normalize_symbol(raw: str, overrides: Mapping[str, str] = CLASS_SHARE_OVERRIDES) -> str:
    """Map a scraped symbol to the provider's convention.

    >>> normalize_symbol("brk.b")
    'BRK-B'
    """
    text = raw.strip().upper()
    if not text:
        raise InvalidSymbol("empty symbol")
    if text in overrides:
        ticker = overrides[text]
    else:
        ticker = text.replace(".", "-")
    if not TICKER_RE.match(ticker):
        raise InvalidSymbol(f"{raw!r} does not normalize to a valid ticker ({ticker!r})")
    return ticker


def dedupe(tickers: Iterable[str]) -> list[str]:
    return list(dict.fromkeys(tickers))


def read_symbol_csv(text: str, column: str, strict: bool = False) -> tuple[list[str], int]:
    """Values of *column* in file order plus the number of ragged rows skipped."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ColumnNotFound(f"CSV is empty; no {column!r} column") from None
    header = [h.strip() for h in header]
    if column not in header:
        raise ColumnNotFound(f"CSV header {header} has no {column!r} column")
    idx = header.index(column)
    symbols: list[str] = []
    skipped = 0
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            if strict:
                raise CsvParseError(
                    f"line {lineno}: {len(row)} fields, header has {len(header)}"
                )
            skipped += 1
            continue
        value = row[idx].strip()
        if value:
            symbols.append(value)
    return symbols, skipped


def _download_text(url: str, transport: Transport, policy: RetryPolicy | None) -> str:
    response = get_with_retry(url, transport, policy)
    if not 200 <= response.status < 300:
        raise PermanentFetchError(url, response.status)
    return response.body.decode("utf-8")


def fetch_remote_csv(
    url: str,
    column: str,
    transport: Transport,
    *,
    strict: bool = False,
    policy: RetryPolicy | None = None,
) -> list[str]:
    symbols, skipped = read_symbol_csv(_download_text(url, transport, policy), column, strict)
    if skipped:
        log.warning("%s: skipped %d malformed CSV rows", url, skipped)
    return symbols


def read_ticker_file(path: str | Path) -> list[str]:
    """One symbol per line; ``#`` starts a comment, blank lines are ignored."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        symbol = line.split("#", 1)[0].strip()
        if symbol:
            out.append(symbol)
    return out


def load_constituents(
    source: IndexSource,
    transport: Transport | None = None,
    *,
    index_name: str = "custom",
    strict: bool = False,
    policy: RetryPolicy | None = None,
) -> ConstituentList:
    if source.kind is SourceKind.HTML_TABLE:
        html = _download_text(source.locator, transport, policy)
        raw = select_symbol_column(extract_tables(html), source.column, source.table_hint)
    elif source.kind is SourceKind.REMOTE_CSV:
        raw = fetch_remote_csv(
            source.locator, source.column, transport, strict=strict, policy=policy
        )
    elif source.kind is SourceKind.LOCAL_FILE:
        raw = read_ticker_file(source.locator)
    else:
        raw = [s for s in (p.strip() for p in source.locator.split(",")) if s]

    tickers = []
    for symbol in raw:
        try:
            tickers.append(normalize_symbol(symbol, source.overrides))
        except InvalidSymbol as exc:
            if strict:
                raise
            log.warning("skipping symbol: %s", exc)
    tickers = dedupe(tickers)
    if not tickers:
        raise EmptyConstituentList(f"no usable tickers from {source.kind.value} source {source.locator}")
    return ConstituentList(
        index_name=index_name,
        tickers=tickers,
        retrieved_at=datetime.now(timezone.utc),
        source=source,
    )
