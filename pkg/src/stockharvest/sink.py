"""Output directory management, per-ticker CSV files and the run summary."""

from __future__ import annotations

import csv
import json
import os
import shutil
import tempfile
import threading
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .client import Bar, BarSeries, format_bar_time, parse_bar_time
from .errors import DirectoryExists, SinkError

CSV_HEADER = ("Date", "Open", "High", "Low", "Close", "Volume", "Name")
SUMMARY_NAME = "_summary.json"


class Clobber(str, Enum):
    REFUSE = "refuse"
    RECREATE = "recreate"


@dataclass(frozen=True)
class SinkConfig:
    directory: Path
    clobber: Clobber = Clobber.REFUSE
    rounding_places: int | None = 2

    def __post_init__(self):
        if not str(self.directory):
            raise ValueError("output directory must be non-empty")


def prepare_directory(cfg: SinkConfig) -> Path:
    path = Path(cfg.directory)
    try:
        if path.exists():
            if not path.is_dir():
                raise SinkError(f"{path} exists and is not a directory")
            if cfg.clobber is Clobber.RECREATE:
                shutil.rmtree(path)
            elif any(path.iterdir()):
                raise DirectoryExists(f"{path} exists and is not empty (use --overwrite)")
        path.mkdir(parents=True, exist_ok=True)
    except SinkError:
        raise
    except OSError as exc:
        raise SinkError(f"cannot prepare {path}: {exc}") from exc
    return path


def format_price(value: Decimal, places: int | None) -> str:
    if places is not None:
        return f"{value:.{places}f}"
    # shortest exact form, never in exponent notation
    return format(value.normalize(), "f")


def write_ticker_csv(series: BarSeries, directory: str | Path, rounding_places: int | None = 2) -> Path:
    """Write ``{directory}/{TICKER}.csv`` atomically and return its path."""
    if not series.bars:
        raise ValueError(f"refusing to write empty series for {series.ticker}")
    directory = Path(directory)
    target = directory / f"{series.ticker}.csv"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{series.ticker}.", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for bar in series.bars:
                writer.writerow(
                    [
                        format_bar_time(bar.date),
                        *(format_price(p, rounding_places) for p in (bar.open, bar.high, bar.low, bar.close)),
                        str(bar.volume),
                        series.ticker,
                    ]
                )
        os.replace(tmp, target)
    except BaseException as exc:
        Path(tmp).unlink(missing_ok=True)
        if isinstance(exc, OSError):
            raise SinkError(f"cannot write {target}: {exc}") from exc
        raise
    return target


def read_ticker_csv(path: str | Path) -> BarSeries:
    """Load a file produced by :func:`write_ticker_csv` back into bars."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        bars = []
        ticker = path.stem
        for row in reader:
            ticker = row[6]
            bars.append(
                Bar(parse_bar_time(row[0]), *(Decimal(v) for v in row[1:5]), int(row[5]))
            )
    return BarSeries(ticker=ticker, bars=bars)


class Outcome(str, Enum):
    COLLECTED = "collected"
    IGNORED = "ignored"
    FAILED = "failed"


@dataclass(frozen=True)
class TickerOutcome:
    ticker: str
    outcome: Outcome
    rows: int = 0
    dropped_rows: int = 0
    reason: str | None = None

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"outcome": self.outcome.value}
        if self.outcome is Outcome.COLLECTED:
            out["rows"] = self.rows
        if self.dropped_rows:
            out["dropped_rows"] = self.dropped_rows
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class FetchSummary:
    """Per-run outcome ledger; safe to update from worker threads."""

    tickers: list[str] = field(default_factory=list)
    per_ticker: dict[str, TickerOutcome] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @classmethod
    def for_tickers(cls, tickers: Iterable[str]) -> "FetchSummary":
        return cls(tickers=list(tickers))

    def record(self, result: TickerOutcome) -> None:
        with self._lock:
            if result.ticker not in self.tickers:
                self.tickers.append(result.ticker)
            self.per_ticker[result.ticker] = result

    def mark_unfinished(self, reason: str) -> None:
        """Count every ticker without an outcome as failed (used on abort)."""
        with self._lock:
            for ticker in self.tickers:
                if ticker not in self.per_ticker:
                    self.per_ticker[ticker] = TickerOutcome(ticker, Outcome.FAILED, reason=reason)

    def _count(self, outcome: Outcome) -> int:
        return sum(1 for r in self.per_ticker.values() if r.outcome is outcome)

    @property
    def requested(self) -> int:
        return len(self.tickers)

    @property
    def collected(self) -> int:
        return self._count(Outcome.COLLECTED)

    @property
    def ignored_empty(self) -> int:
        return self._count(Outcome.IGNORED)

    @property
    def failed(self) -> int:
        return self._count(Outcome.FAILED)

    @property
    def dropped_rows_total(self) -> int:
        return sum(r.dropped_rows for r in self.per_ticker.values())

    def as_dict(self) -> dict[str, Any]:
        with self._lock:
            return {
                "requested": self.requested,
                "collected": self.collected,
                "ignored_empty": self.ignored_empty,
                "failed": self.failed,
                "dropped_rows_total": self.dropped_rows_total,
                "per_ticker": {
                    t: self.per_ticker[t].as_dict() for t in self.tickers if t in self.per_ticker
                },
            }


def write_summary(
    summary: FetchSummary, directory: str | Path, metadata: dict[str, Any] | None = None
) -> Path:
    doc = summary.as_dict()
    doc["run"] = metadata or {}
    target = Path(directory) / SUMMARY_NAME
    try:
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".summary.", suffix=".part")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, target)
    except OSError as exc:
        raise SinkError(f"cannot write {target}: {exc}") from exc
    return target
