"""Command-line entry point: constituents -> per-ticker downloads -> CSV dataset.

Exit codes: 0 when every ticker was collected or skipped as empty, 1 on a
fatal setup error (bad arguments, constituent list unavailable, output
directory problem), 2 when at least one ticker failed to download.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Callable, TextIO

from . import __version__
from .client import (
    DEFAULT_BASE_URL,
    DEFAULT_ROUNDING,
    QuoteRequest,
    fetch,
    parse_quote_csv,
    substitute_adjusted_close,
    to_bar_series,
)
from .constituents import IndexSource, SourceKind, load_constituents
from .errors import (
    DataError,
    EmptyBody,
    EmptyHistory,
    FetchError,
    HarvestError,
    SinkError,
    TimeframeError,
    UsageError,
)
from .registry import load_registry, resolve_index
from .sink import (
    Clobber,
    FetchSummary,
    Outcome,
    SinkConfig,
    TickerOutcome,
    prepare_directory,
    write_summary,
    write_ticker_csv,
)
from .throttle import RateLimiter, RetryPolicy
from .timeframe import DEFAULT_INTERVAL, DateRange, Interval, make_range, parse_civil_date, parse_interval
from .transport import Transport, default_user_agent, make_transport

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2
EXIT_INTERRUPTED = 130

SKIP_MESSAGE = "didn't exist in this entire time period"


@dataclass
class RunConfig:
    index_name: str
    source: IndexSource
    start: date
    end: date
    interval: Interval = DEFAULT_INTERVAL
    out_dir: Path = Path("data_stocks")
    overwrite: bool = False
    rounding: int | None = DEFAULT_ROUNDING
    concurrency: int = 4
    rate_limit: float = 2.0
    transport: str = "live"
    strict: bool = False
    quiet: bool = False
    base_url: str = DEFAULT_BASE_URL
    user_agent: str = field(default_factory=default_user_agent)
    retry: RetryPolicy = field(default_factory=RetryPolicy)

    @property
    def range(self) -> DateRange:
        return make_range(self.start, self.end)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="stockharvest",
        description="Download daily/weekly/monthly OHLCV history for every member of a stock index.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--index", help="built-in index: sp500, nasdaq100 or nasdaq-all")
    src.add_argument("--symbols", help="comma-separated tickers, e.g. AAPL,MSFT")
    src.add_argument("--symbols-file", help="file with one ticker per line (# comments allowed)")
    src.add_argument("--source-url", help="HTML page or .csv URL listing the tickers")
    p.add_argument("--column", help="header of the symbol column for --source-url (default Symbol)")
    p.add_argument("--table-hint", type=int, help="table position to try if no header matches")
    p.add_argument("--config", help="JSON file overriding built-in index definitions")
    p.add_argument("--start", required=True, help="first day, yyyy-mm-dd")
    p.add_argument("--end", required=True, help="last day (inclusive), yyyy-mm-dd")
    p.add_argument("--interval", default=DEFAULT_INTERVAL.value,
                   help="bar size: " + ", ".join(i.value for i in Interval) + " (default 1d)")
    p.add_argument("--out", help="output directory (default data_<index>stocks)")
    p.add_argument("--overwrite", action="store_true", help="delete and recreate an existing output directory")
    rnd = p.add_mutually_exclusive_group()
    rnd.add_argument("--no-round", action="store_true", help="keep prices exactly as served")
    rnd.add_argument("--round-places", type=int, default=DEFAULT_ROUNDING, metavar="N",
                     help="decimal places for prices, half-even (default 2)")
    p.add_argument("--concurrency", type=int, default=4, metavar="N", help="parallel downloads (default 4)")
    p.add_argument("--rate-limit", type=float, default=2.0, metavar="R", help="max requests per second")
    p.add_argument("--transport", default="live", help="live, replay:PATH or record:PATH")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL, help=argparse.SUPPRESS)
    p.add_argument("--strict", action="store_true",
                   help="reject malformed rows/symbols instead of warning")
    p.add_argument("--quiet", action="store_true", help="only print the final summary line")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def parse_args(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    try:
        start = parse_civil_date(args.start)
        end = parse_civil_date(args.end)
        make_range(start, end)
        interval = parse_interval(args.interval)
    except TimeframeError as exc:
        raise UsageError(str(exc)) from None
    if args.concurrency < 1:
        raise UsageError("--concurrency must be at least 1")
    if not args.rate_limit > 0:
        raise UsageError("--rate-limit must be positive")
    if args.round_places < 0:
        raise UsageError("--round-places must be non-negative")
    try:
        make_transport(args.transport)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    if args.index:
        try:
            index_name, source = resolve_index(args.index, load_registry(args.config))
        except (KeyError, ValueError, OSError) as exc:
            raise UsageError(str(exc.args[0] if isinstance(exc, KeyError) else exc)) from None
        default_out = f"data_{index_name}stocks"
    elif args.symbols:
        index_name, source = "inline", IndexSource(SourceKind.INLINE_LIST, args.symbols)
        default_out = "data_stocks"
    elif args.symbols_file:
        index_name, source = "file", IndexSource(SourceKind.LOCAL_FILE, args.symbols_file)
        default_out = "data_stocks"
    else:
        kind = SourceKind.REMOTE_CSV if args.source_url.lower().endswith(".csv") else SourceKind.HTML_TABLE
        index_name = "custom"
        source = IndexSource(kind, args.source_url, args.column or "Symbol", table_hint=args.table_hint)
        default_out = "data_stocks"

    return RunConfig(
        index_name=index_name,
        source=source,
        start=start,
        end=end,
        interval=interval,
        out_dir=Path(args.out or default_out),
        overwrite=args.overwrite,
        rounding=None if args.no_round else args.round_places,
        concurrency=args.concurrency,
        rate_limit=args.rate_limit,
        transport=args.transport,
        strict=args.strict,
        quiet=args.quiet,
        base_url=args.base_url,
    )


class ProgressReporter:
    """One console line per finished ticker, then a totals line."""

    def __init__(self, stream: TextIO | None = None, quiet: bool = False):
        self.stream = stream if stream is not None else sys.stdout
        self.quiet = quiet

    @staticmethod
    def format_outcome(result: TickerOutcome) -> str:
        if result.outcome is Outcome.COLLECTED:
            line = f"{result.ticker}: collected {result.rows} rows"
            if result.dropped_rows:
                line += f" ({result.dropped_rows} dropped)"
            return line
        if result.outcome is Outcome.IGNORED:
            return f"{result.ticker}: skipped, {SKIP_MESSAGE}"
        return f"{result.ticker}: failed: {result.reason}"

    @staticmethod
    def format_total(summary: FetchSummary) -> str:
        return (
            f"Companies collected: {summary.collected} of {summary.requested}"
            f" (ignored {summary.ignored_empty}, failed {summary.failed})"
        )

    def ticker(self, result: TickerOutcome) -> None:
        if not self.quiet:
            print(self.format_outcome(result), file=self.stream, flush=True)

    def total(self, summary: FetchSummary) -> None:
        print(self.format_total(summary), file=self.stream, flush=True)


def collect_ticker(
    ticker: str,
    cfg: RunConfig,
    transport: Transport,
    limiter: RateLimiter,
    out_dir: Path,
    sleep: Callable[[float], None] = time.sleep,
) -> TickerOutcome:
    """Fetch, clean and write one ticker; never raises for per-ticker problems."""
    req = QuoteRequest(ticker, cfg.range, cfg.interval)
    try:
        body = fetch(
            req, transport, cfg.retry, limiter,
            base=cfg.base_url, user_agent=cfg.user_agent, sleep=sleep,
        )
        table = substitute_adjusted_close(parse_quote_csv(body))
        series = to_bar_series(table, ticker, cfg.rounding, strict=cfg.strict)
    except (EmptyHistory, EmptyBody):
        return TickerOutcome(ticker, Outcome.IGNORED)
    except (FetchError, DataError, UnicodeDecodeError) as exc:
        return TickerOutcome(ticker, Outcome.FAILED, reason=str(exc))
    if not series.bars:
        return TickerOutcome(ticker, Outcome.IGNORED, dropped_rows=series.dropped_rows)
    try:
        write_ticker_csv(series, out_dir, cfg.rounding)
    except SinkError as exc:
        return TickerOutcome(ticker, Outcome.FAILED, dropped_rows=series.dropped_rows, reason=str(exc))
    return TickerOutcome(ticker, Outcome.COLLECTED, rows=len(series.bars), dropped_rows=series.dropped_rows)


def run(
    cfg: RunConfig,
    transport: Transport | None = None,
    *,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
    sleep: Callable[[float], None] = time.sleep,
    clock: Callable[[], float] = time.monotonic,
) -> tuple[FetchSummary | None, int]:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    transport = transport if transport is not None else make_transport(cfg.transport)
    reporter = ProgressReporter(stdout, cfg.quiet)

    try:
        constituents = load_constituents(
            cfg.source, transport, index_name=cfg.index_name, strict=cfg.strict, policy=cfg.retry
        )
    except (HarvestError, OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot load constituents for {cfg.index_name}: {exc}", file=stderr)
        return None, EXIT_FATAL
    try:
        out_dir = prepare_directory(
            SinkConfig(cfg.out_dir, Clobber.RECREATE if cfg.overwrite else Clobber.REFUSE, cfg.rounding)
        )
    except SinkError as exc:
        print(f"error: {exc}", file=stderr)
        return None, EXIT_FATAL

    summary = FetchSummary.for_tickers(constituents.tickers)
    limiter = RateLimiter(cfg.rate_limit, clock=clock, sleep=sleep)
    interrupted = False
    futures: list[Future] = []
    pool = ThreadPoolExecutor(max_workers=cfg.concurrency, thread_name_prefix="fetch")
    try:
        futures = [
            pool.submit(collect_ticker, t, cfg, transport, limiter, out_dir, sleep)
            for t in constituents.tickers
        ]
        # Report in submission order so console output does not depend on timing.
        for fut in futures:
            result = fut.result()
            summary.record(result)
            reporter.ticker(result)
    except KeyboardInterrupt:
        interrupted = True
        print("interrupted; finishing in-flight downloads", file=stderr)
        pool.shutdown(wait=True, cancel_futures=True)
        for fut in futures:
            if fut.done() and not fut.cancelled() and fut.exception() is None:
                summary.record(fut.result())
        summary.mark_unfinished("interrupted")
    finally:
        pool.shutdown(wait=True)

    metadata = {
        "index": cfg.index_name,
        "source": cfg.source.locator if cfg.source.kind is not SourceKind.INLINE_LIST else "inline",
        "start": cfg.start.isoformat(),
        "end": cfg.end.isoformat(),
        "period1": cfg.range.period1,
        "period2": cfg.range.period2,
        "interval": cfg.interval.value,
        "rounding": cfg.rounding,
        "tool_version": __version__,
        "constituents_retrieved_at": constituents.retrieved_at.isoformat(timespec="seconds"),
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    try:
        write_summary(summary, out_dir, metadata)
    except SinkError as exc:
        print(f"error: {exc}", file=stderr)
    reporter.total(summary)

    if interrupted:
        return summary, EXIT_INTERRUPTED
    return summary, EXIT_OK if summary.failed == 0 else EXIT_PARTIAL


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"stockharvest: error: {exc}", file=sys.stderr)
        print("run 'stockharvest --help' for usage", file=sys.stderr)
        return EXIT_FATAL
    _, code = run(cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
