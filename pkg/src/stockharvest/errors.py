"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class HarvestError(Exception):
    """Base class for all errors raised by stockharvest."""


# --- constituents -----------------------------------------------------------

class ConstituentError(HarvestError):
    pass


class MalformedHtml(ConstituentError):
    pass


class ColumnNotFound(ConstituentError):
    pass


class CsvParseError(ConstituentError):
    pass


class InvalidSymbol(ConstituentError, ValueError):
    pass


class EmptyConstituentList(ConstituentError):
    pass


# --- timeframe --------------------------------------------------------------

class TimeframeError(HarvestError, ValueError):
    pass


class UnknownInterval(TimeframeError):
    pass


class BadDateFormat(TimeframeError):
    pass


class InvalidCalendarDate(TimeframeError):
    pass


class EmptyRange(TimeframeError):
    pass


# --- fetching ---------------------------------------------------------------

class FetchError(HarvestError):
    pass


class TransportError(FetchError):
    """Network-level failure (connection refused, timeout, DNS...). Retryable."""


class FixtureMiss(FetchError):
    """Replay transport has no recording for the requested URL."""

    def __init__(self, url: str):
        super().__init__(f"no fixture recorded for {url}")
        self.url = url


class PermanentFetchError(FetchError):
    def __init__(self, url: str, status: int, detail: str = ""):
        msg = f"HTTP {status} for {url}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.url = url
        self.status = status


class RetriesExhausted(FetchError):
    def __init__(self, url: str, attempts: int, last: str):
        super().__init__(f"gave up on {url} after {attempts} attempts ({last})")
        self.url = url
        self.attempts = attempts
        self.last = last


class EmptyHistory(HarvestError):
    """The provider has no bars for the ticker in the requested window.

    This is a skip, not a failure: the run counts it and moves on.
    """

    def __init__(self, ticker: str, detail: str = ""):
        super().__init__(detail or f"no history for {ticker}")
        self.ticker = ticker


# --- quote parsing ----------------------------------------------------------

class DataError(HarvestError):
    pass


class SchemaError(DataError):
    pass


class EmptyBody(DataError):
    pass


class DuplicateDate(DataError):
    pass


# --- sink / cli -------------------------------------------------------------

class SinkError(HarvestError, OSError):
    pass


class DirectoryExists(SinkError):
    pass


class UsageError(HarvestError):
    pass
