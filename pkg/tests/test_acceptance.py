"""Acceptance criteria, one test each. A PASS/FAIL table is printed at the end of the run."""

import io
import json
import logging
import random
import time
from datetime import date, timedelta
from decimal import Decimal

import pytest

from helpers import REPLAY_DIR, AlwaysStatus, RoutingTransport, ScriptedTransport, reference_round_half_even
from stockharvest.cli import EXIT_FATAL, EXIT_OK, EXIT_PARTIAL, main, parse_args, run
from stockharvest.client import QuoteRequest, QuoteTable, build_download_url, fetch, round_price, substitute_adjusted_close
from stockharvest.constituents import fetch_remote_csv, load_constituents
from stockharvest.errors import RetriesExhausted
from stockharvest.registry import BUILTIN_INDEXES, NASDAQ_LISTED_URL
from stockharvest.sink import CSV_HEADER, SUMMARY_NAME
from stockharvest.throttle import RetryPolicy
from stockharvest.timeframe import END_OF_DAY, Interval, make_range, to_epoch_seconds
from stockharvest.transport import FixtureReplay, Response

SEED = 20240601
REPLAY = f"replay:{REPLAY_DIR}"
E2E_SYMBOLS = "AAPL,MSFT,BRK-B,ZZZZ,OLDCO"
E2E_WINDOW = ["--start", "2020-01-01", "--end", "2020-03-31"]


def day_count_oracle(d, hh=0, mm=0, ss=0):
    """Brute force: walk whole years, then whole months, then days."""
    days = 0
    for y in range(1970, d.year):
        days += 366 if (y % 4 == 0 and y % 100 != 0) or y % 400 == 0 else 365
    month_len = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
    if (d.year % 4 == 0 and d.year % 100 != 0) or d.year % 400 == 0:
        month_len[1] = 29
    days += sum(month_len[: d.month - 1]) + d.day - 1
    return days * 86400 + hh * 3600 + mm * 60 + ss


def test_ac1_sp500_constituents(acceptance, replay):
    with acceptance("AC1 S&P 500 fixture yields 503 normalized tickers in < 1 s"):
        t0 = time.perf_counter()
        result = load_constituents(BUILTIN_INDEXES["sp500"], replay, index_name="sp500")
        elapsed = time.perf_counter() - t0
        assert len(result) == 503
        assert "BRK-B" in result.tickers and "BF-B" in result.tickers
        assert not [t for t in result.tickers if "." in t]
        assert elapsed < 1.0, elapsed


def test_ac2_nasdaq_listed(acceptance, replay):
    with acceptance("AC2 datahub fixture yields 2967 symbols in < 1 s"):
        t0 = time.perf_counter()
        symbols = fetch_remote_csv(NASDAQ_LISTED_URL, "Symbol", replay)
        elapsed = time.perf_counter() - t0
        assert len(symbols) == 2967
        assert elapsed < 1.0, elapsed


def test_ac3_epoch_oracle(acceptance):
    with acceptance("AC3 epoch seconds match a day-counting oracle on 1000 dates"):
        rng = random.Random(SEED)
        lo, hi = date(1970, 1, 1).toordinal(), date(2100, 12, 31).toordinal()
        for _ in range(1000):
            d = date.fromordinal(rng.randint(lo, hi))
            hh, mm, ss = rng.randrange(24), rng.randrange(60), rng.randrange(60)
            assert to_epoch_seconds(d, hh, mm, ss) == day_count_oracle(d, hh, mm, ss), d
        assert to_epoch_seconds(date(1970, 1, 1)) == 0
        assert to_epoch_seconds(date(2020, 12, 31), *END_OF_DAY) == day_count_oracle(date(2020, 12, 31), 23, 59) == 1609459140


def test_ac4_url_golden(acceptance):
    with acceptance("AC4 download URL golden string"):
        rng = make_range(date(2018, 1, 1), date(2022, 12, 31))
        url = build_download_url(QuoteRequest("AAPL", rng, Interval.D1))
        assert url == (
            "https://query1.finance.yahoo.com/v7/finance/download/AAPL"
            "?period1=1514764800&period2=1672531140&interval=1d"
            "&events=history&includeAdjustedClose=true"
        )


def _random_table(rng):
    columns = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]
    rng.shuffle(columns)
    rows = []
    start = date(2000, 1, 1) + timedelta(days=rng.randrange(8000))
    for i in range(rng.randrange(0, 40)):
        cell = {c: f"{rng.uniform(0, 5000):.{rng.randrange(7)}f}" for c in columns}
        cell["Date"] = (start + timedelta(days=i)).isoformat()
        cell["Volume"] = str(rng.randrange(10**9))
        rows.append([cell[c] for c in columns])
    return QuoteTable(columns, rows)


def test_ac5_adjusted_close_substitution(acceptance):
    with acceptance("AC5 Close replaced by Adj Close on 500 random tables"):
        rng = random.Random(SEED)
        for _ in range(500):
            before = _random_table(rng)
            after = substitute_adjusted_close(before)
            assert len(after.rows) == len(before.rows)
            assert after.header == ["Date", "Open", "High", "Low", "Close", "Volume"]
            for old, new in zip(before.rows, after.rows):
                src = dict(zip(before.header, old))
                out = dict(zip(after.header, new))
                assert out["Close"] == src["Adj Close"]
                for col in ("Date", "Open", "High", "Low", "Volume"):
                    assert out[col] == src[col]


def test_ac6_rounding(acceptance):
    with acceptance("AC6 half-even rounding idempotent and matches reference on 10000 prices"):
        rng = random.Random(SEED)
        for _ in range(10_000):
            frac = "".join(rng.choice("0123456789") for _ in range(rng.randrange(0, 8)))
            text = f"{rng.randrange(100000)}.{frac}" if frac else str(rng.randrange(100000))
            once = round_price(Decimal(text), 2)
            assert round_price(once, 2) == once
            assert f"{once:.2f}" == reference_round_half_even(text, 2), text


def _snapshot(directory):
    files = {}
    for p in sorted(directory.iterdir()):
        data = p.read_bytes()
        if p.name == SUMMARY_NAME:
            doc = json.loads(data)
            doc["run"].pop("generated_at")
            doc["run"].pop("constituents_retrieved_at")
            data = json.dumps(doc, sort_keys=True).encode()
        files[p.name] = data
    return files


def _e2e(out, concurrency, rate="2"):
    argv = ["--symbols", E2E_SYMBOLS, *E2E_WINDOW, "--transport", REPLAY, "--out", str(out),
            "--concurrency", str(concurrency), "--rate-limit", rate, "--quiet"]
    t0 = time.perf_counter()
    code = main(argv)
    return code, time.perf_counter() - t0


def test_ac7_end_to_end_replay(acceptance, tmp_path, capsys):
    with acceptance("AC7 replay run: 3 CSVs, 5/3/2/0 summary, deterministic, < 5 s"):
        code, elapsed = _e2e(tmp_path / "a", 4)
        assert code == EXIT_OK
        assert elapsed < 5.0, elapsed
        out = tmp_path / "a"
        csvs = sorted(p.name for p in out.glob("*.csv"))
        assert csvs == ["AAPL.csv", "BRK-B.csv", "MSFT.csv"]
        for name in csvs:
            ticker = name[:-4]
            lines = (out / name).read_text().splitlines()
            assert lines[0] == ",".join(CSV_HEADER) == "Date,Open,High,Low,Close,Volume,Name"
            assert len(lines) > 1
            assert all(line.rsplit(",", 1)[1] == ticker for line in lines[1:])
        doc = json.loads((out / SUMMARY_NAME).read_text())
        assert (doc["requested"], doc["collected"], doc["ignored_empty"], doc["failed"]) == (5, 3, 2, 0)

        reference = _snapshot(out)
        for label, conc in (("b", 4), ("c", 1), ("d", 8)):
            code, elapsed = _e2e(tmp_path / label, conc, rate="50")
            assert code == EXIT_OK and elapsed < 5.0
            assert _snapshot(tmp_path / label) == reference, label
        assert "Companies collected: 3 of 5" in capsys.readouterr().out


def test_ac8_directory_policy(acceptance, tmp_path, capsys):
    with acceptance("AC8 recreate wipes the directory, refuse exits 1 untouched"):
        out = tmp_path / "out"
        out.mkdir()
        (out / "stale.csv").write_text("old")
        (out / "nested").mkdir()
        (out / "nested" / "x.txt").write_text("old")
        base = ["--symbols", "AAPL", *E2E_WINDOW, "--transport", REPLAY, "--out", str(out), "--rate-limit", "50"]

        before = {p.relative_to(out): p.read_bytes() if p.is_file() else None for p in out.rglob("*")}
        assert main(base) == EXIT_FATAL
        after = {p.relative_to(out): p.read_bytes() if p.is_file() else None for p in out.rglob("*")}
        assert after == before

        assert main([*base, "--overwrite"]) == EXIT_OK
        assert sorted(p.name for p in out.iterdir()) == ["AAPL.csv", SUMMARY_NAME]


def test_ac9_transport_robustness(acceptance, tmp_path, no_sleep):
    with acceptance("AC9 429,429,200 takes 3 tries; 4x500 exhausts and fails the ticker with exit 2"):
        req = QuoteRequest("AAPL", make_range(date(2020, 1, 1), date(2020, 3, 31)))
        scripted = ScriptedTransport([429, 429, Response(200, b"Date,Open,High,Low,Close,Adj Close,Volume\n")])
        fetch(req, scripted, RetryPolicy(max_attempts=4), sleep=no_sleep)
        assert scripted.calls == 3

        always = AlwaysStatus(500)
        with pytest.raises(RetriesExhausted):
            fetch(req, always, RetryPolicy(max_attempts=4), sleep=no_sleep)
        assert always.calls == 4

        transport = RoutingTransport(FixtureReplay(REPLAY_DIR), {"/download/FAIL?": AlwaysStatus(500)})
        cfg = parse_args(["--symbols", "AAPL,FAIL", *E2E_WINDOW, "--out", str(tmp_path / "o"), "--rate-limit", "1000"])
        summary, code = run(cfg, transport, stdout=io.StringIO(), sleep=no_sleep)
        assert (summary.collected, summary.failed) == (1, 1)
        assert code == EXIT_PARTIAL


def test_ac10_ohlc_validation(acceptance, tmp_path, caplog):
    with acceptance("AC10 low > open row kept with a warning, rejected under --strict"):
        bad_day = "2020-01-15"

        def collect(*extra):
            out = tmp_path / ("strict" if extra else "lenient")
            cfg = parse_args(["--symbols", "BADL", *E2E_WINDOW, "--transport", REPLAY, "--out", str(out),
                              "--rate-limit", "1000", *extra])
            summary, code = run(cfg, stdout=io.StringIO())
            assert code == EXIT_OK
            dates = [line.split(",", 1)[0] for line in (out / "BADL.csv").read_text().splitlines()[1:]]
            return summary.per_ticker["BADL"], dates

        with caplog.at_level(logging.WARNING):
            lenient, dates = collect()
        assert bad_day in dates
        assert any("OHLC" in r.getMessage() and bad_day in r.getMessage() for r in caplog.records)

        strict, strict_dates = collect("--strict")
        assert bad_day not in strict_dates
        assert strict.rows == lenient.rows - 1
        assert strict.dropped_rows == lenient.dropped_rows + 1
