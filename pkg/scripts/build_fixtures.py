#!/usr/bin/env python3
"""Regenerate the offline HTTP fixtures under tests/fixtures/replay.

The sandbox that produced this repository had no route to the real pages, so
the recordings are synthesized in the exact on-disk format that
``--transport record:PATH`` writes. Page structure follows the live pages
(table order, header names, link and footnote markup); prices are a seeded
random walk. Re-running the script produces byte-identical files.

    python scripts/build_fixtures.py
"""

from __future__ import annotations

import random
import shutil
from datetime import date, timedelta
from decimal import Decimal
from html import escape
from pathlib import Path

from stockharvest.client import QuoteRequest, build_download_url
from stockharvest.registry import NASDAQ100_URL, NASDAQ_LISTED_URL, SP500_URL
from stockharvest.timeframe import Interval, make_range
from stockharvest.transport import Response, save_fixture

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "replay"

SP500 = """
A AAL AAPL ABBV ABNB ABT ACGL ACN ADBE ADI ADM ADP ADSK AEE AEP AES AFL AIG AIZ AJG
AKAM ALB ALGN ALK ALL ALLE AMAT AMCR AMD AME AMGN AMP AMT AMZN ANET ANSS AON AOS APA
APD APH APTV ARE ATO ATVI AVB AVGO AVY AWK AXON AXP AZO BA BAC BALL BAX BBWI BBY BDX
BEN BF.B BG BIIB BIO BK BKNG BKR BLK BMY BR BRK.B BRO BSX BWA BX BXP C CAG CAH CARR
CAT CB CBOE CBRE CCI CCL CDAY CDNS CDW CE CEG CF CFG CHD CHRW CHTR CI CINF CL CLX CMA
CMCSA CME CMG CMI CMS CNC CNP COF COO COP COR COST CPB CPRT CPT CRL CRM CSCO CSGP CSX
CTAS CTLT CTRA CTSH CTVA CVS CVX CZR D DAL DD DE DFS DG DGX DHI DHR DIS DLR DLTR DOV
DOW DPZ DRI DTE DUK DVA DVN DXCM EA EBAY ECL ED EFX EG EIX EL ELV EMN EMR ENPH EOG
EPAM EQIX EQR EQT ES ESS ETN ETR ETSY EVRG EW EXC EXPD EXPE EXR F FANG FAST FCX FDS
FDX FE FFIV FI FICO FIS FITB FLT FMC FOX FOXA FRT FSLR FTNT FTV GD GE GEHC GEN GILD
GIS GL GLW GM GNRC GOOG GOOGL GPC GPN GRMN GS GWW HAL HAS HBAN HCA HD HES HIG HII HLT
HOLX HON HPE HPQ HRL HSIC HST HSY HUM HWM IBM ICE IDXX IEX IFF ILMN INCY INTC INTU
INVH IP IPG IQV IR IRM ISRG IT ITW IVZ J JBHT JCI JKHY JNJ JNPR JPM K KDP KEY KEYS KHC
KIM KLAC KMB KMI KMX KO KR L LDOS LEN LH LHX LIN LKQ LLY LMT LNC LNT LOW LRCX LUV LVS
LW LYB LYV MA MAA MAR MAS MCD MCHP MCK MCO MDLZ MDT MET META MGM MHK MKC MKTX MLM MMC
MMM MNST MO MOH MOS MPC MPWR MRK MRNA MRO MS MSCI MSFT MSI MTB MTCH MTD MU NCLH NDAQ
NDSN NEE NEM NFLX NI NKE NOC NOW NRG NSC NTAP NTRS NUE NVDA NVR NWL NWS NWSA NXPI O
ODFL OGN OKE OMC ON ORCL ORLY OTIS OXY PANW PARA PAYC PAYX PCAR PCG PEAK PEG PEP PFE
PFG PG PGR PH PHM PKG PLD PM PNC PNR PNW PODD POOL PPG PPL PRU PSA PSX PTC PWR PXD
PYPL QCOM QRVO RCL REG REGN RF RHI RJF RL RMD ROK ROL ROP ROST RSG RTX RVTY SBAC SBUX
SCHW SEDG SEE SHW SJM SLB SNA SNPS SO SPG SPGI SRE STE STLD STT STX STZ SWK SWKS SYF
SYK SYY T TAP TDG TDY TECH TEL TER TFC TFX TGT TJX TMO TMUS TPR TRGP TRMB TROW TRV
TSCO TSLA TSN TT TTWO TXN TXT TYL UAL UDR UHS ULTA UNH UNP UPS URI USB V VFC VICI VLO
VMC VRSK VRSN VRTX VTR VTRS VZ WAB WAT WBA WBD WDC WEC WELL WFC WHR WM WMB WMT WRB WRK
WST WTW WY WYNN XEL XOM XRAY XYL YUM ZBH ZBRA ZION ZTS
""".split()

NASDAQ100 = """
AAPL ABNB ADBE ADI ADP ADSK AEP ALGN AMAT AMD AMGN AMZN ANSS ASML ATVI AVGO AZN BIIB
BKNG BKR CDNS CEG CHTR CMCSA COST CPRT CRWD CSCO CSGP CSX CTAS CTSH DDOG DLTR DXCM EA
EBAY ENPH EXC FANG FAST FTNT GEHC GFS GILD GOOG GOOGL HON IDXX ILMN INTC INTU ISRG JD
KDP KHC KLAC LCID LRCX LULU MAR MCHP MDLZ MELI META MNST MRNA MRVL MSFT MU NFLX NVDA
NXPI ODFL ON ORLY PANW PAYX PCAR PDD PEP PYPL QCOM REGN ROST SBUX SGEN SIRI SNPS TEAM
TMUS TSLA TXN VRSK VRTX WBA WBD WDAY XEL ZM ZS
""".split()

NASDAQ_LISTED_ROWS = 2967

NAMES = {
    "AAPL": "Apple Inc.", "MSFT": "Microsoft", "BRK.B": "Berkshire Hathaway",
    "BF.B": "Brown–Forman", "GOOGL": "Alphabet Inc. (Class A)", "GOOG": "Alphabet Inc. (Class C)",
    "AMZN": "Amazon", "NVDA": "Nvidia", "META": "Meta Platforms", "TSLA": "Tesla, Inc.",
}
SECTORS = ["Industrials", "Health Care", "Information Technology", "Utilities", "Financials",
           "Materials", "Consumer Discretionary", "Real Estate", "Communication Services",
           "Consumer Staples", "Energy"]

PAGE_HEAD = """<!DOCTYPE html>
<html class="client-nojs" lang="en" dir="ltr">
<head>
<meta charset="UTF-8">
<title>{title} - Wikipedia</title>
<style>.mw-parser-output table.wikitable{{border:1px solid #a2a9b1}}</style>
<script>document.documentElement.className="client-js";</script>
</head>
<body class="mediawiki">
<div id="content" class="mw-body" role="main">
<h1 id="firstHeading" class="firstHeading">{title}</h1>
<div id="mw-content-text" class="mw-body-content"><div class="mw-parser-output">
"""
PAGE_TAIL = """</div></div>
<div class="printfooter">Retrieved from "https://en.wikipedia.org/"</div>
</div>
</body>
</html>
"""


def ref(n: int) -> str:
    return (f'<sup id="cite_ref-{n}" class="reference"><a href="#cite_note-{n}">'
            f'&#91;{n}&#93;</a></sup>')


def sp500_page() -> str:
    rng = random.Random(500)
    rows = []
    for i, sym in enumerate(SP500):
        name = NAMES.get(sym, f"{sym.title()} Holdings")
        link = f'<a rel="nofollow" class="external text" href="https://www.nyse.com/quote/XNYS:{sym}">{sym}</a>'
        if sym == "MMM":
            link += ref(4)  # footnote attached to a symbol cell
        rows.append(
            "<tr>\n"
            f"<td>{link}\n</td>\n"
            f'<td><a href="/wiki/{escape(name.replace(" ", "_"))}" title="{escape(name)}">{escape(name)}</a>'
            + (ref(5) if sym == "BRK.B" else "") + "</td>\n"
            f"<td>{SECTORS[i % len(SECTORS)]}</td>\n"
            f"<td>Sub-industry {i % 37}</td>\n"
            f'<td><a href="/wiki/City_{i % 90}">City {i % 90}</a>, State</td>\n'
            f"<td>{1957 + rng.randrange(66)}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}</td>\n"
            f"<td>{rng.randrange(1_000, 2_000_000):010d}</td>\n"
            f"<td>{1850 + rng.randrange(170)}</td>\n"
            "</tr>\n"
        )
    constituents = (
        '<table class="wikitable sortable" id="constituents">\n<tbody><tr>\n'
        "<th>Symbol</th>\n<th>Security</th>\n<th>GICS Sector</th>\n<th>GICS Sub-Industry</th>\n"
        "<th>Headquarters Location</th>\n<th>Date added</th>\n<th>CIK</th>\n<th>Founded</th>\n"
        "</tr>\n" + "".join(rows) + "</tbody></table>\n"
    )
    changes = (
        '<h2><span class="mw-headline" id="Selected_changes">Selected changes to the list of S&amp;P 500 components</span></h2>\n'
        '<table class="wikitable sortable" id="changes">\n<tbody>\n'
        '<tr><th rowspan="2">Date</th><th colspan="2">Added</th><th colspan="2">Removed</th><th rowspan="2">Reason</th></tr>\n'
        "<tr><th>Ticker</th><th>Security</th><th>Ticker</th><th>Security</th></tr>\n"
        "<tr><td>June 20, 2023</td><td>PANW</td><td>Palo Alto Networks</td><td>DISH</td><td>Dish Network</td>"
        "<td>Market capitalization change." + ref(12) + "</td></tr>\n"
        "<tr><td>May 4, 2023</td><td>FICO</td><td>Fair Isaac</td><td>FRC</td><td>First Republic Bank</td>"
        "<td>S&amp;P 500 constituent First Republic Bank was closed.</td></tr>\n"
        "</tbody></table>\n"
    )
    intro = (
        "<p>The <b>S&amp;P 500</b> stock market index is maintained by S&amp;P Dow Jones Indices."
        + ref(1) + "</p>\n"
        '<h2><span class="mw-headline" id="S&amp;P_500_component_stocks">S&amp;P 500 component stocks</span></h2>\n'
    )
    return (PAGE_HEAD.format(title="List of S&amp;P 500 companies") + intro + constituents
            + changes + PAGE_TAIL)


def nasdaq100_page() -> str:
    infobox = (
        '<table class="infobox"><tbody>\n'
        '<tr><th colspan="2" class="infobox-above">Nasdaq-100</th></tr>\n'
        '<tr><th scope="row">Foundation</th><td>January 31, 1985</td></tr>\n'
        '<tr><th scope="row">Operator</th><td>Nasdaq, Inc.</td></tr>\n'
        '<tr><th scope="row">Constituents</th><td>101</td></tr>\n'
        "</tbody></table>\n"
    )
    years = "".join(
        f"<tr><td>{y}</td><td>{1000 + 137 * (y - 1986):,}.00</td><td>{(y * 7) % 40 - 10}.0%</td></tr>\n"
        for y in range(1986, 2023)
    )
    annual = ('<table class="wikitable"><tbody>\n'
              "<tr><th>Year</th><th>Closing level</th><th>Change in index</th></tr>\n"
              + years + "</tbody></table>\n")
    weights = ('<table class="wikitable"><tbody>\n<tr><th>Sector</th><th>Weight</th></tr>\n'
               + "".join(f"<tr><td>{s}</td><td>{9 - i * 0.5:.1f}%</td></tr>\n" for i, s in enumerate(SECTORS))
               + "</tbody></table>\n")
    navbox = ('<table class="nowraplinks navbox-inner"><tbody>\n'
              '<tr><th scope="col" class="navbox-title" colspan="2">Stock market indices</th></tr>\n'
              '<tr><th scope="row" class="navbox-group">United States</th>'
              '<td><a href="/wiki/Dow_Jones_Industrial_Average">DJIA</a> · <a href="/wiki/S%26P_500">S&amp;P 500</a></td></tr>\n'
              "</tbody></table>\n")
    comp_rows = "".join(
        f'<tr><td><a href="/wiki/{sym}_company">{escape(NAMES.get(sym, sym.title() + " Inc."))}</a></td>'
        f"<td>{sym}</td><td>{SECTORS[i % len(SECTORS)]}</td><td>Sub-industry {i % 23}</td></tr>\n"
        for i, sym in enumerate(NASDAQ100)
    )
    components = ('<table id="constituents" class="wikitable sortable"><tbody>\n'
                  "<tr><th>Company</th><th>Ticker</th><th>GICS Sector</th><th>GICS Sub-Industry</th></tr>\n"
                  + comp_rows + "</tbody></table>\n")
    changes = ('<table class="wikitable"><tbody>\n'
               '<tr><th rowspan="2">Date</th><th colspan="2">Added</th><th colspan="2">Removed</th></tr>\n'
               "<tr><th>Ticker</th><th>Security</th><th>Ticker</th><th>Security</th></tr>\n"
               "<tr><td>July 17, 2023</td><td>ON</td><td>ON Semiconductor</td><td>ATVI</td><td>Activision Blizzard</td></tr>\n"
               "</tbody></table>\n")
    return (PAGE_HEAD.format(title="Nasdaq-100") + infobox
            + "<p>The <b>Nasdaq-100</b> is a stock market index." + ref(1) + "</p>\n"
            + annual + weights + navbox + "<h2>Components</h2>\n" + components + changes + PAGE_TAIL)


def nasdaq_listed_csv() -> str:
    rng = random.Random(2967)
    symbols = list(NASDAQ100)
    seen = set(symbols)
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    while len(symbols) < NASDAQ_LISTED_ROWS:
        sym = "".join(rng.choice(letters) for _ in range(rng.choice((3, 4, 4, 4, 5))))
        if sym not in seen:
            seen.add(sym)
            symbols.append(sym)
    symbols.sort()
    lines = ["Symbol,Company Name,Security Name,Market Category,Test Issue,Financial Status,Round Lot Size"]
    for i, sym in enumerate(symbols):
        company = NAMES.get(sym, f"{sym.title()} Corp")
        if i % 7 == 0:
            security = f"{company} - Class A Common Stock, par value $0.01"
        else:
            security = f"{company} - Common Stock"
        company, security = (f'"{v}"' if "," in v else v for v in (company, security))
        lines.append(f"{sym},{company},{security},{'QGS'[i % 3]},N,N,100.0")
    return "\n".join(lines) + "\n"


# -- quote CSVs ---------------------------------------------------------------

QUOTE_START, QUOTE_END = date(2020, 1, 1), date(2020, 3, 31)
HOLIDAYS = {date(2020, 1, 1), date(2020, 1, 20), date(2020, 2, 17)}
QUOTE_HEADER = "Date,Open,High,Low,Close,Adj Close,Volume"


def trading_days(start: date, end: date):
    d = start
    while d <= end:
        if d.weekday() < 5 and d not in HOLIDAYS:
            yield d
        d += timedelta(days=1)


def q6(x: float) -> Decimal:
    return Decimal(f"{x:.6f}")


def quote_csv(seed: int, price: float, adj_factor: float, null_days=(), bad_days=()) -> str:
    rng = random.Random(seed)
    lines = [QUOTE_HEADER]
    for d in trading_days(QUOTE_START, QUOTE_END):
        if d in null_days:
            lines.append(f"{d.isoformat()},null,null,null,null,null,null")
            continue
        open_ = q6(price * (1 + rng.uniform(-0.01, 0.01)))
        close = q6(price * (1 + rng.uniform(-0.02, 0.02)))
        adj = q6(float(close) * adj_factor)
        lo_anchor = min(open_, close, adj)
        hi_anchor = max(open_, close, adj)
        low = q6(float(lo_anchor) * (1 - rng.uniform(0.0005, 0.012)))
        high = q6(float(hi_anchor) * (1 + rng.uniform(0.0005, 0.012)))
        if d in bad_days:
            low = q6(float(open_) + 0.5)  # low above open: provider glitch
        volume = rng.randrange(1_000_000, 60_000_000)
        lines.append(f"{d.isoformat()},{open_},{high},{low},{close},{adj},{volume}")
        price = float(close)
    return "\n".join(lines) + "\n"


E2E_TICKERS = {
    "AAPL": dict(seed=1, price=74.06, adj_factor=0.9920),
    "MSFT": dict(seed=2, price=158.78, adj_factor=0.9865, null_days={date(2020, 2, 3)}),
    "BRK-B": dict(seed=3, price=226.49, adj_factor=1.0),
}
BAD_OHLC = {"BADL": dict(seed=4, price=41.20, adj_factor=1.0, bad_days={date(2020, 1, 15)})}
NOT_FOUND_BODY = b'404 Not Found: No data found, symbol may be delisted'


def quote_url(ticker: str) -> str:
    req = QuoteRequest(ticker, make_range(QUOTE_START, QUOTE_END), Interval.D1)
    return build_download_url(req)


def main() -> None:
    if OUT.exists():
        shutil.rmtree(OUT)
    html = {"Content-Type": "text/html; charset=UTF-8"}
    csv_type = {"Content-Type": "text/csv"}
    save_fixture(OUT, SP500_URL, Response(200, sp500_page().encode(), html))
    save_fixture(OUT, NASDAQ100_URL, Response(200, nasdaq100_page().encode(), html))
    save_fixture(OUT, NASDAQ_LISTED_URL, Response(200, nasdaq_listed_csv().encode(), csv_type))
    for ticker, params in {**E2E_TICKERS, **BAD_OHLC}.items():
        save_fixture(OUT, quote_url(ticker), Response(200, quote_csv(**params).encode(), csv_type))
    # two tickers with nothing in the window: one 404, one header-only body
    save_fixture(OUT, quote_url("ZZZZ"), Response(404, NOT_FOUND_BODY, {"Content-Type": "text/plain"}))
    save_fixture(OUT, quote_url("OLDCO"), Response(200, (QUOTE_HEADER + "\n").encode(), csv_type))
    print(f"wrote fixtures to {OUT}: S&P 500 {len(SP500)} symbols, "
          f"Nasdaq-100 {len(NASDAQ100)}, nasdaq-listed {NASDAQ_LISTED_ROWS}")


if __name__ == "__main__":
    main()
