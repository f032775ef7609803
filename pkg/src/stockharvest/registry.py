"""Built-in index definitions, overridable from a JSON config file.

Config file shape (every key optional per entry)::

    {
      "indexes": {
        "sp500": {"kind": "html", "url": "https://...", "column": "Symbol",
                  "table_hint": 0, "overrides": {"BRK.B": "BRK-B"}}
      }
    }
"""

from __future__ import annotations

import json
from pathlib import Path

from .constituents import CLASS_SHARE_OVERRIDES, IndexSource, SourceKind

SP500_URL = "https://en.wikipedia.org/wiki/List_of_S%26P_500_companies"
NASDAQ100_URL = "https://en.wikipedia.org/wiki/Nasdaq-100"
NASDAQ_LISTED_URL = (
    "https://pkgstore.datahub.io/core/nasdaq-listings/nasdaq-listed_csv/data/"
    "7665719fb51081ba0bd834fde71ce822/nasdaq-listed_csv.csv"
)

BUILTIN_INDEXES: dict[str, IndexSource] = {
    "sp500": IndexSource(SourceKind.HTML_TABLE, SP500_URL, "Symbol", table_hint=0),
    "nasdaq100": IndexSource(SourceKind.HTML_TABLE, NASDAQ100_URL, "Ticker", table_hint=4),
    # datahub symbols already use the provider's spelling
    "nasdaq_all": IndexSource(SourceKind.REMOTE_CSV, NASDAQ_LISTED_URL, "Symbol", overrides={}),
}

INDEX_ALIASES = {"nasdaq-all": "nasdaq_all", "nasdaq-100": "nasdaq100", "s&p500": "sp500"}


def load_registry(config_path: str | Path | None = None) -> dict[str, IndexSource]:
    registry = dict(BUILTIN_INDEXES)
    if config_path is None:
        return registry
    doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
    for name, entry in (doc.get("indexes") or {}).items():
        base = registry.get(name)
        kind = SourceKind(entry["kind"]) if "kind" in entry else (base.kind if base else None)
        url = entry.get("url", base.locator if base else None)
        if kind is None or url is None:
            raise ValueError(f"index {name!r} in {config_path} needs 'kind' and 'url'")
        registry[name] = IndexSource(
            kind=kind,
            locator=url,
            column=entry.get("column", base.column if base else "Symbol"),
            table_hint=entry.get("table_hint", base.table_hint if base else None),
            overrides=entry.get(
                "overrides", dict(base.overrides) if base else dict(CLASS_SHARE_OVERRIDES)
            ),
        )
    return registry


def resolve_index(name: str, registry: dict[str, IndexSource]) -> tuple[str, IndexSource]:
    key = INDEX_ALIASES.get(name.lower(), name.lower())
    try:
        return key, registry[key]
    except KeyError:
        raise KeyError(f"unknown index {name!r}; known: {', '.join(sorted(registry))}") from None
