"""Minimal HTML table extraction on top of :mod:`html.parser`.

Reads every ``<table>`` in a document into a :class:`Table` of plain strings.
Nested markup (links, bold, spans) is flattened to its text, Wikipedia-style
reference superscripts (``<sup class="reference">``) are dropped, and
whitespace is collapsed and trimmed. ``colspan`` cells are repeated so that
data cells line up with the header. ``rowspan`` is not expanded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser

from .errors import ColumnNotFound, MalformedHtml

_SKIP_CONTENT = {"script", "style"}


@dataclass
class Table:
    columns: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def column(self, name: str) -> list[str]:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise ColumnNotFound(f"column {name!r} not in {self.columns}") from None
        return [row[idx] if idx < len(row) else "" for row in self.rows]


@dataclass
class _Cell:
    header: bool
    span: int
    parts: list[str] = field(default_factory=list)


@dataclass
class _TableState:
    table: Table
    header_seen: bool = False
    row: list[_Cell] | None = None
    cell: _Cell | None = None


def _span(attrs: list[tuple[str, str | None]]) -> int:
    for key, value in attrs:
        if key == "colspan" and value:
            try:
                return max(1, int(value.strip()))
            except ValueError:
                return 1
    return 1


class _TableParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.tables: list[Table] = []
        self._stack: list[_TableState] = []
        self._suppress: list[str] = []  # open elements whose text is discarded

    # -- tag handling ------------------------------------------------------
    def handle_starttag(self, tag, attrs):
        if self._suppress:
            if tag == self._suppress[-1]:
                self._suppress.append(tag)
            return
        if tag in _SKIP_CONTENT:
            self._suppress.append(tag)
            return
        if tag == "sup":
            classes = (dict(attrs).get("class") or "").split()
            if "reference" in classes:
                self._suppress.append(tag)
                return
        if tag == "table":
            table = Table(columns=[])
            self.tables.append(table)
            self._stack.append(_TableState(table))
            return
        if not self._stack:
            return
        state = self._stack[-1]
        if tag == "tr":
            self._finish_row(state)
            state.row = []
        elif tag in ("td", "th"):
            self._finish_cell(state)
            if state.row is None:
                state.row = []
            state.cell = _Cell(header=(tag == "th"), span=_span(attrs))
        elif tag == "br" and state.cell is not None:
            state.cell.parts.append(" ")

    def handle_startendtag(self, tag, attrs):
        if tag == "br" and self._stack and self._stack[-1].cell is not None and not self._suppress:
            self._stack[-1].cell.parts.append(" ")

    def handle_endtag(self, tag):
        if self._suppress:
            if tag == self._suppress[-1]:
                self._suppress.pop()
            return
        if not self._stack:
            return
        state = self._stack[-1]
        if tag in ("td", "th"):
            self._finish_cell(state)
        elif tag == "tr":
            self._finish_row(state)
        elif tag == "table":
            self._finish_row(state)
            self._stack.pop()

    def handle_data(self, data):
        if self._suppress or not self._stack:
            return
        cell = self._stack[-1].cell
        if cell is not None:
            cell.parts.append(data)

    # -- row assembly ------------------------------------------------------
    @staticmethod
    def _finish_cell(state: _TableState) -> None:
        if state.cell is not None and state.row is not None:
            state.row.append(state.cell)
        state.cell = None

    def _finish_row(self, state: _TableState) -> None:
        self._finish_cell(state)
        row, state.row = state.row, None
        if not row:
            return
        texts: list[str] = []
        for cell in row:
            text = " ".join("".join(cell.parts).split())
            texts.extend([text] * cell.span)
        if all(c.header for c in row):
            # First all-<th> row names the columns; later ones are sub-headers.
            if not state.header_seen:
                state.table.columns = texts
                state.header_seen = True
            return
        state.table.rows.append(texts)

    def close(self):
        super().close()
        if self._stack:
            raise MalformedHtml(f"document ended inside {len(self._stack)} unclosed <table>")


def extract_tables(html: str | bytes) -> list[Table]:
    """Return every table in *html*, in document order.

    An empty list means the document has no tables; a truncated document
    (ending inside a table) raises :class:`MalformedHtml`.
    """
    if isinstance(html, bytes):
        try:
            html = html.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedHtml(f"document is not UTF-8: {exc}") from None
    parser = _TableParser()
    try:
        parser.feed(html)
        parser.close()
    except MalformedHtml:
        raise
    except Exception as exc:  # html.parser is lenient; anything it raises is fatal
        raise MalformedHtml(str(exc)) from exc
    return parser.tables


def select_symbol_column(
    tables: list[Table], column: str, table_hint: int | None = None
) -> list[str]:
    """Pick *column* from the first table whose header has it (exact match).

    When no header matches, ``tables[table_hint]`` is tried with a
    case-insensitive header match. Blank cells are skipped.
    """
    for table in tables:
        if column in table.columns:
            return [v for v in table.column(column) if v]
    if table_hint is None or not (0 <= table_hint < len(tables)):
        where = "" if table_hint is None else f" and table index {table_hint} is out of range"
        raise ColumnNotFound(f"no table has a {column!r} column{where}")
    fallback = tables[table_hint]
    for name in fallback.columns:
        if name.casefold() == column.casefold():
            return [v for v in fallback.column(name) if v]
    raise ColumnNotFound(
        f"no table has a {column!r} column (fallback table {table_hint} has {fallback.columns})"
    )
