"""Columnar table values: CSV ingestion, kind inference, and cell addressing.

A cell is one of three things, encoded with plain Python values:

* ``None``       -- Missing (empty field or a configured null token)
* ``float``      -- Number (always finite, never NaN)
* ``str``        -- Text (anything that is not missing and not yet typed)

Tables are immutable once constructed; every committed repair produces a
new ``Table`` with ``version + 1``. Columns cache numpy views (type codes
and a float64 value array) so detection over large tables stays vectorized
while cell-level reads keep exact Python values for bit-stable undo.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ColumnNotFound, EmptyInput, MalformedCsv

CellValue = Union[None, float, str]

MISSING: CellValue = None

DEFAULT_NULL_TOKENS = frozenset({"", "NA", "N/A", "null", "NULL"})

# Type codes used in the cached numpy view of a column.
CODE_MISSING = 0
CODE_NUMBER = 1
CODE_TEXT = 2

_NUMERIC_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class ColumnKind(enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class CellRef(NamedTuple):
    """Address of a single cell: 0-based row plus column name."""

    row: int
    column: str


def parse_numeric_cell(text: str) -> Optional[float]:
    """Strict numeric parse: sign, digits, one decimal point, optional exponent.

    No suffixes, no thousands separators, no surrounding whitespace. Returns
    ``None`` for anything the grammar rejects and for non-finite results, so
    a successfully parsed cell can never hold NaN or infinity.
    """
    if not _NUMERIC_RE.fullmatch(text):
        return None
    value = float(text)
    if not math.isfinite(value):
        return None
    return value


def format_number(value: float) -> str:
    """Shortest text that parses back to the same float.

    Integral values within exact float range drop the trailing ``.0`` so
    serialized tables look like ordinary CSV numbers.
    """
    if value.is_integer() and abs(value) <= 2**53:
        return str(int(value))
    return repr(value)


def is_missing(cell: CellValue) -> bool:
    return cell is None


def is_number(cell: CellValue) -> bool:
    return type(cell) is float


def is_text(cell: CellValue) -> bool:
    return type(cell) is str


class Column:
    """One named column of cells, with a lazily built numpy view."""

    __slots__ = ("name", "kind", "cells", "_codes", "_values")

    def __init__(
        self,
        name: str,
        kind: ColumnKind,
        cells: list,
        _codes: Optional[np.ndarray] = None,
        _values: Optional[np.ndarray] = None,
    ):
        self.name = name
        self.kind = kind
        self.cells = cells
        self._codes = _codes
        self._values = _values

    def __len__(self) -> int:
        return len(self.cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Column):
            return NotImplemented
        return self.name == other.name and self.kind == other.kind and self.cells == other.cells

    def __repr__(self) -> str:
        return f"Column({self.name!r}, {self.kind.value}, {len(self.cells)} cells)"

    def _build_arrays(self) -> None:
        n = len(self.cells)
        codes = np.empty(n, dtype=np.uint8)
        values = np.full(n, np.nan, dtype=np.float64)
        for i, cell in enumerate(self.cells):
            if cell is None:
                codes[i] = CODE_MISSING
            elif type(cell) is float:
                codes[i] = CODE_NUMBER
                values[i] = cell
            else:
                codes[i] = CODE_TEXT
        self._codes = codes
        self._values = values

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            self._build_arrays()
        return self._codes

    @property
    def values(self) -> np.ndarray:
        """float64 view: the number where the cell is a Number, NaN elsewhere."""
        if self._values is None:
            self._build_arrays()
        return self._values

    def number_mask(self) -> np.ndarray:
        return self.codes == CODE_NUMBER

    def missing_mask(self) -> np.ndarray:
        return self.codes == CODE_MISSING

    def text_mask(self) -> np.ndarray:
        return self.codes == CODE_TEXT


class Table:
    """An immutable, versioned set of equally long named columns."""

    __slots__ = ("name", "columns", "version", "_by_name", "_partitions")

    def __init__(self, columns: Sequence[Column], name: str = "", version: int = 0):
        columns = list(columns)
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        if columns:
            n = len(columns[0])
            for c in columns:
                if len(c) != n:
                    raise ValueError("all columns must have the same cell count")
        self.name = name
        self.columns = columns
        self.version = version
        self._by_name = {c.name: c for c in columns}
        self._partitions: dict = {}  # group-by cache, see groups.partition_rows

    @property
    def row_count(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def has_column(self, name: str) -> bool:
        return name in self._by_name

    def column(self, name: str) -> Column:
        try:
            return self._by_name[name]
        except KeyError:
            raise ColumnNotFound(name) from None

    def cell(self, row: int, column: str) -> CellValue:
        return self.column(column).cells[row]

    def numeric_columns(self) -> list[str]:
        return [c.name for c in self.columns if c.kind is ColumnKind.NUMERIC]

    def categorical_columns(self) -> list[str]:
        return [c.name for c in self.columns if c.kind is ColumnKind.CATEGORICAL]

    def row(self, index: int) -> list:
        return [c.cells[index] for c in self.columns]

    def with_columns(self, columns: Sequence[Column], version: Optional[int] = None) -> "Table":
        return Table(columns, name=self.name, version=self.version if version is None else version)

    def __repr__(self) -> str:
        return f"Table({self.name!r}, v{self.version}, {self.row_count}x{len(self.columns)})"


@dataclass(frozen=True)
class LoadOptions:
    delimiter: str = ","
    null_tokens: frozenset = field(default_factory=lambda: DEFAULT_NULL_TOKENS)
    has_header: bool = True

    def __post_init__(self):
        if len(self.delimiter) != 1 or self.delimiter in ('"', "\n", "\r"):
            raise ValueError("delimiter must be a single character other than quote/newline")
        object.__setattr__(self, "null_tokens", frozenset(self.null_tokens))


def _scan_records(text: str, delimiter: str) -> list[list[tuple[str, bool]]]:
    """Split CSV text into records of (field_text, was_quoted) pairs.

    Implements RFC 4180 quoting: double quotes delimit fields, doubled
    quotes escape a literal quote, and newlines inside quoted fields are
    data. Record terminators are LF or CRLF.
    """
    if '"' not in text:
        # Fast path: no quoting anywhere, plain line/field splits apply.
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        records = []
        for line in lines:
            if line.endswith("\r"):
                line = line[:-1]
            records.append([(f, False) for f in line.split(delimiter)])
        return records

    records: list[list[tuple[str, bool]]] = []
    fields: list[tuple[str, bool]] = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch == '"':
            parts: list[str] = []
            i += 1
            while True:
                j = text.find('"', i)
                if j < 0:
                    raise MalformedCsv(len(records), "unterminated quoted field")
                if j + 1 < n and text[j + 1] == '"':
                    parts.append(text[i:j] + '"')
                    i = j + 2
                else:
                    parts.append(text[i:j])
                    i = j + 1
                    break
            fields.append(("".join(parts), True))
            if i >= n:
                records.append(fields)
                fields = []
                break
            ch = text[i]
            if ch == delimiter:
                i += 1
                if i >= n:  # trailing delimiter: final empty field
                    fields.append(("", False))
                    records.append(fields)
                    fields = []
                continue
            if ch == "\n":
                records.append(fields)
                fields = []
                i += 1
                continue
            if ch == "\r" and i + 1 < n and text[i + 1] == "\n":
                records.append(fields)
                fields = []
                i += 2
                continue
            raise MalformedCsv(len(records), "unexpected character after closing quote")
        else:
            k_delim = text.find(delimiter, i)
            k_nl = text.find("\n", i)
            if k_delim == -1 and k_nl == -1:
                fields.append((text[i:], False))
                records.append(fields)
                fields = []
                break
            if k_delim != -1 and (k_nl == -1 or k_delim < k_nl):
                fields.append((text[i:k_delim], False))
                i = k_delim + 1
                if i >= n:  # trailing delimiter at EOF
                    fields.append(("", False))
                    records.append(fields)
                    fields = []
                    break
            else:
                raw = text[i:k_nl]
                if raw.endswith("\r"):
                    raw = raw[:-1]
                fields.append((raw, False))
                records.append(fields)
                fields = []
                i = k_nl + 1
    if fields:
        records.append(fields)
    return records


def load_csv(data: Union[bytes, str], options: LoadOptions = LoadOptions(), name: str = "") -> Table:
    """Parse CSV bytes (or text) into an untyped Table.

    Every cell comes out Text, or Missing when the raw field was unquoted
    and matched a null token (quoting forces Text, which is what makes the
    serialize/load round trip exact). Column kinds are assigned later by
    :func:`infer_kinds`.

    Raises :class:`MalformedCsv` for ragged rows, unterminated quotes, or
    undecodable bytes, and :class:`EmptyInput` when there are no data rows.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise MalformedCsv(0, f"not valid UTF-8: {exc.reason}") from None
    else:
        text = data.removeprefix("﻿")

    records = _scan_records(text, options.delimiter)
    if not records:
        raise EmptyInput("no rows in input")

    if options.has_header:
        header = [f for f, _ in records[0]]
        if len(set(header)) != len(header):
            raise MalformedCsv(0, "duplicate column name in header")
        data_records = records[1:]
        first_data_index = 1
    else:
        header = [f"col{i}" for i in range(len(records[0]))]
        data_records = records
        first_data_index = 0

    if not data_records:
        raise EmptyInput("no data rows in input")

    width = len(header)
    null_tokens = options.null_tokens
    column_cells: list[list] = [[] for _ in range(width)]
    for offset, record in enumerate(data_records):
        if len(record) != width:
            raise MalformedCsv(
                first_data_index + offset,
                f"expected {width} fields, found {len(record)}",
            )
        for c, (raw, quoted) in enumerate(record):
            if not quoted and raw in null_tokens:
                column_cells[c].append(None)
            else:
                column_cells[c].append(raw)

    columns = [Column(h, ColumnKind.CATEGORICAL, cells) for h, cells in zip(header, column_cells)]
    return Table(columns, name=name, version=0)


def _needs_quote(text: str, delimiter: str, null_tokens: frozenset) -> bool:
    if text == "" or text in null_tokens:
        return True
    return delimiter in text or '"' in text or "\n" in text or "\r" in text


def serialize_csv(table: Table, options: LoadOptions = LoadOptions()) -> str:
    """Render a Table back to CSV text.

    Missing becomes an empty unquoted field; Text that would read back as
    missing (empty or a null token) is quoted so the round trip preserves
    it; Numbers use the shortest round-trip decimal form.
    """
    delimiter = options.delimiter
    null_tokens = options.null_tokens
    out: list[str] = []
    if options.has_header:
        out.append(delimiter.join(
            f'"{name.replace(chr(34), chr(34) * 2)}"' if _needs_quote(name, delimiter, frozenset()) else name
            for name in table.column_names
        ))
    cols = [c.cells for c in table.columns]
    for r in range(table.row_count):
        parts = []
        for cells in cols:
            cell = cells[r]
            if cell is None:
                parts.append("")
            elif type(cell) is float:
                parts.append(format_number(cell))
            else:
                if _needs_quote(cell, delimiter, null_tokens):
                    parts.append('"' + cell.replace('"', '""') + '"')
                else:
                    parts.append(cell)
        out.append(delimiter.join(parts))
    return "\n".join(out) + "\n"


def infer_kinds(
    table: Table,
    numeric_majority: float = 0.5,
    null_tokens: frozenset = DEFAULT_NULL_TOKENS,
) -> Table:
    """Assign column kinds and settle the cell domain.

    A column is Numeric when the fraction of non-missing cells that parse
    under :func:`parse_numeric_cell` reaches ``numeric_majority``; in such
    columns parsing Text becomes Number and the rest stays Text. Text cells
    matching a null token become Missing in every column. All-missing
    columns default to Categorical. Idempotent by construction.
    """
    if not 0 < numeric_majority <= 1:
        raise ValueError("numeric_majority must be in (0, 1]")
    new_columns = []
    for col in table.columns:
        parsed: list[Optional[float]] = [None] * len(col.cells)
        non_missing = 0
        parse_hits = 0
        for i, cell in enumerate(col.cells):
            if cell is None:
                continue
            if type(cell) is float:
                non_missing += 1
                parse_hits += 1
                parsed[i] = cell
                continue
            if cell in null_tokens:
                continue
            non_missing += 1
            value = parse_numeric_cell(cell)
            if value is not None:
                parse_hits += 1
                parsed[i] = value
        numeric = non_missing > 0 and parse_hits / non_missing >= numeric_majority
        kind = ColumnKind.NUMERIC if numeric else ColumnKind.CATEGORICAL

        n = len(col.cells)
        cells: list = [None] * n
        codes = np.empty(n, dtype=np.uint8)
        values = np.full(n, np.nan, dtype=np.float64)
        for i, cell in enumerate(col.cells):
            if cell is None or (type(cell) is str and cell in null_tokens):
                codes[i] = CODE_MISSING
            elif numeric and parsed[i] is not None:
                cells[i] = parsed[i]
                codes[i] = CODE_NUMBER
                values[i] = parsed[i]
            elif type(cell) is float:
                # Minority numeric cell in a categorical column: keep as-is.
                cells[i] = cell
                codes[i] = CODE_NUMBER
                values[i] = cell
            else:
                cells[i] = cell
                codes[i] = CODE_TEXT
        new_columns.append(Column(col.name, kind, cells, _codes=codes, _values=values))
    return Table(new_columns, name=table.name, version=table.version)


def table_equals(a: Table, b: Table, tol: float = 0.0) -> bool:
    """Structural equality with a numeric tolerance.

    Same column names, order and kinds, same row count; Text and Missing
    cells must match exactly, Numbers within ``tol`` absolute difference.
    """
    if a.column_names != b.column_names:
        return False
    if [c.kind for c in a.columns] != [c.kind for c in b.columns]:
        return False
    if a.row_count != b.row_count:
        return False
    for ca, cb in zip(a.columns, b.columns):
        for x, y in zip(ca.cells, cb.cells):
            if type(x) is float and type(y) is float:
                if abs(x - y) > tol:
                    return False
            elif x != y or type(x) is not type(y):
                return False
    return True
