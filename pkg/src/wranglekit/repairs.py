"""Repair actions: suggestion ranking, pure application, exact inverses.

Every action application returns the new table plus an inverse record that
restores the prior version bit-exactly (prior cell values are stored, never
recomputed) and a diff summarizing the impact per group.
"""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    EmptyMeanBasis,
    KindMismatch,
    NoSuggestion,
    NotConvertible,
    StaleAction,
    StaleRecord,
)
from .anomalies import AnomalyRecord, GroupId
from .groups import Group, GroupSpec, group_stats, partition_rows
from .table import (
    CODE_NUMBER,
    CellRef,
    CellValue,
    Column,
    ColumnKind,
    Table,
)


def _check_refs(refs: Sequence[CellRef]) -> tuple:
    refs = tuple(CellRef(*r) for r in refs)
    if not refs:
        raise ValueError("cell list must be nonempty")
    if list(refs) != sorted(set(refs)):
        raise ValueError("cell list must be sorted and duplicate-free")
    return refs


@dataclass(frozen=True)
class ImputeGroupMean:
    cells: tuple
    group_id: GroupId

    def __post_init__(self):
        object.__setattr__(self, "cells", _check_refs(self.cells))


@dataclass(frozen=True)
class ImputeColumnMean:
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", _check_refs(self.cells))
        if len({c.column for c in self.cells}) != 1:
            raise ValueError("column-mean imputation cells must share one column")


@dataclass(frozen=True)
class RemoveRows:
    rows: tuple

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if not rows:
            raise ValueError("row list must be nonempty")
        if list(rows) != sorted(set(rows)):
            raise ValueError("row list must be sorted and duplicate-free")
        object.__setattr__(self, "rows", rows)


@dataclass(frozen=True)
class ConvertCells:
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", _check_refs(self.cells))


@dataclass(frozen=True)
class MergeGroups:
    column: str
    source_key: str
    dest_key: str

    def __post_init__(self):
        if self.source_key == self.dest_key:
            raise ValueError("source and destination keys must differ")


@dataclass(frozen=True)
class CustomAction:
    """Escape hatch for registered wranglers: a cell-level transform keyed
    by wrangler id. Applying one requires a registry entry (see
    :class:`WranglerRegistry`)."""

    wrangler_id: str
    cells: tuple
    params: tuple = ()  # sorted (key, value) pairs, JSON-scalar values

    def __post_init__(self):
        object.__setattr__(self, "cells", _check_refs(self.cells))
        object.__setattr__(self, "params", tuple(sorted(self.params)))


RepairAction = Union[ImputeGroupMean, ImputeColumnMean, RemoveRows, ConvertCells, MergeGroups, CustomAction]


@dataclass
class CellRestores:
    entries: list  # [(CellRef, prior CellValue)]


@dataclass
class RowReinserts:
    entries: list  # [(row index, [row values])], ascending by index


InverseRecord = Union[CellRestores, RowReinserts]


@dataclass
class ActionDiff:
    cells_changed: int
    rows_removed: int
    affected_groups: list
    mean_shift_per_group: dict  # GroupId -> float


@dataclass
class ActionResult:
    new_table: Table
    inverse: InverseRecord
    diff: ActionDiff


@dataclass
class WranglerEntry:
    """In-process custom wrangler: produces new values for an action's cells.

    ``transform(table, action)`` returns the replacement CellValue per listed
    cell, in order. ``code_template(action, helper)`` may render script lines
    for codegen; without one the generated script gets a TODO block.
    """

    transform: Callable
    code_template: Optional[Callable] = None


class WranglerRegistry:
    def __init__(self):
        self._entries: dict[str, WranglerEntry] = {}

    def register(self, wrangler_id: str, transform: Callable, code_template: Optional[Callable] = None):
        self._entries[wrangler_id] = WranglerEntry(transform, code_template)

    def get(self, wrangler_id: str) -> Optional[WranglerEntry]:
        return self._entries.get(wrangler_id)


_CONVERT_RE = re.compile(
    r"\s*(?P<currency>[$€£])?"
    r"(?P<sign>[+-])?"
    r"(?P<integer>\d{1,3}(?:,\d{3})+|\d+)"
    r"(?:\.(?P<fraction>\d+))?"
    r"(?P<suffix>[kKmMbB])?\s*"
)

_SUFFIX_SHIFT = {"k": 3, "m": 6, "b": 9}


def convert_numeric_string(text: str) -> Optional[float]:
    """Lenient numeric conversion used by repairs, not by type inference.

    Accepts an optional currency symbol ($ / euro / pound), sign, comma
    thousands separators in groups of three, a decimal part, and a single
    scale suffix (k, m, b and uppercase variants). The suffix shifts the
    decimal point textually so "12.345k" converts exactly. Returns None for
    anything outside the grammar or any non-finite result.
    """
    m = _CONVERT_RE.fullmatch(text)
    if m is None:
        return None
    digits = m.group("integer").replace(",", "")
    fraction = m.group("fraction") or ""
    suffix = m.group("suffix")
    if suffix:
        shift = _SUFFIX_SHIFT[suffix.lower()]
        fraction = fraction.ljust(shift, "0")
        digits += fraction[:shift]
        fraction = fraction[shift:]
    rendered = (m.group("sign") or "") + digits + ("." + fraction if fraction else "")
    value = float(rendered)
    if not math.isfinite(value):
        return None
    return value


def _strip_punct_casefold(text: str) -> str:
    kept = []
    for ch in text.casefold():
        if unicodedata.category(ch).startswith("P"):
            continue
        kept.append(ch)
    return " ".join("".join(kept).split())


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[len(b)]


def _initialism_match(short: str, long: str) -> bool:
    caps = [ch for ch in short if ch.isupper()]
    if len(caps) < 2:
        return False
    words = long.split()
    if len(words) < 2:
        return False
    acronym = "".join(caps).casefold()
    all_initials = "".join(w[0] for w in words).casefold()
    cap_initials = "".join(w[0] for w in words if w[0].isupper()).casefold()
    return acronym in (all_initials, cap_initials)


def key_similarity(a: str, b: str) -> float:
    """Similarity of two group keys in [0, 1]; symmetric.

    An initialism hit (e.g. an abbreviation matching the capitalized word
    initials of the longer key) scores 1.0 outright; otherwise the score is
    one minus the normalized edit distance over casefolded,
    punctuation-stripped forms.
    """
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    if len(short) < len(long) and _initialism_match(short, long):
        return 1.0
    na, nb = _strip_punct_casefold(a), _strip_punct_casefold(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - _levenshtein(na, nb) / longest


def suggest_merge_target(
    small: Group,
    candidates: Sequence[Group],
    min_similarity: float = 0.6,
    similarity_fn: Callable[[str, str], float] = key_similarity,
) -> Optional[Group]:
    """Most similar candidate group, or None below the similarity floor.

    Ties break toward the larger candidate, then the lexically smaller key.
    """
    if small.key is None:
        return None
    best: Optional[tuple] = None
    for candidate in candidates:
        if candidate.key is None or candidate.key == small.key:
            continue
        score = similarity_fn(small.key, candidate.key)
        rank = (score, len(candidate.rows), _ReverseStr(candidate.key))
        if best is None or rank > best[0]:
            best = (rank, candidate)
    if best is None or best[0][0] < min_similarity:
        return None
    return best[1]


class _ReverseStr(str):
    """Orders descending under max-comparison so lexically smaller keys win ties."""

    def __lt__(self, other):
        return str.__gt__(self, other)

    def __gt__(self, other):
        return str.__lt__(self, other)


def _group_mean_defined(table: Table, group: Group) -> bool:
    return group_stats(table, group).mean is not None


def _column_mean(table: Table, column: str) -> Optional[float]:
    col = table.column(column)
    numbers = col.values[col.number_mask()].tolist()
    if not numbers:
        return None
    return math.fsum(numbers) / len(numbers)


def suggest_repairs(
    record: AnomalyRecord,
    table: Table,
    groups: Sequence[Group],
    min_similarity: float = 0.6,
    custom_suggesters: Optional[Mapping[str, Callable]] = None,
    similarity_fn: Callable[[str, str], float] = key_similarity,
) -> list[RepairAction]:
    """Ordered repair candidates for one anomaly record.

    The preference order is fixed per anomaly type; candidates that cannot
    apply (undefined mean basis, unconvertible text, removal that would
    empty the table) are omitted.
    """
    if record.version != table.version:
        raise StaleRecord(f"record from version {record.version}, table at {table.version}")
    by_id = {g.group_id: g for g in groups}
    group = by_id.get(record.group_id)
    if group is None:
        raise StaleRecord(f"group {record.group_id[1]!r} not present in the supplied groups")

    cells = tuple(record.cells)
    rows = tuple(sorted({c.row for c in cells}))
    removal_ok = lambda n: n < table.row_count  # noqa: E731

    suggestions: list[RepairAction] = []
    tag = record.type.tag
    if tag == "missing_value" or tag == "outlier":
        impute_group = (
            ImputeGroupMean(cells, record.group_id) if _group_mean_defined(table, group) else None
        )
        impute_column = (
            ImputeColumnMean(cells) if _column_mean(table, cells[0].column) is not None else None
        )
        remove = RemoveRows(rows) if removal_ok(len(rows)) else None
        if tag == "missing_value":
            ordered = [impute_group, impute_column, remove]
        else:
            ordered = [remove, impute_group, impute_column]
        suggestions = [s for s in ordered if s is not None]
    elif tag == "type_mismatch":
        convertible = all(
            type(table.cell(c.row, c.column)) is str
            and convert_numeric_string(table.cell(c.row, c.column)) is not None
            for c in cells
        )
        if convertible:
            suggestions.append(ConvertCells(cells))
        if removal_ok(len(rows)):
            suggestions.append(RemoveRows(rows))
    elif tag == "incomplete_group":
        candidates = [g for g in groups if g.spec == group.spec and g.key not in (None, group.key)]
        target = suggest_merge_target(group, candidates, min_similarity, similarity_fn)
        if target is not None:
            suggestions.append(MergeGroups(group.spec.group_by, group.key, target.key))
        group_rows = tuple(int(r) for r in group.rows)
        if removal_ok(len(group_rows)):
            suggestions.append(RemoveRows(group_rows))
        if not suggestions:
            raise NoSuggestion(
                f"group {group.key!r} has no merge candidate and removing it would empty the table"
            )
    elif tag == "custom":
        if removal_ok(len(rows)):
            suggestions.append(RemoveRows(rows))
        if custom_suggesters and record.type.custom_id in custom_suggesters:
            suggestions.extend(custom_suggesters[record.type.custom_id](record, table))
    return suggestions


def _group_means_by_id(table: Table, specs: Sequence[GroupSpec]) -> dict:
    """Per-group target means (numpy arithmetic; informational diff use only)."""
    means: dict = {}
    for spec in specs:
        col = table.column(spec.target)
        values = col.values
        for key, rows in partition_rows(table, spec.group_by):
            if len(rows) < spec.min_support:
                continue
            vals = values[rows]
            count = int(np.count_nonzero(~np.isnan(vals)))
            means[(spec, key)] = float(np.nansum(vals)) / count if count else None
    return means


def _write_cells(table: Table, writes: Sequence[tuple[CellRef, CellValue]]) -> tuple[Table, CellRestores]:
    by_column: dict[str, list] = {}
    for ref, value in writes:
        by_column.setdefault(ref.column, []).append((ref.row, value))
    restores = [(ref, table.cell(ref.row, ref.column)) for ref, _ in writes]
    new_columns = []
    for col in table.columns:
        pending = by_column.get(col.name)
        if pending is None:
            new_columns.append(col)
            continue
        cells = list(col.cells)
        codes = col.codes.copy()
        values = col.values.copy()
        for row, value in pending:
            cells[row] = value
            if value is None:
                codes[row], values[row] = 0, np.nan
            elif type(value) is float:
                codes[row], values[row] = 1, value
            else:
                codes[row], values[row] = 2, np.nan
        new_columns.append(Column(col.name, col.kind, cells, _codes=codes, _values=values))
    new_table = Table(new_columns, name=table.name, version=table.version + 1)
    return new_table, CellRestores(restores)


def _remove_rows(table: Table, rows: Sequence[int]) -> tuple[Table, RowReinserts]:
    removed = sorted(set(rows))
    keep = np.ones(table.row_count, dtype=bool)
    keep[removed] = False
    snapshots = [(r, table.row(r)) for r in removed]
    new_columns = []
    for col in table.columns:
        cells = [cell for cell, k in zip(col.cells, keep) if k]
        new_columns.append(
            Column(col.name, col.kind, cells, _codes=col.codes[keep], _values=col.values[keep])
        )
    new_table = Table(new_columns, name=table.name, version=table.version + 1)
    return new_table, RowReinserts(snapshots)


def _validate_cells(table: Table, cells: Sequence[CellRef]) -> None:
    for ref in cells:
        if not table.has_column(ref.column):
            raise StaleAction(f"no such column: {ref.column!r}")
        if not 0 <= ref.row < table.row_count:
            raise StaleAction(f"row {ref.row} out of range")


def _finite_mean(numbers: list, context: str) -> float:
    if not numbers:
        raise EmptyMeanBasis(f"no numeric cells to average for {context}")
    mean = math.fsum(numbers) / len(numbers)
    if not math.isfinite(mean):
        raise EmptyMeanBasis(f"mean overflow for {context}")
    return mean


def apply_action(table: Table, action: RepairAction, groups: Sequence[Group],
                 registry: Optional[WranglerRegistry] = None) -> ActionResult:
    """Apply one repair as a pure transformation of the table.

    Returns the new table (version + 1), an inverse sufficient to restore
    the prior version bit-exactly, and a diff with per-group mean shifts.
    """
    specs = list(dict.fromkeys(g.spec for g in groups))
    old_means = _group_means_by_id(table, specs)

    removed_rows: list[int] = []
    if isinstance(action, ImputeGroupMean):
        _validate_cells(table, action.cells)
        group = next((g for g in groups if g.group_id == action.group_id), None)
        if group is None or group.version != table.version:
            raise StaleAction("imputation group is not part of the current grouping")
        target = group.spec.target
        row_set = set(group.rows.tolist())
        for ref in action.cells:
            if ref.column != target or ref.row not in row_set:
                raise StaleAction(f"cell {ref} lies outside the group's target slice")
        col = table.column(target)
        numbers = col.values[group.rows][col.codes[group.rows] == CODE_NUMBER].tolist()
        mean = _finite_mean(numbers, f"group {group.key!r}")
        new_table, inverse = _write_cells(table, [(ref, mean) for ref in action.cells])
        changed_cells = list(action.cells)
    elif isinstance(action, ImputeColumnMean):
        _validate_cells(table, action.cells)
        column = action.cells[0].column
        col = table.column(column)
        numbers = col.values[col.number_mask()].tolist()
        mean = _finite_mean(numbers, f"column {column!r}")
        new_table, inverse = _write_cells(table, [(ref, mean) for ref in action.cells])
        changed_cells = list(action.cells)
    elif isinstance(action, ConvertCells):
        _validate_cells(table, action.cells)
        writes = []
        for ref in action.cells:
            cell = table.cell(ref.row, ref.column)
            if type(cell) is not str:
                raise StaleAction(f"cell {ref} is not text")
            value = convert_numeric_string(cell)
            if value is None:
                raise NotConvertible(ref.row, ref.column, cell)
            writes.append((ref, value))
        new_table, inverse = _write_cells(table, writes)
        changed_cells = list(action.cells)
    elif isinstance(action, RemoveRows):
        for row in action.rows:
            if not 0 <= row < table.row_count:
                raise StaleAction(f"row {row} out of range")
        new_table, inverse = _remove_rows(table, action.rows)
        removed_rows = list(action.rows)
        changed_cells = []
    elif isinstance(action, MergeGroups):
        col = table.column(action.column)
        if col.kind is not ColumnKind.CATEGORICAL:
            raise KindMismatch(f"merge column {action.column!r} is not categorical")
        writes = [
            (CellRef(i, action.column), action.dest_key)
            for i, cell in enumerate(col.cells)
            if cell == action.source_key
        ]
        if writes:
            new_table, inverse = _write_cells(table, writes)
        else:  # merging an absent key is a no-op, which makes merges idempotent
            new_table = table.with_columns(table.columns, version=table.version + 1)
            inverse = CellRestores([])
        changed_cells = [ref for ref, _ in writes]
    elif isinstance(action, CustomAction):
        entry = registry.get(action.wrangler_id) if registry else None
        if entry is None:
            raise StaleAction(f"no wrangler registered for id {action.wrangler_id!r}")
        _validate_cells(table, action.cells)
        new_values = entry.transform(table, action)
        if len(new_values) != len(action.cells):
            raise StaleAction("wrangler returned a value count different from its cell count")
        new_table, inverse = _write_cells(table, list(zip(action.cells, new_values)))
        changed_cells = list(action.cells)
    else:
        raise TypeError(f"not a repair action: {action!r}")

    new_means = _group_means_by_id(new_table, specs)
    mean_shift = {}
    for gid, old in old_means.items():
        new = new_means.get(gid)
        if old is not None and new is not None:
            mean_shift[gid] = new - old

    affected = _affected_groups(action, groups, changed_cells, removed_rows)
    diff = ActionDiff(
        cells_changed=len(changed_cells),
        rows_removed=len(removed_rows),
        affected_groups=affected,
        mean_shift_per_group=mean_shift,
    )
    return ActionResult(new_table, inverse, diff)


def _affected_groups(action, groups: Sequence[Group], changed_cells, removed_rows) -> list:
    affected = []
    if isinstance(action, MergeGroups):
        keys = {action.source_key, action.dest_key}
        for g in groups:
            if g.spec.group_by == action.column and g.key in keys:
                affected.append(g.group_id)
        return affected
    if removed_rows:
        removed = set(removed_rows)
        for g in groups:
            if removed.intersection(g.rows.tolist()):
                affected.append(g.group_id)
        return affected
    by_column: dict[str, set] = {}
    for ref in changed_cells:
        by_column.setdefault(ref.column, set()).add(ref.row)
    for g in groups:
        rows = by_column.get(g.spec.target)
        if rows and rows.intersection(g.rows.tolist()):
            affected.append(g.group_id)
    return affected


def apply_inverse(table: Table, inverse: InverseRecord, version: int) -> Table:
    """Rewind one action: restore prior cells or reinsert removed rows."""
    if isinstance(inverse, CellRestores):
        if not inverse.entries:
            return table.with_columns(table.columns, version=version)
        by_column: dict[str, list] = {}
        for ref, value in inverse.entries:
            by_column.setdefault(ref.column, []).append((ref.row, value))
        new_columns = []
        for col in table.columns:
            pending = by_column.get(col.name)
            if pending is None:
                new_columns.append(col)
                continue
            cells = list(col.cells)
            for row, value in pending:
                cells[row] = value
            new_columns.append(Column(col.name, col.kind, cells))
        return Table(new_columns, name=table.name, version=version)
    if isinstance(inverse, RowReinserts):
        entries = sorted(inverse.entries)
        new_count = table.row_count + len(entries)
        insert_at = {idx: row for idx, row in entries}
        new_columns = []
        for c, col in enumerate(table.columns):
            cells = []
            source = iter(col.cells)
            for i in range(new_count):
                if i in insert_at:
                    cells.append(insert_at[i][c])
                else:
                    cells.append(next(source))
            new_columns.append(Column(col.name, col.kind, cells))
        return Table(new_columns, name=table.name, version=version)
    raise TypeError(f"not an inverse record: {inverse!r}")
