"""Subgroup enumeration: categorical key slices over numeric target columns."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import KindMismatch, NoCategoricalColumns, NoNumericColumns, StaleGroup
from .table import CODE_MISSING, CODE_NUMBER, CODE_TEXT, ColumnKind, Table, format_number


@dataclass(frozen=True)
class GroupSpec:
    """A grouping request: slice `group_by` values, inspect `target` numbers."""

    group_by: str
    target: str
    min_support: int = 1

    def __post_init__(self):
        if self.group_by == self.target:
            raise ValueError("group_by and target must differ")
        if self.min_support < 1:
            raise ValueError("min_support must be >= 1")


class Group:
    """The rows sharing one group_by value. ``key is None`` marks the
    sentinel group of rows whose group_by cell is Missing."""

    __slots__ = ("spec", "key", "rows", "version")

    def __init__(self, spec: GroupSpec, key: Optional[str], rows: np.ndarray, version: int):
        self.spec = spec
        self.key = key
        self.rows = rows
        self.version = version

    @property
    def group_id(self) -> tuple:
        return (self.spec, self.key)

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return f"Group({self.spec.group_by}={self.key!r}, {len(self.rows)} rows)"


@dataclass
class GroupStats:
    count: int
    mean: Optional[float]
    std: Optional[float]
    missing_count: int
    mismatch_count: int


def _key_sort(key: Optional[str]):
    # Ascending by UTF-8 code point, Missing-sentinel group last.
    return (key is None, key or "")


def partition_rows(table: Table, group_by: str) -> list[tuple[Optional[str], np.ndarray]]:
    """Partition all row indices by the value of one categorical column.

    Cached per table version since several specs share a group_by column.
    """
    cached = table._partitions.get(group_by)
    if cached is not None:
        return cached
    column = table.column(group_by)
    buckets: dict = {}
    for i, cell in enumerate(column.cells):
        if type(cell) is float:  # constructed tables may hold stray numbers
            cell = format_number(cell)
        bucket = buckets.get(cell)
        if bucket is None:
            buckets[cell] = [i]
        else:
            bucket.append(i)
    parts = [
        (key, np.asarray(buckets[key], dtype=np.int64))
        for key in sorted(buckets, key=_key_sort)
    ]
    table._partitions[group_by] = parts
    return parts


def _check_spec(table: Table, spec: GroupSpec) -> None:
    if table.column(spec.group_by).kind is not ColumnKind.CATEGORICAL:
        raise KindMismatch(f"group_by column {spec.group_by!r} is not categorical")
    if table.column(spec.target).kind is not ColumnKind.NUMERIC:
        raise KindMismatch(f"target column {spec.target!r} is not numeric")


def enumerate_groups_full(table: Table, spec: GroupSpec) -> tuple[list[Group], int]:
    """All groups for a spec plus the tally of rows excluded by min_support."""
    _check_spec(table, spec)
    groups = []
    excluded = 0
    for key, rows in partition_rows(table, spec.group_by):
        if len(rows) < spec.min_support:
            excluded += len(rows)
            continue
        groups.append(Group(spec, key, rows, table.version))
    return groups, excluded


def enumerate_groups(table: Table, spec: GroupSpec) -> list[Group]:
    return enumerate_groups_full(table, spec)[0]


def enumerate_all_specs(
    table: Table,
    targets: Optional[Sequence[str]] = None,
    min_support: int = 1,
) -> list[GroupSpec]:
    """Cartesian product of every categorical column with the target columns."""
    categorical = table.categorical_columns()
    if not categorical:
        raise NoCategoricalColumns("table has no categorical columns")
    if targets is None:
        numeric = table.numeric_columns()
        if not numeric:
            raise NoNumericColumns("table has no numeric columns")
    else:
        numeric = list(targets)
        if not numeric:
            raise NoNumericColumns("empty target list")
        for name in numeric:
            if table.column(name).kind is not ColumnKind.NUMERIC:
                raise KindMismatch(f"target column {name!r} is not numeric")
    return [
        GroupSpec(group_by=g, target=t, min_support=min_support)
        for g in categorical
        for t in numeric
    ]


def group_stats(table: Table, group: Group) -> GroupStats:
    """Count/mean/std over the group's target cells that are Numbers.

    Population standard deviation; mean and std are None when the group has
    no usable numeric cells.
    """
    if group.version != table.version:
        raise StaleGroup(
            f"group was built at version {group.version}, table is at {table.version}"
        )
    column = table.column(group.spec.target)
    codes = column.codes[group.rows]
    missing = int(np.count_nonzero(codes == CODE_MISSING))
    mismatch = int(np.count_nonzero(codes == CODE_TEXT))
    numbers = column.values[group.rows][codes == CODE_NUMBER]
    if numbers.size == 0:
        return GroupStats(len(group.rows), None, None, missing, mismatch)
    vals = numbers.tolist()
    mean = math.fsum(vals) / len(vals)
    var = math.fsum((v - mean) ** 2 for v in vals) / len(vals)
    return GroupStats(len(group.rows), mean, math.sqrt(var), missing, mismatch)
