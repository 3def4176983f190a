"""Detectors, anomaly records, and the two retrieval indexes.

The four built-in detectors (missing values, sigma-band outliers, type
mismatches in numeric columns, under-populated groups) run over every
group of every spec. Custom detectors come in two forms: declarative rule
text (see :mod:`wranglekit.rules`) carried in the config, and in-process
callables with the signature ``(cell, stats) -> bool``.

Outlier statistics are pooled per numeric column: the mean and population
standard deviation are taken over all Number cells of the column so each
group is judged against the column-wide distribution. Sums use
``math.fsum`` which makes the flagged set independent of iteration order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import KindMismatch, StaleGroup, WrangleError
from .groups import Group, GroupSpec, GroupStats, enumerate_groups, group_stats
from .rules import RuleExpr, eval_rule, parse_rule
from .table import CODE_TEXT, CellRef, CellValue, ColumnKind, Table

_CUSTOM_ID_RE = re.compile(r"[A-Za-z0-9_-]+")

GroupId = tuple  # (GroupSpec, key or None)


@dataclass(frozen=True)
class AnomalyType:
    tag: str
    custom_id: Optional[str] = None

    def sort_key(self) -> tuple:
        return (_TAG_ORDER[self.tag], self.custom_id or "")

    def to_string(self) -> str:
        if self.tag == "custom":
            return f"custom:{self.custom_id}"
        return self.tag

    @staticmethod
    def from_string(text: str) -> "AnomalyType":
        if text.startswith("custom:"):
            return custom_type(text[len("custom:"):])
        if text not in _TAG_ORDER or text == "custom":
            raise ValueError(f"unknown anomaly type: {text!r}")
        return AnomalyType(text)


MISSING_VALUE = AnomalyType("missing_value")
OUTLIER = AnomalyType("outlier")
TYPE_MISMATCH = AnomalyType("type_mismatch")
INCOMPLETE_GROUP = AnomalyType("incomplete_group")

_TAG_ORDER = {
    "missing_value": 0,
    "outlier": 1,
    "type_mismatch": 2,
    "incomplete_group": 3,
    "custom": 4,
}


def custom_type(custom_id: str) -> AnomalyType:
    if not _CUSTOM_ID_RE.fullmatch(custom_id or ""):
        raise ValueError(f"invalid custom anomaly id: {custom_id!r}")
    return AnomalyType("custom", custom_id)


@dataclass(slots=True)
class AnomalyRecord:
    type: AnomalyType
    group_id: GroupId
    cells: list  # list[CellRef]; empty for group-level records
    detail: dict
    version: int = 0


class AnomalyIndex:
    """Two-way anomaly retrieval: type -> groups and group -> types,
    plus per-group per-type record counts."""

    def __init__(self):
        self.by_type: dict[AnomalyType, set] = {}
        self.by_group: dict[GroupId, set] = {}
        self.counts: dict[GroupId, dict[AnomalyType, int]] = {}

    @classmethod
    def build(cls, records: Sequence[AnomalyRecord]) -> "AnomalyIndex":
        index = cls()
        for record in records:
            index.by_type.setdefault(record.type, set()).add(record.group_id)
            index.by_group.setdefault(record.group_id, set()).add(record.type)
            per_type = index.counts.setdefault(record.group_id, {})
            per_type[record.type] = per_type.get(record.type, 0) + 1
        return index

    def total(self, group_id: GroupId) -> int:
        return sum(self.counts.get(group_id, {}).values())

    def record_count(self) -> int:
        return sum(sum(per_type.values()) for per_type in self.counts.values())


@dataclass
class DetectorConfig:
    outlier_sigma: float = 2.0
    incomplete_threshold: int = 2
    numeric_majority: float = 0.5
    top_k: int = 3
    custom_rules: list = field(default_factory=list)  # [(id, rule source), ...]

    def __post_init__(self):
        if self.outlier_sigma <= 0:
            raise ValueError("outlier_sigma must be > 0")
        if self.incomplete_threshold < 1:
            raise ValueError("incomplete_threshold must be >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        normalized = []
        seen = set()
        for entry in self.custom_rules:
            if isinstance(entry, Mapping):
                rule_id, source = entry["id"], entry["rule"]
            else:
                rule_id, source = entry
            custom_type(rule_id)  # validates the id
            if rule_id in seen:
                raise ValueError(f"duplicate custom rule id: {rule_id!r}")
            seen.add(rule_id)
            normalized.append((rule_id, source))
        self.custom_rules = normalized

    def to_json(self) -> dict:
        return {
            "outlier_sigma": self.outlier_sigma,
            "incomplete_threshold": self.incomplete_threshold,
            "numeric_majority": self.numeric_majority,
            "top_k": self.top_k,
            "custom_rules": [{"id": i, "rule": r} for i, r in self.custom_rules],
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "DetectorConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in payload.items() if k in known})


def _check_group(table: Table, group: Group) -> None:
    if group.version != table.version:
        raise StaleGroup(
            f"group was built at version {group.version}, table is at {table.version}"
        )


def detect_missing(table: Table, group: Group) -> list[AnomalyRecord]:
    """One MissingValue record per Missing target cell in the group."""
    _check_group(table, group)
    column = table.column(group.spec.target)
    mask = column.missing_mask()
    rows = group.rows[mask[group.rows]]
    return [
        AnomalyRecord(MISSING_VALUE, group.group_id, [CellRef(int(r), group.spec.target)], {}, table.version)
        for r in rows
    ]


def pooled_column_stats(table: Table, column: str) -> tuple[Optional[float], Optional[float], int]:
    """(mean, population std, n) over every Number cell of a column."""
    col = table.column(column)
    numbers = col.values[col.number_mask()].tolist()
    n = len(numbers)
    if n == 0:
        return None, None, 0
    mean = math.fsum(numbers) / n
    var = math.fsum((v - mean) ** 2 for v in numbers) / n
    return mean, math.sqrt(var), n


def detect_outliers(
    table: Table,
    column: str,
    groups: Sequence[Group],
    sigma: float = 2.0,
) -> list[AnomalyRecord]:
    """Flag cells beyond ``sigma`` population standard deviations from the
    pooled column mean; zero variance flags nothing."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    col = table.column(column)
    if col.kind is not ColumnKind.NUMERIC:
        raise KindMismatch(f"column {column!r} is not numeric")
    for group in groups:
        _check_group(table, group)
    mean, std, _ = pooled_column_stats(table, column)
    if mean is None or std == 0.0:
        return []
    flagged = np.abs(col.values - mean) > sigma * std  # NaN rows compare false
    records = []
    for group in groups:
        for r in group.rows[flagged[group.rows]]:
            deviation = abs(col.values[r] - mean) / std
            records.append(
                AnomalyRecord(OUTLIER, group.group_id, [CellRef(int(r), column)],
                              {"deviation": float(deviation)}, table.version)
            )
    return records


def detect_type_mismatch(table: Table, column: str, groups: Sequence[Group]) -> list[AnomalyRecord]:
    """One TypeMismatch record per Text cell in a numeric column."""
    col = table.column(column)
    if col.kind is not ColumnKind.NUMERIC:
        raise KindMismatch(f"column {column!r} is not numeric; mismatch is undefined")
    mask = col.codes == CODE_TEXT
    records = []
    for group in groups:
        _check_group(table, group)
        for r in group.rows[mask[group.rows]]:
            records.append(
                AnomalyRecord(TYPE_MISMATCH, group.group_id, [CellRef(int(r), column)], {}, table.version)
            )
    return records


def detect_incomplete(groups: Sequence[Group], threshold: int = 2) -> list[AnomalyRecord]:
    """One group-level record per group strictly smaller than the threshold."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    records = []
    for group in groups:
        if len(group.rows) < threshold:
            records.append(
                AnomalyRecord(
                    INCOMPLETE_GROUP,
                    group.group_id,
                    [],
                    {"count": float(len(group.rows)), "threshold": float(threshold)},
                    group.version,
                )
            )
    return records


DetectorFn = Callable[[CellValue, GroupStats], bool]


def _record_sort_key(record: AnomalyRecord) -> tuple:
    row = record.cells[0].row if record.cells else -1
    return (row, record.type.sort_key())


def run_detectors(
    table: Table,
    specs: Sequence[GroupSpec],
    config: DetectorConfig = DetectorConfig(),
    extra_detectors: Optional[Mapping[str, DetectorFn]] = None,
) -> tuple[list[AnomalyRecord], AnomalyIndex]:
    """Run the default detectors plus every configured custom detector over
    every spec's groups, in deterministic order, and build both indexes.

    Record order: spec order, then group key (missing sentinel last), then
    row (group-level records first), then the fixed anomaly type order.
    """
    parsed_rules: list[tuple[str, RuleExpr]] = [
        (rule_id, parse_rule(source)) for rule_id, source in config.custom_rules
    ]
    plugins = dict(extra_detectors or {})
    for plugin_id in plugins:
        custom_type(plugin_id)
        if any(plugin_id == rule_id for rule_id, _ in parsed_rules):
            raise ValueError(f"custom detector id {plugin_id!r} registered twice")

    records: list[AnomalyRecord] = []
    outlier_cache: dict[str, np.ndarray] = {}
    for spec in specs:
        try:
            groups = enumerate_groups(table, spec)
            col = table.column(spec.target)
            if spec.target not in outlier_cache:
                mean, std, _ = pooled_column_stats(table, spec.target)
                if mean is None or std == 0.0:
                    flagged = np.zeros(table.row_count, dtype=bool)
                    deviations = np.zeros(table.row_count, dtype=np.float64)
                else:
                    deviations = np.abs(col.values - mean) / std
                    flagged = deviations > config.outlier_sigma
                outlier_cache[spec.target] = (flagged, deviations)
            flagged, deviations = outlier_cache[spec.target]

            missing_mask = col.missing_mask()
            text_mask = col.codes == CODE_TEXT
            needs_stats = bool(parsed_rules or plugins)
            for group in groups:
                group_records: list[AnomalyRecord] = []
                rows = group.rows
                for r in rows[missing_mask[rows]]:
                    group_records.append(
                        AnomalyRecord(MISSING_VALUE, group.group_id,
                                      [CellRef(int(r), spec.target)], {}, table.version)
                    )
                for r in rows[flagged[rows]]:
                    group_records.append(
                        AnomalyRecord(OUTLIER, group.group_id, [CellRef(int(r), spec.target)],
                                      {"deviation": float(deviations[r])}, table.version)
                    )
                for r in rows[text_mask[rows]]:
                    group_records.append(
                        AnomalyRecord(TYPE_MISMATCH, group.group_id,
                                      [CellRef(int(r), spec.target)], {}, table.version)
                    )
                if len(rows) < config.incomplete_threshold:
                    group_records.append(
                        AnomalyRecord(
                            INCOMPLETE_GROUP, group.group_id, [],
                            {"count": float(len(rows)), "threshold": float(config.incomplete_threshold)},
                            table.version,
                        )
                    )
                if needs_stats:
                    stats = group_stats(table, group)
                    cells = col.cells
                    for rule_id, rule in parsed_rules:
                        rule_type = custom_type(rule_id)
                        for r in rows:
                            if eval_rule(rule, cells[r], stats):
                                group_records.append(
                                    AnomalyRecord(rule_type, group.group_id,
                                                  [CellRef(int(r), spec.target)], {}, table.version)
                                )
                    for plugin_id, fn in plugins.items():
                        plugin_type = custom_type(plugin_id)
                        for r in rows:
                            if fn(cells[r], stats):
                                group_records.append(
                                    AnomalyRecord(plugin_type, group.group_id,
                                                  [CellRef(int(r), spec.target)], {}, table.version)
                                )
                group_records.sort(key=_record_sort_key)
                records.extend(group_records)
        except WrangleError as exc:
            exc.spec = spec
            raise
    return records, AnomalyIndex.build(records)
