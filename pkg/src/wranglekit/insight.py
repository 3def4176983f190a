"""Read-side analytics: group ranking, attribute summaries, chart payloads.

Chart payloads are plain JSON-ready dicts; their shape is pinned by the
schemas in :mod:`wranglekit.schemas` and shared verbatim with the HTTP API,
so the CLI report and a browser client always agree on the numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .anomalies import AnomalyIndex, AnomalyRecord, AnomalyType, GroupId
from .errors import UnsupportedKind
from .groups import Group, GroupSpec, enumerate_groups
from .table import CODE_NUMBER, Table

CHART_KINDS = ("stacked_histogram", "scatter", "line", "heatmap")
CHART_MODES = ("group_name", "error_type")

NO_ERROR_CLASS = 0
_BUILTIN_CLASS = {
    "missing_value": 1,
    "outlier": 2,
    "type_mismatch": 3,
    "incomplete_group": 4,
}
HEATMAP_LEVELS = 10


@dataclass
class RankedGroup:
    group_id: GroupId
    total_anomalies: int
    per_type: dict  # AnomalyType -> int
    dominant_type: AnomalyType


@dataclass
class AttributeSummary:
    column: str
    per_type_counts: dict  # AnomalyType -> int
    per_type_frequency: dict  # AnomalyType -> fraction of the column's cells
    score: float


def _dominant(per_type: dict) -> AnomalyType:
    return min(per_type, key=lambda t: (-per_type[t], t.sort_key()))


def _group_id_sort(group_id: GroupId) -> tuple:
    spec, key = group_id
    return (key is None, key or "", spec.group_by, spec.target, spec.min_support)


def rank_groups(index: AnomalyIndex, k: int) -> list[RankedGroup]:
    """Top-k groups by total anomaly count; zero-anomaly groups never rank."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = [
        RankedGroup(gid, sum(per_type.values()), dict(per_type), _dominant(per_type))
        for gid, per_type in index.counts.items()
        if per_type
    ]
    ranked.sort(key=lambda r: (-r.total_anomalies,) + _group_id_sort(r.group_id))
    return ranked[:k]


def attribute_summary(table: Table, records: Sequence[AnomalyRecord]) -> list[AttributeSummary]:
    """Per-column anomaly tallies, ordered by total count.

    Cell-level records are deduplicated across specs (the same missing cell
    seen under two group-by columns counts once), which keeps every
    frequency within [0, 1]. Group-level records count toward the group_by
    column, deduplicated by group identity.
    """
    distinct: dict[str, dict[AnomalyType, set]] = {}
    for record in records:
        if record.cells:
            for ref in record.cells:
                distinct.setdefault(ref.column, {}).setdefault(record.type, set()).add(ref)
        else:
            column = record.group_id[0].group_by
            distinct.setdefault(column, {}).setdefault(record.type, set()).add(record.group_id)
    rows = table.row_count
    summaries = []
    for column, per_type_sets in distinct.items():
        counts = {t: len(refs) for t, refs in per_type_sets.items()}
        freq = {t: (c / rows if rows else 0.0) for t, c in counts.items()}
        summaries.append(AttributeSummary(column, counts, freq, float(sum(counts.values()))))
    summaries.sort(key=lambda s: (-s.score, s.column))
    return summaries


def bin_edges(values: np.ndarray) -> np.ndarray:
    """Histogram edges via the Freedman-Diaconis width, clamped to 5..50
    bins, with a 10-bin fallback when the IQR is zero and a single
    degenerate bin when every value is identical."""
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax == vmin:
        return np.array([vmin, vmax], dtype=np.float64)
    q75, q25 = np.percentile(values, [75.0, 25.0])
    iqr = float(q75 - q25)
    if iqr == 0.0:
        nbins = 10
    else:
        width = 2.0 * iqr * len(values) ** (-1.0 / 3.0)
        nbins = int(np.ceil((vmax - vmin) / width))
        nbins = max(5, min(50, nbins))
    return np.linspace(vmin, vmax, nbins + 1)


def assign_bins(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin index per value: right-open bins, last bin closed."""
    nbins = len(edges) - 1
    span = edges[-1] - edges[0]
    if nbins <= 0 or span == 0:
        return np.zeros(len(values), dtype=np.int64)
    idx = np.floor((values - edges[0]) / span * nbins).astype(np.int64)
    return np.clip(idx, 0, nbins - 1)


def _spec_records(records: Sequence[AnomalyRecord], spec: GroupSpec) -> list[AnomalyRecord]:
    return [r for r in records if r.group_id[0] == spec]


def _group_color_classes(groups: Sequence[Group]) -> dict[Optional[str], int]:
    return {g.key: i for i, g in enumerate(groups)}


def _type_color_class(t: AnomalyType, custom_ids: list[str]) -> int:
    if t.tag == "custom":
        return 5 + custom_ids.index(t.custom_id)
    return _BUILTIN_CLASS[t.tag]


def _key_label(key: Optional[str]) -> str:
    return "(missing)" if key is None else key


def chart_payload(
    table: Table,
    spec: GroupSpec,
    kind: str,
    mode: str,
    records: Sequence[AnomalyRecord],
) -> dict:
    """Render-ready aggregates for one (spec, chart kind, color mode).

    Counts and bin edges are mode-independent; switching mode only relabels
    segments and their color classes (group key vs the group's dominant
    anomaly type, with a reserved class for anomaly-free groups).
    """
    if kind not in CHART_KINDS:
        raise UnsupportedKind(f"unknown chart kind: {kind!r}")
    if mode not in CHART_MODES:
        raise UnsupportedKind(f"unknown chart mode: {mode!r}")

    groups = enumerate_groups(table, spec)
    spec_records = _spec_records(records, spec)
    custom_ids = sorted({r.type.custom_id for r in spec_records if r.type.tag == "custom"})

    per_group_counts: dict[Optional[str], dict[AnomalyType, int]] = {}
    for record in spec_records:
        counts = per_group_counts.setdefault(record.group_id[1], {})
        counts[record.type] = counts.get(record.type, 0) + 1
    group_class = _group_color_classes(groups)

    def segment_identity(key: Optional[str]) -> tuple[str, int]:
        if mode == "group_name":
            return _key_label(key), group_class[key]
        counts = per_group_counts.get(key)
        if not counts:
            return "no_error", NO_ERROR_CLASS
        dominant = _dominant(counts)
        return dominant.to_string(), _type_color_class(dominant, custom_ids)

    anomaly_marks = [
        {"row": ref.row, "column": ref.column, "type": record.type.to_string()}
        for record in spec_records
        for ref in record.cells
    ]
    cell_anomalies: dict[int, list[str]] = {}
    for record in spec_records:
        for ref in record.cells:
            cell_anomalies.setdefault(ref.row, []).append(record.type.to_string())

    target = table.column(spec.target)
    values = target.values
    number_mask = target.codes == CODE_NUMBER

    payload: dict = {
        "schema_version": 1,
        "chart_kind": kind,
        "mode": mode,
        "version": table.version,
        "spec": {
            "group_by": spec.group_by,
            "target": spec.target,
            "min_support": spec.min_support,
        },
        "groups": [
            {"key": g.key, "label": _key_label(g.key), "color_class": group_class[g.key],
             "size": int(len(g.rows))}
            for g in groups
        ],
        "anomaly_marks": anomaly_marks,
    }

    if kind in ("stacked_histogram", "heatmap"):
        pooled = values[number_mask]
        if pooled.size == 0:
            edges = np.array([0.0, 0.0])
        else:
            edges = bin_edges(pooled)
        nbins = max(len(edges) - 1, 1)
        payload["bin_edges"] = [float(e) for e in edges]
        per_bin_group: dict[tuple[int, Optional[str]], int] = {}
        for g in groups:
            rows = g.rows[number_mask[g.rows]]
            if len(rows) == 0:
                continue
            idx = assign_bins(values[rows], edges)
            uniques, counts = np.unique(idx, return_counts=True)
            for b, c in zip(uniques, counts):
                per_bin_group[(int(b), g.key)] = int(c)
        if kind == "stacked_histogram":
            bins = []
            for b in range(nbins):
                segments = []
                for g in groups:
                    count = per_bin_group.get((b, g.key), 0)
                    if count == 0:
                        continue
                    label, color = segment_identity(g.key)
                    segments.append({
                        "group_key": g.key,
                        "label": label,
                        "color_class": color,
                        "count": count,
                    })
                bins.append({
                    "lo": float(edges[b]),
                    "hi": float(edges[b + 1]) if len(edges) > b + 1 else float(edges[b]),
                    "segments": segments,
                })
            payload["bins"] = bins
        else:
            max_count = max(per_bin_group.values(), default=0)
            cells = []
            for g in groups:
                for b in range(nbins):
                    count = per_bin_group.get((b, g.key), 0)
                    level = 0 if max_count == 0 else math.ceil((HEATMAP_LEVELS - 1) * count / max_count)
                    cells.append({
                        "group_key": g.key,
                        "bin": b,
                        "count": count,
                        "color_class": int(level),
                    })
            payload["cells"] = cells
    elif kind == "scatter":
        points = []
        for g in groups:
            label, color = segment_identity(g.key)
            for r in g.rows[number_mask[g.rows]]:
                points.append({
                    "row": int(r),
                    "value": float(values[r]),
                    "group_key": g.key,
                    "label": label,
                    "color_class": color,
                    "anomalies": cell_anomalies.get(int(r), []),
                })
        points.sort(key=lambda p: p["row"])
        payload["points"] = points
    else:  # line
        series = []
        for g in groups:
            label, color = segment_identity(g.key)
            rows = g.rows[number_mask[g.rows]]
            series.append({
                "group_key": g.key,
                "label": label,
                "color_class": color,
                "points": [{"row": int(r), "value": float(values[r])} for r in rows],
            })
        payload["series"] = series
    return payload
