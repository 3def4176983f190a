"""JSON codecs and JSON Schemas for the wire formats.

Three external formats live here:

* repair actions / recipes (consumed by the CLI ``apply`` command and the
  HTTP action endpoints, produced by session export),
* anomaly records (HTTP anomaly listing and the suggestions endpoint),
* chart payloads (the server <-> browser contract).

The schema dicts double as documentation and as validators in the test
suite and the recipe loader.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .anomalies import AnomalyRecord, AnomalyType
from .errors import RecipeSchemaError
from .groups import GroupSpec
from .repairs import (
    ConvertCells,
    CustomAction,
    ImputeColumnMean,
    ImputeGroupMean,
    MergeGroups,
    RemoveRows,
    RepairAction,
)
from .table import CellRef


def spec_to_json(spec: GroupSpec) -> dict:
    return {"group_by": spec.group_by, "target": spec.target, "min_support": spec.min_support}


def spec_from_json(payload: Mapping) -> GroupSpec:
    return GroupSpec(
        group_by=payload["group_by"],
        target=payload["target"],
        min_support=int(payload.get("min_support", 1)),
    )


def group_id_to_json(group_id: tuple) -> dict:
    spec, key = group_id
    payload = spec_to_json(spec)
    payload["key"] = key
    return payload


def group_id_from_json(payload: Mapping) -> tuple:
    return (spec_from_json(payload), payload.get("key"))


def cell_to_json(ref: CellRef) -> dict:
    return {"row": ref.row, "column": ref.column}


def cell_from_json(payload: Mapping) -> CellRef:
    return CellRef(int(payload["row"]), payload["column"])


def action_to_json(action: RepairAction) -> dict:
    if isinstance(action, ImputeGroupMean):
        return {
            "type": "impute_group_mean",
            "cells": [cell_to_json(c) for c in action.cells],
            "group": group_id_to_json(action.group_id),
        }
    if isinstance(action, ImputeColumnMean):
        return {"type": "impute_column_mean", "cells": [cell_to_json(c) for c in action.cells]}
    if isinstance(action, RemoveRows):
        return {"type": "remove_rows", "rows": list(action.rows)}
    if isinstance(action, ConvertCells):
        return {"type": "convert_cells", "cells": [cell_to_json(c) for c in action.cells]}
    if isinstance(action, MergeGroups):
        return {
            "type": "merge_groups",
            "column": action.column,
            "source_key": action.source_key,
            "dest_key": action.dest_key,
        }
    if isinstance(action, CustomAction):
        return {
            "type": "custom",
            "id": action.wrangler_id,
            "cells": [cell_to_json(c) for c in action.cells],
            "params": dict(action.params),
        }
    raise TypeError(f"not a repair action: {action!r}")


def action_from_json(payload: Mapping) -> RepairAction:
    try:
        kind = payload["type"]
        if kind == "impute_group_mean":
            return ImputeGroupMean(
                cells=tuple(cell_from_json(c) for c in payload["cells"]),
                group_id=group_id_from_json(payload["group"]),
            )
        if kind == "impute_column_mean":
            return ImputeColumnMean(cells=tuple(cell_from_json(c) for c in payload["cells"]))
        if kind == "remove_rows":
            return RemoveRows(rows=tuple(int(r) for r in payload["rows"]))
        if kind == "convert_cells":
            return ConvertCells(cells=tuple(cell_from_json(c) for c in payload["cells"]))
        if kind == "merge_groups":
            return MergeGroups(
                column=payload["column"],
                source_key=payload["source_key"],
                dest_key=payload["dest_key"],
            )
        if kind == "custom":
            return CustomAction(
                wrangler_id=payload["id"],
                cells=tuple(cell_from_json(c) for c in payload["cells"]),
                params=tuple(payload.get("params", {}).items()),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise RecipeSchemaError(f"malformed action payload: {exc}") from exc
    raise RecipeSchemaError(f"unknown action type: {payload.get('type')!r}")


def record_to_json(record: AnomalyRecord) -> dict:
    return {
        "type": record.type.to_string(),
        "group": group_id_to_json(record.group_id),
        "cells": [cell_to_json(c) for c in record.cells],
        "detail": dict(record.detail),
        "version": record.version,
    }


def record_from_json(payload: Mapping) -> AnomalyRecord:
    return AnomalyRecord(
        type=AnomalyType.from_string(payload["type"]),
        group_id=group_id_from_json(payload["group"]),
        cells=[cell_from_json(c) for c in payload.get("cells", [])],
        detail=dict(payload.get("detail", {})),
        version=int(payload.get("version", 0)),
    )


# --------------------------------------------------------------------------
# JSON Schemas (draft 2020-12 subset understood by jsonschema)
# --------------------------------------------------------------------------

CELL_SCHEMA = {
    "type": "object",
    "required": ["row", "column"],
    "properties": {
        "row": {"type": "integer", "minimum": 0},
        "column": {"type": "string"},
    },
    "additionalProperties": False,
}

GROUP_ID_SCHEMA = {
    "type": "object",
    "required": ["group_by", "target", "key"],
    "properties": {
        "group_by": {"type": "string"},
        "target": {"type": "string"},
        "min_support": {"type": "integer", "minimum": 1},
        "key": {"type": ["string", "null"]},
    },
    "additionalProperties": False,
}

ACTION_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {
            "enum": [
                "impute_group_mean",
                "impute_column_mean",
                "remove_rows",
                "convert_cells",
                "merge_groups",
                "custom",
            ]
        },
        "cells": {"type": "array", "items": CELL_SCHEMA, "minItems": 1},
        "rows": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "group": GROUP_ID_SCHEMA,
        "column": {"type": "string"},
        "source_key": {"type": "string"},
        "dest_key": {"type": "string"},
        "id": {"type": "string", "pattern": "^[A-Za-z0-9_-]+$"},
        "params": {"type": "object"},
    },
    "allOf": [
        {
            "if": {"properties": {"type": {"const": "impute_group_mean"}}},
            "then": {"required": ["cells", "group"]},
        },
        {
            "if": {"properties": {"type": {"const": "impute_column_mean"}}},
            "then": {"required": ["cells"]},
        },
        {
            "if": {"properties": {"type": {"const": "remove_rows"}}},
            "then": {"required": ["rows"]},
        },
        {
            "if": {"properties": {"type": {"const": "convert_cells"}}},
            "then": {"required": ["cells"]},
        },
        {
            "if": {"properties": {"type": {"const": "merge_groups"}}},
            "then": {"required": ["column", "source_key", "dest_key"]},
        },
        {
            "if": {"properties": {"type": {"const": "custom"}}},
            "then": {"required": ["id", "cells"]},
        },
    ],
}

RECIPE_SCHEMA = {
    "type": "object",
    "required": ["actions"],
    "properties": {
        "schema_version": {"type": "integer"},
        "actions": {"type": "array", "items": ACTION_SCHEMA},
    },
}

RECORD_SCHEMA = {
    "type": "object",
    "required": ["type", "group", "cells", "detail", "version"],
    "properties": {
        "type": {"type": "string"},
        "group": GROUP_ID_SCHEMA,
        "cells": {"type": "array", "items": CELL_SCHEMA},
        "detail": {"type": "object", "additionalProperties": {"type": "number"}},
        "version": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

_SEGMENT_SCHEMA = {
    "type": "object",
    "required": ["group_key", "label", "color_class", "count"],
    "properties": {
        "group_key": {"type": ["string", "null"]},
        "label": {"type": "string"},
        "color_class": {"type": "integer", "minimum": 0},
        "count": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

_MARK_SCHEMA = {
    "type": "object",
    "required": ["row", "column", "type"],
    "properties": {
        "row": {"type": "integer", "minimum": 0},
        "column": {"type": "string"},
        "type": {"type": "string"},
    },
    "additionalProperties": False,
}

_POINT_SCHEMA = {
    "type": "object",
    "required": ["row", "value"],
    "properties": {
        "row": {"type": "integer", "minimum": 0},
        "value": {"type": "number"},
        "group_key": {"type": ["string", "null"]},
        "label": {"type": "string"},
        "color_class": {"type": "integer", "minimum": 0},
        "anomalies": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

CHART_PAYLOAD_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "chart_kind", "mode", "version", "spec", "groups", "anomaly_marks"],
    "properties": {
        "schema_version": {"const": 1},
        "chart_kind": {"enum": ["stacked_histogram", "scatter", "line", "heatmap"]},
        "mode": {"enum": ["group_name", "error_type"]},
        "version": {"type": "integer", "minimum": 0},
        "spec": {
            "type": "object",
            "required": ["group_by", "target", "min_support"],
            "properties": {
                "group_by": {"type": "string"},
                "target": {"type": "string"},
                "min_support": {"type": "integer", "minimum": 1},
            },
        },
        "groups": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["key", "label", "color_class", "size"],
                "properties": {
                    "key": {"type": ["string", "null"]},
                    "label": {"type": "string"},
                    "color_class": {"type": "integer", "minimum": 0},
                    "size": {"type": "integer", "minimum": 1},
                },
            },
        },
        "anomaly_marks": {"type": "array", "items": _MARK_SCHEMA},
        "bin_edges": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "bins": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lo", "hi", "segments"],
                "properties": {
                    "lo": {"type": "number"},
                    "hi": {"type": "number"},
                    "segments": {"type": "array", "items": _SEGMENT_SCHEMA},
                },
            },
        },
        "points": {"type": "array", "items": _POINT_SCHEMA},
        "series": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["group_key", "label", "color_class", "points"],
                "properties": {
                    "group_key": {"type": ["string", "null"]},
                    "label": {"type": "string"},
                    "color_class": {"type": "integer", "minimum": 0},
                    "points": {"type": "array", "items": _POINT_SCHEMA},
                },
            },
        },
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["group_key", "bin", "count", "color_class"],
                "properties": {
                    "group_key": {"type": ["string", "null"]},
                    "bin": {"type": "integer", "minimum": 0},
                    "count": {"type": "integer", "minimum": 0},
                    "color_class": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
    "allOf": [
        {
            "if": {"properties": {"chart_kind": {"const": "stacked_histogram"}}},
            "then": {"required": ["bins", "bin_edges"]},
        },
        {
            "if": {"properties": {"chart_kind": {"const": "heatmap"}}},
            "then": {"required": ["cells", "bin_edges"]},
        },
        {
            "if": {"properties": {"chart_kind": {"const": "scatter"}}},
            "then": {"required": ["points"]},
        },
        {
            "if": {"properties": {"chart_kind": {"const": "line"}}},
            "then": {"required": ["series"]},
        },
    ],
}

RANKED_GROUP_SCHEMA = {
    "type": "object",
    "required": ["group", "total_anomalies", "per_type", "dominant_type"],
    "properties": {
        "group": GROUP_ID_SCHEMA,
        "total_anomalies": {"type": "integer", "minimum": 1},
        "per_type": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 1}},
        "dominant_type": {"type": "string"},
    },
    "additionalProperties": False,
}

ATTRIBUTE_SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["column", "per_type_counts", "per_type_frequency", "score"],
    "properties": {
        "column": {"type": "string"},
        "per_type_counts": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 1}},
        "per_type_frequency": {
            "type": "object",
            "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1},
        },
        "score": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

DATASET_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["dataset_id", "schema", "row_count"],
    "properties": {
        "dataset_id": {"type": "string"},
        "schema": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind"],
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": ["numeric", "categorical"]},
                },
            },
        },
        "row_count": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

SESSION_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["session_id", "version", "row_count", "ranked", "total_records"],
    "properties": {
        "session_id": {"type": "string"},
        "version": {"type": "integer", "minimum": 0},
        "row_count": {"type": "integer", "minimum": 0},
        "ranked": {"type": "array", "items": RANKED_GROUP_SCHEMA},
        "total_records": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

ANOMALIES_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["version", "ranked", "records"],
    "properties": {
        "version": {"type": "integer", "minimum": 0},
        "ranked": {"type": "array", "items": RANKED_GROUP_SCHEMA},
        "records": {"type": "array", "items": RECORD_SCHEMA},
    },
    "additionalProperties": False,
}

SUMMARY_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["version", "columns"],
    "properties": {
        "version": {"type": "integer", "minimum": 0},
        "columns": {"type": "array", "items": ATTRIBUTE_SUMMARY_SCHEMA},
    },
    "additionalProperties": False,
}

_COUNTS_SCHEMA = {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}}

PREVIEW_RESPONSE_SCHEMA = {
    "type": "object",
    "required": [
        "cells_changed",
        "rows_removed",
        "affected_groups",
        "mean_shift_per_group",
        "anomalies_before",
        "anomalies_after",
    ],
    "properties": {
        "cells_changed": {"type": "integer", "minimum": 0},
        "rows_removed": {"type": "integer", "minimum": 0},
        "affected_groups": {"type": "array", "items": GROUP_ID_SCHEMA},
        "mean_shift_per_group": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["group", "shift"],
                "properties": {"group": GROUP_ID_SCHEMA, "shift": {"type": "number"}},
            },
        },
        "anomalies_before": _COUNTS_SCHEMA,
        "anomalies_after": _COUNTS_SCHEMA,
    },
    "additionalProperties": False,
}

ACTION_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["version", "anomalies_before", "anomalies_after"],
    "properties": {
        "version": {"type": "integer", "minimum": 0},
        "anomalies_before": _COUNTS_SCHEMA,
        "anomalies_after": _COUNTS_SCHEMA,
    },
    "additionalProperties": False,
}

SCRIPT_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["source_text", "language_tag", "input_ref", "action_count", "verifiable", "warnings"],
    "properties": {
        "source_text": {"type": "string"},
        "language_tag": {"const": "python3"},
        "input_ref": {"type": "string"},
        "action_count": {"type": "integer", "minimum": 0},
        "verifiable": {"type": "boolean"},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

SUGGESTIONS_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["version", "suggestions"],
    "properties": {
        "version": {"type": "integer", "minimum": 0},
        "suggestions": {"type": "array", "items": ACTION_SCHEMA},
    },
    "additionalProperties": False,
}

EXPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "dataset_name", "dataset_sha256", "config", "specs", "actions"],
    "properties": {
        "schema_version": {"const": 1},
        "dataset_name": {"type": "string"},
        "dataset_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "config": {"type": "object"},
        "specs": {"type": "array"},
        "actions": {"type": "array", "items": ACTION_SCHEMA},
    },
    "additionalProperties": False,
}

ERROR_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["error"],
    "properties": {
        "error": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {
                "code": {"type": "string"},
                "message": {"type": "string"},
                "detail": {},
            },
        }
    },
    "additionalProperties": False,
}


def validate_recipe(payload: Mapping) -> list[RepairAction]:
    """Validate a recipe document and decode its actions, in order."""
    import jsonschema

    try:
        jsonschema.validate(payload, RECIPE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise RecipeSchemaError(f"recipe does not match schema: {exc.message}") from exc
    return [action_from_json(a) for a in payload["actions"]]
