import jsonschema
import pytest

from wranglekit import (
    CellRef,
    ConvertCells,
    CustomAction,
    GroupSpec,
    ImputeColumnMean,
    ImputeGroupMean,
    MergeGroups,
    RemoveRows,
)
from wranglekit.anomalies import AnomalyRecord, MISSING_VALUE
from wranglekit.errors import RecipeSchemaError
from wranglekit.schemas import (
    ACTION_SCHEMA,
    RECIPE_SCHEMA,
    RECORD_SCHEMA,
    action_from_json,
    action_to_json,
    record_from_json,
    record_to_json,
    validate_recipe,
)

SPEC = GroupSpec("Country", "Income")

ACTIONS = [
    ImputeGroupMean((CellRef(2, "Income"),), (SPEC, "Bhutan")),
    ImputeColumnMean((CellRef(2, "Income"),)),
    RemoveRows((0, 1)),
    ConvertCells((CellRef(7, "Income"),)),
    MergeGroups("Country", "USA", "United States of America"),
    CustomAction("scale", (CellRef(1, "Income"),), (("factor", 2),)),
]


@pytest.mark.parametrize("action", ACTIONS, ids=lambda a: type(a).__name__)
def test_action_json_round_trip(action):
    payload = action_to_json(action)
    jsonschema.validate(payload, ACTION_SCHEMA)
    assert action_from_json(payload) == action


def test_recipe_validation_accepts_good_recipe():
    recipe = {"schema_version": 1, "actions": [action_to_json(a) for a in ACTIONS]}
    jsonschema.validate(recipe, RECIPE_SCHEMA)
    assert validate_recipe(recipe) == ACTIONS


@pytest.mark.parametrize(
    "payload",
    [
        {"actions": [{"type": "warp_rows"}]},
        {"actions": [{"type": "remove_rows"}]},  # missing rows
        {"actions": [{"type": "remove_rows", "rows": []}]},
        {"actions": [{"type": "merge_groups", "column": "c"}]},
        {"actions": [{"type": "impute_group_mean", "cells": [{"row": 0, "column": "v"}]}]},
        {},
    ],
)
def test_recipe_validation_rejects(payload):
    with pytest.raises(RecipeSchemaError):
        validate_recipe(payload)


def test_unsorted_rows_rejected_at_decode():
    with pytest.raises(RecipeSchemaError):
        validate_recipe({"actions": [{"type": "remove_rows", "rows": [2, 1]}]})


def test_record_json_round_trip():
    record = AnomalyRecord(MISSING_VALUE, (SPEC, "Bhutan"), [CellRef(2, "Income")], {"x": 1.0}, 3)
    payload = record_to_json(record)
    jsonschema.validate(payload, RECORD_SCHEMA)
    back = record_from_json(payload)
    assert back.type == record.type
    assert back.group_id == record.group_id
    assert back.cells == record.cells
    assert back.detail == record.detail
    assert back.version == record.version


def test_sentinel_key_serializes_as_null():
    record = AnomalyRecord(MISSING_VALUE, (SPEC, None), [CellRef(0, "Income")], {}, 0)
    payload = record_to_json(record)
    assert payload["group"]["key"] is None
    assert record_from_json(payload).group_id == (SPEC, None)
