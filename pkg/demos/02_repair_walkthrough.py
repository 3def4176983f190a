#!/usr/bin/env python3
"""Interactive repair loop, headless: suggest, preview, commit, undo, redo.

Reproduces the iterative story: impute the missing Bhutan income, then
remove the zero-income rows and watch a new incompleteness anomaly appear
in another grouping, then walk the history back and forth.
"""

from importlib.resources import files

from wranglekit import (
    DetectorConfig,
    RemoveRows,
    counts_by_type,
    create_session,
    enumerate_all_specs,
    infer_kinds,
    load_csv,
    suggest_repairs,
    table_equals,
)

raw = (files("wranglekit") / "data" / "sample_income.csv").read_bytes()
table = infer_kinds(load_csv(raw, name="sample_income.csv"))
session = create_session(table, DetectorConfig(), enumerate_all_specs(table))


def show(label):
    counts = {t.to_string(): n for t, n in counts_by_type(session.records).items()}
    print(f"{label}: version={session.table.version}  anomalies={counts}")


show("start")

missing = next(r for r in session.records if r.type.tag == "missing_value")
spec, key = missing.group_id
print(f"\nMissing value in {spec.group_by}={key!r}, cell row {missing.cells[0].row}")

candidates = suggest_repairs(missing, session.table, session.groups)
print("Repair kit (preference order):")
for i, action in enumerate(candidates):
    diff = session.preview(action)
    shifts = {g[1]: round(s, 1) for g, s in diff.mean_shift_per_group.items() if s}
    print(f"  {i}. {type(action).__name__:18s} cells_changed={diff.cells_changed} "
          f"rows_removed={diff.rows_removed} mean shifts={shifts or '{}'}")

session.commit(candidates[0])
show("\nafter group-mean imputation")
print(f"  imputed value: {session.table.cell(2, 'Income'):,.1f}")

zero_rows = tuple(i for i, c in enumerate(session.table.column("Income").cells) if c == 0.0)
print(f"\nRemoving zero-income rows {zero_rows} ...")
session.commit(RemoveRows(zero_rows))
show("after removal")
fresh = [r for r in session.records if r.type.tag == "incomplete_group"]
for record in fresh:
    spec, key = record.group_id
    print(f"  new anomaly: {spec.group_by}={key!r} is now incomplete "
          f"(count={record.detail['count']:.0f} < threshold={record.detail['threshold']:.0f})")

print("\nUndo everything:")
while session.undo_stack:
    session.undo()
show("after undo-all")
print(f"  bit-exact original restored: {table_equals(session.table, session.original, 0.0)}")

print("\nRedo everything:")
while session.redo_stack:
    session.redo()
show("after redo-all")
