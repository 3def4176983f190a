#!/usr/bin/env python3
"""Record a wrangling session, export the standalone script, and verify
that running the script on the original CSV reproduces the session table.
"""

import subprocess
import sys
import tempfile
from importlib.resources import files
from pathlib import Path

from wranglekit import (
    CellRef,
    ConvertCells,
    DetectorConfig,
    MergeGroups,
    RemoveRows,
    create_session,
    enumerate_all_specs,
    generate_script,
    infer_kinds,
    load_csv,
    serialize_csv,
    suggest_repairs,
    table_equals,
)

raw = (files("wranglekit") / "data" / "sample_income.csv").read_bytes()
table = infer_kinds(load_csv(raw, name="sample_income.csv"))
session = create_session(table, DetectorConfig(), enumerate_all_specs(table))

# A small multi-step pipeline: convert "12k", impute the missing income
# with its group mean, drop the zero rows, merge two degree labels.
session.commit(ConvertCells((CellRef(7, "Income"),)))
missing = next(r for r in session.records if r.type.tag == "missing_value")
session.commit(suggest_repairs(missing, session.table, session.groups)[0])
zero_rows = tuple(i for i, c in enumerate(session.table.column("Income").cells) if c == 0.0)
session.commit(RemoveRows(zero_rows))
session.commit(MergeGroups("Degree", "MS", "BS"))

artifact = generate_script(session)
print(f"Generated {artifact.language_tag} script, {artifact.action_count} steps, "
      f"verifiable={artifact.verifiable}")
print("-" * 60)
print(artifact.source_text)
print("-" * 60)

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "input.csv").write_bytes(raw)
    (tmp / "pipeline.py").write_text(artifact.source_text, encoding="utf-8")
    subprocess.run(
        [sys.executable, str(tmp / "pipeline.py"), str(tmp / "input.csv"), str(tmp / "output.csv")],
        check=True,
    )
    produced = infer_kinds(load_csv((tmp / "output.csv").read_bytes()))
    ok = table_equals(produced, session.table, 1e-9)
    print(f"script output equals session table (tol 1e-9): {ok}")

print("\nSession export (replayable):")
import json

print(json.dumps(session.export(), indent=2)[:600], "...")
