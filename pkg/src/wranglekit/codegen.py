"""Standalone-script emission: replay a session's committed actions.

The emitted script needs only the Python standard library. Imputed and
converted values are baked in as literals captured at commit time, and row
addresses are translated back to original-file positions, so running the
script against the original CSV reproduces the session's final table
without re-deriving any statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import __version__ as _engine_version
from .repairs import (
    ConvertCells,
    CustomAction,
    ImputeColumnMean,
    ImputeGroupMean,
    MergeGroups,
    RemoveRows,
    apply_action,
)
from .table import format_number
from .session import Session


@dataclass
class ScriptArtifact:
    source_text: str
    language_tag: str
    input_ref: str
    action_count: int
    verifiable: bool = True
    warnings: list = field(default_factory=list)


@dataclass
class EmitContext:
    """Handed to custom-wrangler code templates: original-row translation
    plus the literal formatter used for numeric cells."""

    original_rows: dict  # current row index -> original row index
    format_value: callable


def _py_str(text: str) -> str:
    return repr(text)


def _cell_literal(value) -> str:
    """CSV text literal for a cell value, matching engine serialization."""
    if value is None:
        return "''"
    if type(value) is float:
        return repr(format_number(value))
    return repr(value)


_PRELUDE = '''\
import csv
import sys

SRC = sys.argv[1] if len(sys.argv) > 1 else {src!r}
DST = sys.argv[2] if len(sys.argv) > 2 else {dst!r}

with open(SRC, newline="", encoding="utf-8-sig") as fh:
    reader = csv.reader(fh, delimiter={delim!r})
    header = next(reader)
    rows = dict(enumerate(reader))
col = {{name: i for i, name in enumerate(header)}}
'''

_EPILOGUE = '''\
with open(DST, "w", newline="", encoding="utf-8") as fh:
    writer = csv.writer(fh, delimiter={delim!r}, lineterminator="\\n")
    writer.writerow(header)
    for _, row in sorted(rows.items()):
        writer.writerow(row)
'''


def generate_script(session: Session) -> ScriptArtifact:
    """Emit a python3 script replaying the session's committed actions.

    Deterministic for a given session export. Custom actions without a
    registered code template become clearly marked TODO blocks and flip the
    artifact to non-verifiable.
    """
    input_ref = session.original.name or "input.csv"
    stem = input_ref[:-4] if input_ref.endswith(".csv") else input_ref
    output_ref = f"{stem}.wrangled.csv"
    delimiter = session.load_options.delimiter

    lines: list[str] = [
        "#!/usr/bin/env python3",
        f"# reproducible wrangling pipeline ({len(session.undo_stack)} steps)",
        f"# source dataset: {input_ref} (sha256 {session.fingerprint()})",
        f"# emitted by wranglekit {_engine_version}",
        "",
        _PRELUDE.format(src=input_ref, dst=output_ref, delim=delimiter),
    ]
    warnings: list[str] = []
    verifiable = True

    # Replay from version 0 so literals and row addresses match each step.
    from .groups import enumerate_groups

    table = session.original
    original_of = list(range(table.row_count))
    for step, entry in enumerate(session.undo_stack, start=1):
        action = entry.action
        groups = [g for spec in session.specs for g in enumerate_groups(table, spec)]
        result = apply_action(table, action, groups, session.registry)

        if isinstance(action, (ImputeGroupMean, ImputeColumnMean, ConvertCells)):
            if isinstance(action, ImputeGroupMean):
                label = f"impute group mean ({action.group_id[0].group_by}={action.group_id[1]!r})"
            elif isinstance(action, ImputeColumnMean):
                label = f"impute column mean ({action.cells[0].column})"
            else:
                label = "convert text cells to numbers"
            lines.append(f"# step {step}: {label}")
            for ref in action.cells:
                new_value = result.new_table.cell(ref.row, ref.column)
                lines.append(
                    f"rows[{original_of[ref.row]}][col[{_py_str(ref.column)}]] = {_cell_literal(new_value)}"
                )
            lines.append("")
        elif isinstance(action, RemoveRows):
            originals = [original_of[r] for r in action.rows]
            lines.append(f"# step {step}: remove {len(originals)} rows")
            lines.append(f"for i in {originals!r}:")
            lines.append("    del rows[i]")
            lines.append("")
            keep = set(action.rows)
            original_of = [o for r, o in enumerate(original_of) if r not in keep]
        elif isinstance(action, MergeGroups):
            lines.append(f"# step {step}: merge {action.source_key!r} into {action.dest_key!r} ({action.column})")
            lines.append("for row in rows.values():")
            lines.append(f"    if row[col[{_py_str(action.column)}]] == {_py_str(action.source_key)}:")
            lines.append(f"        row[col[{_py_str(action.column)}]] = {_py_str(action.dest_key)}")
            lines.append("")
        elif isinstance(action, CustomAction):
            entry_reg = session.registry.get(action.wrangler_id)
            template = entry_reg.code_template if entry_reg else None
            if template is not None:
                ctx = EmitContext(
                    original_rows={r: original_of[r] for r in range(len(original_of))},
                    format_value=_cell_literal,
                )
                lines.append(f"# step {step}: custom wrangler {action.wrangler_id!r}")
                lines.extend(template(action, ctx))
                lines.append("")
            else:
                verifiable = False
                warnings.append(
                    f"UNSUPPORTED_ACTION: no code template for custom wrangler {action.wrangler_id!r} (step {step})"
                )
                lines.append(f"# step {step}: custom wrangler {action.wrangler_id!r}")
                lines.append(f"# TODO: no code template registered for wrangler {action.wrangler_id!r}.")
                lines.append(f"#       cells: {[(c.row, c.column) for c in action.cells]!r}")
                lines.append(f"#       params: {dict(action.params)!r}")
                lines.append("")
        table = result.new_table

    lines.append(_EPILOGUE.format(delim=delimiter))
    return ScriptArtifact(
        source_text="\n".join(lines),
        language_tag="python3",
        input_ref=input_ref,
        action_count=len(session.undo_stack),
        verifiable=verifiable,
        warnings=warnings,
    )
