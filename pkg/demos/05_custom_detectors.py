#!/usr/bin/env python3
"""Extend detection: declarative rules, plugin callables, custom wranglers.

Rules are safe to accept over the wire (they are parsed, not executed);
plugins and wranglers are for in-process library use.
"""

from importlib.resources import files

from wranglekit import (
    CellRef,
    CustomAction,
    DetectorConfig,
    Session,
    WranglerRegistry,
    enumerate_all_specs,
    eval_rule,
    format_rule,
    infer_kinds,
    load_csv,
    parse_rule,
    run_detectors,
)

raw = (files("wranglekit") / "data" / "sample_income.csv").read_bytes()
table = infer_kinds(load_csv(raw, name="sample_income.csv"))
specs = enumerate_all_specs(table)

# 1. Declarative rule: flag zero or negative incomes.
rule = parse_rule("value <= 0")
print(f"rule AST round-trips through its canonical form: {format_rule(rule)!r}")

config = DetectorConfig(custom_rules=[("nonpositive", "value <= 0")])
records, index = run_detectors(table, specs, config)
hits = [r for r in records if r.type.tag == "custom"]
print(f"rule 'nonpositive' flagged rows: {sorted({r.cells[0].row for r in hits})}")

# 2. Plugin detector: same signature as the rule evaluator, arbitrary logic.
suspicious = lambda cell, stats: type(cell) is float and stats.mean and cell > 2 * stats.mean  # noqa: E731
records, _ = run_detectors(table, specs, DetectorConfig(), extra_detectors={"way-above-mean": suspicious})
hits = sorted({r.cells[0].row for r in records if r.type.tag == "custom"})
print(f"plugin 'way-above-mean' flagged rows: {hits}")

# 3. Custom wrangler: a registered cell-level transform with a code template,
#    so generated scripts stay self-contained.
registry = WranglerRegistry()


def clamp_to_zero(table, action):
    return [0.0 for _ in action.cells]


def clamp_template(action, ctx):
    return [
        f"rows[{ctx.original_rows[ref.row]}][col[{ref.column!r}]] = '0'"
        for ref in action.cells
    ]


registry.register("clamp-zero", clamp_to_zero, clamp_template)

session = Session(table, DetectorConfig(), specs, registry=registry)
session.commit(CustomAction("clamp-zero", (CellRef(8, "Income"),)))
print(f"after custom wrangler: row 8 income = {session.table.cell(8, 'Income')}")

from wranglekit import generate_script

artifact = generate_script(session)
print(f"script still verifiable: {artifact.verifiable}")
