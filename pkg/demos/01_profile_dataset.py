#!/usr/bin/env python3
"""Profile a dataset: load, type, enumerate subgroups, detect anomalies.

Walks the bundled sample (a small income survey with seeded quality
issues) through the detection pipeline and prints what the engine found.
"""

from importlib.resources import files

from wranglekit import (
    DetectorConfig,
    attribute_summary,
    enumerate_all_specs,
    enumerate_groups,
    group_stats,
    infer_kinds,
    load_csv,
    rank_groups,
    run_detectors,
)

raw = (files("wranglekit") / "data" / "sample_income.csv").read_bytes()
table = infer_kinds(load_csv(raw, name="sample_income.csv"))

print(f"Loaded {table.name}: {table.row_count} rows")
for column in table.columns:
    print(f"  {column.name:8s} {column.kind.value}")

specs = enumerate_all_specs(table)
print(f"\nGroupings: {[(s.group_by, s.target) for s in specs]}")

for spec in specs[:1]:
    print(f"\nGroups for {spec.group_by} x {spec.target}:")
    for group in enumerate_groups(table, spec):
        stats = group_stats(table, group)
        mean = "undefined" if stats.mean is None else f"{stats.mean:,.0f}"
        print(f"  {group.key!r:12} n={stats.count}  mean={mean}  "
              f"missing={stats.missing_count}  mismatched={stats.mismatch_count}")

records, index = run_detectors(table, specs, DetectorConfig())
print(f"\nDetection: {len(records)} anomaly records")

print("\nTop groups by anomaly count:")
for ranked in rank_groups(index, 3):
    spec, key = ranked.group_id
    print(f"  {spec.group_by}={key!r}: {ranked.total_anomalies} "
          f"(dominant: {ranked.dominant_type.to_string()})")

print("\nAttributes to examine:")
for summary in attribute_summary(table, records):
    freqs = ", ".join(f"{t.to_string()} {f:.0%}" for t, f in summary.per_type_frequency.items())
    print(f"  {summary.column}: score {summary.score:.0f}  [{freqs}]")
