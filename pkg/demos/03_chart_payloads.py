#!/usr/bin/env python3
"""Build chart payloads and render them with matplotlib.

The engine emits render-ready aggregates (bins, segments, marks, color
classes); this script is one possible renderer. Writes PNGs next to
itself: histogram in both color modes, a scatter, and a heatmap.
"""

from importlib.resources import files
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wranglekit import (
    DetectorConfig,
    GroupSpec,
    chart_payload,
    enumerate_all_specs,
    infer_kinds,
    load_csv,
    run_detectors,
)

# Okabe-Ito palette for group classes; gray reserved for "no_error".
PALETTE = ["#0072B2", "#E69F00", "#009E73", "#CC79A7", "#56B4E9", "#D55E00", "#F0E442"]
TYPE_COLORS = {
    "no_error": "#BBBBBB",
    "missing_value": "#D55E00",
    "outlier": "#0072B2",
    "type_mismatch": "#E69F00",
    "incomplete_group": "#CC79A7",
}

out_dir = Path(__file__).parent

raw = (files("wranglekit") / "data" / "sample_income.csv").read_bytes()
table = infer_kinds(load_csv(raw, name="sample_income.csv"))
specs = enumerate_all_specs(table)
records, _ = run_detectors(table, specs, DetectorConfig())
spec = GroupSpec("Country", "Income")


def segment_color(segment, mode):
    if mode == "group_name":
        return PALETTE[segment["color_class"] % len(PALETTE)]
    return TYPE_COLORS.get(segment["label"], "#999999")


for mode in ("group_name", "error_type"):
    payload = chart_payload(table, spec, "stacked_histogram", mode, records)
    fig, ax = plt.subplots(figsize=(7, 4))
    seen = set()
    for i, bucket in enumerate(payload["bins"]):
        bottom = 0
        for segment in bucket["segments"]:
            label = segment["label"] if segment["label"] not in seen else None
            seen.add(segment["label"])
            ax.bar(i, segment["count"], bottom=bottom, width=0.9,
                   color=segment_color(segment, mode), label=label)
            bottom += segment["count"]
    ax.set_xlabel(f"{spec.target} bins")
    ax.set_ylabel("rows")
    ax.set_title(f"stacked histogram, {mode} mode")
    ax.legend(fontsize=8)
    path = out_dir / f"histogram_{mode}.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")

payload = chart_payload(table, spec, "scatter", "group_name", records)
fig, ax = plt.subplots(figsize=(7, 4))
for point in payload["points"]:
    color = PALETTE[point["color_class"] % len(PALETTE)]
    marker = "x" if point["anomalies"] else "o"
    ax.scatter(point["row"], point["value"], color=color, marker=marker, s=60)
ax.set_xlabel("row")
ax.set_ylabel(spec.target)
ax.set_title("scatter (x marks anomalous cells)")
path = out_dir / "scatter.png"
fig.savefig(path, dpi=120, bbox_inches="tight")
print(f"wrote {path}")

payload = chart_payload(table, spec, "heatmap", "group_name", records)
keys = [g["label"] for g in payload["groups"]]
nbins = len(payload["bin_edges"]) - 1
grid = [[0] * nbins for _ in keys]
for cell in payload["cells"]:
    row = next(i for i, g in enumerate(payload["groups"]) if g["key"] == cell["group_key"])
    grid[row][cell["bin"]] = cell["count"]
fig, ax = plt.subplots(figsize=(7, 2 + 0.4 * len(keys)))
im = ax.imshow(grid, aspect="auto", cmap="Blues")
ax.set_yticks(range(len(keys)), keys)
ax.set_xlabel(f"{spec.target} bins")
ax.set_title("group x bin heatmap")
fig.colorbar(im, label="rows")
path = out_dir / "heatmap.png"
fig.savefig(path, dpi=120, bbox_inches="tight")
print(f"wrote {path}")
