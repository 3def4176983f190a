"""Headless entry points: `detect` report, `apply` recipe replay, `serve`.

Exit codes are part of the contract so the detect command can gate CI
pipelines on data quality:

* 0  clean (no anomalies) / success
* 1  runtime error (bad input, failed action)
* 2  anomalies found (detect only)
* 64 usage error
* 65 recipe schema violation
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .anomalies import DetectorConfig, run_detectors
from .codegen import generate_script
from .errors import RecipeSchemaError, WrangleError
from .groups import enumerate_all_specs
from .insight import attribute_summary, rank_groups
from .schemas import group_id_to_json, validate_recipe
from .session import Session
from .table import LoadOptions, infer_kinds, load_csv, serialize_csv

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_ANOMALIES = 2
EXIT_USAGE = 64
EXIT_RECIPE = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_table(path: str, delimiter: str):
    with open(path, "rb") as fh:
        data = fh.read()
    options = LoadOptions(delimiter=delimiter)
    return infer_kinds(load_csv(data, options, name=path.rsplit("/", 1)[-1])), options


def _parse_rules(raw_rules: Sequence[str]) -> list[tuple[str, str]]:
    rules = []
    for raw in raw_rules:
        rule_id, sep, source = raw.partition("=")
        if not sep or not rule_id or not source:
            raise ValueError(f"--rule expects id=expression, got {raw!r}")
        rules.append((rule_id, source))
    return rules


def _report_payload(table, records, index, top_k: int) -> dict:
    ranked = rank_groups(index, top_k)
    summaries = attribute_summary(table, records)
    return {
        "row_count": table.row_count,
        "total_records": len(records),
        "ranked_groups": [
            {
                "group": group_id_to_json(r.group_id),
                "total_anomalies": r.total_anomalies,
                "per_type": {t.to_string(): n for t, n in sorted(r.per_type.items(), key=lambda kv: kv[0].sort_key())},
                "dominant_type": r.dominant_type.to_string(),
            }
            for r in ranked
        ],
        "attributes": [
            {
                "column": s.column,
                "per_type_counts": {t.to_string(): n for t, n in sorted(s.per_type_counts.items(), key=lambda kv: kv[0].sort_key())},
                "per_type_frequency": {t.to_string(): f for t, f in sorted(s.per_type_frequency.items(), key=lambda kv: kv[0].sort_key())},
                "score": s.score,
            }
            for s in summaries
        ],
    }


def _render_markdown(payload: dict) -> str:
    lines = ["# Anomaly report", ""]
    lines.append(f"Rows: {payload['row_count']}  |  anomaly records: {payload['total_records']}")
    lines.append("")
    lines.append("## Top groups")
    if not payload["ranked_groups"]:
        lines.append("")
        lines.append("No anomalous groups.")
    else:
        lines.append("")
        lines.append("| group | key | total | dominant |")
        lines.append("|---|---|---|---|")
        for r in payload["ranked_groups"]:
            g = r["group"]
            key = "(missing)" if g["key"] is None else g["key"]
            lines.append(f"| {g['group_by']} x {g['target']} | {key} | {r['total_anomalies']} | {r['dominant_type']} |")
    lines.append("")
    lines.append("## Attributes to examine")
    if not payload["attributes"]:
        lines.append("")
        lines.append("No affected attributes.")
    else:
        lines.append("")
        lines.append("| column | score | frequencies |")
        lines.append("|---|---|---|")
        for s in payload["attributes"]:
            freqs = ", ".join(f"{t}: {f:.1%}" for t, f in s["per_type_frequency"].items())
            lines.append(f"| {s['column']} | {s['score']:.0f} | {freqs} |")
    lines.append("")
    return "\n".join(lines)


def cmd_detect(args) -> int:
    try:
        table, _ = _load_table(args.input, args.delimiter)
        config = DetectorConfig(
            outlier_sigma=args.outlier_sigma,
            incomplete_threshold=args.incomplete_threshold,
            top_k=args.top_k,
            custom_rules=_parse_rules(args.rule or []),
        )
        specs = enumerate_all_specs(table, targets=args.target or None, min_support=args.min_support)
        records, index = run_detectors(table, specs, config)
        payload = _report_payload(table, records, index, config.top_k)
        body = json.dumps(payload, indent=2) if args.format == "json" else _render_markdown(payload)
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(body + "\n")
        else:
            print(body)
        return EXIT_ANOMALIES if records else EXIT_CLEAN
    except (WrangleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def cmd_apply(args) -> int:
    try:
        with open(args.recipe, "r", encoding="utf-8") as fh:
            recipe = json.load(fh)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except json.JSONDecodeError as exc:
        print(f"recipe is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_RECIPE
    try:
        actions = validate_recipe(recipe)
    except RecipeSchemaError as exc:
        print(f"recipe schema violation: {exc}", file=sys.stderr)
        return EXIT_RECIPE
    try:
        table, options = _load_table(args.input, args.delimiter)
        # Group-mean imputations need their groups enumerated, so adopt the
        # specs referenced by the recipe; other actions don't care.
        specs = list(dict.fromkeys(
            a.group_id[0] for a in actions if hasattr(a, "group_id")
        ))
        session = Session(table, DetectorConfig(), specs=specs, load_options=options)
        for i, action in enumerate(actions):
            try:
                session.commit(action)
            except WrangleError as exc:
                print(f"error: action {i} failed: {exc}", file=sys.stderr)
                return EXIT_ERROR
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize_csv(session.table, options))
        if args.emit_script:
            artifact = generate_script(session)
            with open(args.emit_script, "w", encoding="utf-8") as fh:
                fh.write(artifact.source_text + "\n")
            if artifact.warnings:
                for warning in artifact.warnings:
                    print(f"warning: {warning}", file=sys.stderr)
        return EXIT_CLEAN
    except (WrangleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def cmd_serve(args) -> int:
    from .server import ServerConfig, serve

    config = ServerConfig.from_env(port=args.port, max_upload_bytes=args.max_upload)
    try:
        serve(config)
    except SystemExit as exc:  # uvicorn exits 1 on bind failure
        return int(exc.code or 0)
    except OSError as exc:
        print(f"error: cannot serve on port {config.port}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wranglekit", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"wranglekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="scan a CSV for subgroup anomalies")
    detect.add_argument("input", help="CSV file to scan")
    detect.add_argument("--target", action="append", help="numeric target column (repeatable)")
    detect.add_argument("--min-support", type=int, default=1, dest="min_support")
    detect.add_argument("--top-k", type=int, default=3, dest="top_k")
    detect.add_argument("--outlier-sigma", type=float, default=2.0, dest="outlier_sigma")
    detect.add_argument("--incomplete-threshold", type=int, default=2, dest="incomplete_threshold")
    detect.add_argument("--rule", action="append", metavar="ID=EXPR",
                        help="custom rule, e.g. 'neg=value < 0' (repeatable)")
    detect.add_argument("--report", help="write the report here instead of stdout")
    detect.add_argument("--format", choices=["json", "md"], default="json")
    detect.add_argument("--delimiter", default=",")
    detect.set_defaults(func=cmd_detect)

    apply_cmd = sub.add_parser("apply", help="apply a JSON recipe of repair actions")
    apply_cmd.add_argument("input", help="CSV file to transform")
    apply_cmd.add_argument("--recipe", required=True, help="recipe JSON path")
    apply_cmd.add_argument("--out", required=True, help="output CSV path")
    apply_cmd.add_argument("--emit-script", dest="emit_script", help="also write the standalone replay script")
    apply_cmd.add_argument("--delimiter", default=",")
    apply_cmd.set_defaults(func=cmd_apply)

    serve_cmd = sub.add_parser("serve", help="run the HTTP service")
    serve_cmd.add_argument("--port", type=int, default=8199)
    serve_cmd.add_argument("--max-upload", type=int, default=25 * 1024 * 1024, dest="max_upload")
    serve_cmd.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
