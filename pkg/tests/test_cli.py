import json
import socket
import subprocess
import sys
import time

import httpx
import pytest

from wranglekit import infer_kinds, load_csv, table_equals
from wranglekit.cli import main

from conftest import sample_income_bytes


@pytest.fixture
def income_csv(tmp_path):
    path = tmp_path / "income.csv"
    path.write_bytes(sample_income_bytes())
    return path


class TestDetect:
    def test_clean_table_exits_zero(self, tmp_path, capsys):
        path = tmp_path / "clean.csv"
        path.write_text("k,v\na,1\na,2\nb,3\nb,4\n")
        code = main(["detect", str(path)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["ranked_groups"] == []

    def test_fixture_reports_anomalies(self, income_csv, tmp_path):
        report_path = tmp_path / "report.json"
        code = main(["detect", str(income_csv), "--top-k", "3", "--report", str(report_path)])
        assert code == 2
        report = json.loads(report_path.read_text())
        assert len(report["ranked_groups"]) <= 3
        keys = {g["group"]["key"] for g in report["ranked_groups"]}
        ranked_all = main(["detect", str(income_csv), "--top-k", "99", "--report", str(report_path)])
        assert ranked_all == 2
        all_keys = {g["group"]["key"] for g in json.loads(report_path.read_text())["ranked_groups"]}
        assert "Bhutan" in all_keys
        assert keys <= all_keys

    def test_custom_rule_counts_planted_negatives(self, tmp_path, capsys):
        rows = ["k,v"] + [f"g{i % 3},{v}" for i, v in enumerate([1, -2, 3, -4, 5, 6])]
        path = tmp_path / "neg.csv"
        path.write_text("\n".join(rows) + "\n")
        code = main(["detect", str(path), "--rule", "neg=value < 0"])
        assert code == 2
        report = json.loads(capsys.readouterr().out)
        neg = report["attributes"][0]["per_type_counts"].get("custom:neg")
        assert neg == 2  # two planted negatives, deduplicated across specs

    def test_markdown_format(self, income_csv, capsys):
        code = main(["detect", str(income_csv), "--format", "md"])
        assert code == 2
        out = capsys.readouterr().out
        assert out.startswith("# Anomaly report")
        assert "Bhutan" in out or "MS" in out

    def test_missing_file_exits_one(self, capsys):
        assert main(["detect", "/does/not/exist.csv"]) == 1

    def test_usage_error_exits_64(self):
        with pytest.raises(SystemExit) as err:
            main(["detect"])  # missing input
        assert err.value.code == 64

    def test_bad_rule_exits_one(self, income_csv):
        assert main(["detect", str(income_csv), "--rule", "broken"]) == 1
        assert main(["detect", str(income_csv), "--rule", "x=value <"]) == 1

    def test_report_matches_server_endpoints(self, income_csv, tmp_path):
        from fastapi.testclient import TestClient

        from wranglekit.server import ServerConfig, create_app

        report_path = tmp_path / "report.json"
        assert main(["detect", str(income_csv), "--top-k", "3", "--report", str(report_path)]) == 2
        report = json.loads(report_path.read_text())

        client = TestClient(create_app(ServerConfig()))
        dataset = client.post(
            "/api/datasets", content=income_csv.read_bytes(),
            params={"name": "income.csv"},
        ).json()
        sid = client.post("/api/sessions", json={"dataset_id": dataset["dataset_id"]}).json()["session_id"]
        anomalies = client.get(f"/api/sessions/{sid}/anomalies", params={"top_k": 3}).json()
        summary = client.get(f"/api/sessions/{sid}/summary").json()

        cli_ranked = [
            (g["group"]["group_by"], g["group"]["target"], g["group"]["key"],
             g["total_anomalies"], g["dominant_type"], g["per_type"])
            for g in report["ranked_groups"]
        ]
        srv_ranked = [
            (g["group"]["group_by"], g["group"]["target"], g["group"]["key"],
             g["total_anomalies"], g["dominant_type"], g["per_type"])
            for g in anomalies["ranked"]
        ]
        assert cli_ranked == srv_ranked
        cli_attrs = [(a["column"], a["per_type_counts"], a["score"]) for a in report["attributes"]]
        srv_attrs = [(a["column"], a["per_type_counts"], a["score"]) for a in summary["columns"]]
        assert cli_attrs == srv_attrs


class TestApply:
    def test_empty_recipe_identity(self, income_csv, tmp_path):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(json.dumps({"actions": []}))
        out = tmp_path / "out.csv"
        code = main(["apply", str(income_csv), "--recipe", str(recipe), "--out", str(out)])
        assert code == 0
        original = infer_kinds(load_csv(income_csv.read_bytes()))
        written = infer_kinds(load_csv(out.read_bytes()))
        assert table_equals(original, written, 0.0)

    def test_convert_recipe(self, income_csv, tmp_path):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(json.dumps({
            "actions": [{"type": "convert_cells", "cells": [{"row": 7, "column": "Income"}]}]
        }))
        out = tmp_path / "out.csv"
        code = main(["apply", str(income_csv), "--recipe", str(recipe), "--out", str(out)])
        assert code == 0
        written = infer_kinds(load_csv(out.read_bytes()))
        assert written.cell(7, "Income") == 12000.0

    def test_apply_then_script_round_trip(self, income_csv, tmp_path):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(json.dumps({
            "actions": [
                {"type": "convert_cells", "cells": [{"row": 7, "column": "Income"}]},
                {"type": "remove_rows", "rows": [0, 1]},
                {"type": "merge_groups", "column": "Degree", "source_key": "MS", "dest_key": "BS"},
            ]
        }))
        out = tmp_path / "out.csv"
        script = tmp_path / "script.py"
        code = main([
            "apply", str(income_csv), "--recipe", str(recipe),
            "--out", str(out), "--emit-script", str(script),
        ])
        assert code == 0
        script_out = tmp_path / "script_out.csv"
        proc = subprocess.run(
            [sys.executable, str(script), str(income_csv), str(script_out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        a = infer_kinds(load_csv(out.read_bytes()))
        b = infer_kinds(load_csv(script_out.read_bytes()))
        assert table_equals(a, b, 1e-9)

    def test_schema_violation_exits_65(self, income_csv, tmp_path):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(json.dumps({"actions": [{"type": "warp"}]}))
        out = tmp_path / "out.csv"
        code = main(["apply", str(income_csv), "--recipe", str(recipe), "--out", str(out)])
        assert code == 65
        assert not out.exists()

    def test_failing_action_reports_index_no_partial_output(self, income_csv, tmp_path, capsys):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(json.dumps({
            "actions": [
                {"type": "remove_rows", "rows": [0]},
                {"type": "remove_rows", "rows": [999]},
            ]
        }))
        out = tmp_path / "out.csv"
        code = main(["apply", str(income_csv), "--recipe", str(recipe), "--out", str(out)])
        assert code == 1
        assert "action 1" in capsys.readouterr().err
        assert not out.exists()


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class TestServe:
    def test_health_endpoint_answers(self, tmp_path):
        port = _free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "wranglekit.cli", "serve", "--port", str(port)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            deadline = time.time() + 15
            last_error = None
            while time.time() < deadline:
                try:
                    response = httpx.get(f"http://127.0.0.1:{port}/api/health", timeout=1.0)
                    assert response.status_code == 200
                    assert response.json()["status"] == "ok"
                    break
                except (httpx.ConnectError, httpx.ReadError) as exc:
                    last_error = exc
                    time.sleep(0.2)
            else:
                pytest.fail(f"server never came up: {last_error}")
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_max_upload_enforced(self):
        port = _free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "wranglekit.cli", "serve", "--port", str(port),
             "--max-upload", "1000"],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            deadline = time.time() + 15
            while time.time() < deadline:
                try:
                    httpx.get(f"http://127.0.0.1:{port}/api/health", timeout=1.0)
                    break
                except (httpx.ConnectError, httpx.ReadError):
                    time.sleep(0.2)
            body = b"a,b\n" + b"1,2\n" * 600  # ~2.4 KB
            response = httpx.post(
                f"http://127.0.0.1:{port}/api/datasets", content=body, timeout=5.0
            )
            assert response.status_code == 413
        finally:
            proc.terminate()
            proc.wait(timeout=10)
