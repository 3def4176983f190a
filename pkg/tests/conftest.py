from __future__ import annotations

import importlib.resources
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wranglekit import DetectorConfig, Table, enumerate_all_specs, infer_kinds, load_csv


def sample_income_bytes() -> bytes:
    return (importlib.resources.files("wranglekit") / "data" / "sample_income.csv").read_bytes()


@pytest.fixture
def income_table() -> Table:
    return infer_kinds(load_csv(sample_income_bytes(), name="sample_income.csv"))


@pytest.fixture
def income_specs(income_table):
    return enumerate_all_specs(income_table)


@pytest.fixture
def default_config() -> DetectorConfig:
    return DetectorConfig()
