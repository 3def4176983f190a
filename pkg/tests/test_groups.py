import math
import random

import pytest

from tablegen import oracle_group_stats, oracle_partition, random_table

from wranglekit import (
    Column,
    ColumnKind,
    GroupSpec,
    Table,
    enumerate_all_specs,
    enumerate_groups,
    enumerate_groups_full,
    group_stats,
    infer_kinds,
    load_csv,
)
from wranglekit.errors import (
    ColumnNotFound,
    KindMismatch,
    NoCategoricalColumns,
    NoNumericColumns,
    StaleGroup,
)


def test_income_fixture_groups(income_table):
    spec = GroupSpec("Country", "Income")
    groups = enumerate_groups(income_table, spec)
    assert [g.key for g in groups] == ["Bhutan", "Lesotho"]
    assert groups[0].rows.tolist() == [0, 1, 2, 3]


def test_single_row_table():
    t = infer_kinds(load_csv(b"k,v\na,1"))
    groups = enumerate_groups(t, GroupSpec("k", "v"))
    assert len(groups) == 1
    assert groups[0].rows.tolist() == [0]


def test_missing_key_sentinel_group_ordered_last():
    t = infer_kinds(load_csv(b"k,v\nb,1\n,2\na,3"))
    groups = enumerate_groups(t, GroupSpec("k", "v"))
    assert [g.key for g in groups] == ["a", "b", None]
    assert groups[-1].rows.tolist() == [1]


def test_partition_with_min_support_matches_brute_force():
    rng = random.Random(42)
    gen = random_table(rng, max_rows=200)
    t = gen.table
    spec = GroupSpec(gen.categorical[0], gen.numeric[0], min_support=5)
    groups, excluded = enumerate_groups_full(t, spec)
    returned_rows = sorted(r for g in groups for r in g.rows.tolist())
    assert len(returned_rows) + excluded == t.row_count

    oracle = oracle_partition(t, spec.group_by)
    expected_keys = sorted(
        (k for k, rows in oracle.items() if len(rows) >= 5 and k is not None)
    )
    got_keys = [g.key for g in groups if g.key is not None]
    assert got_keys == expected_keys
    for g in groups:
        assert g.rows.tolist() == oracle[g.key]


def test_partition_property_full_support():
    rng = random.Random(7)
    for _ in range(10):
        gen = random_table(rng, max_rows=80)
        spec = GroupSpec(gen.categorical[0], gen.numeric[0], min_support=1)
        groups = enumerate_groups(gen.table, spec)
        all_rows = sorted(r for g in groups for r in g.rows.tolist())
        assert all_rows == list(range(gen.table.row_count))


def test_exclusion_monotonicity():
    rng = random.Random(3)
    gen = random_table(rng, max_rows=120)
    spec_lo = GroupSpec(gen.categorical[0], gen.numeric[0], min_support=1)
    counts = [len(enumerate_groups(gen.table, GroupSpec(spec_lo.group_by, spec_lo.target, min_support=s)))
              for s in (1, 2, 4, 8)]
    assert counts == sorted(counts, reverse=True)


def test_determinism():
    rng = random.Random(11)
    gen = random_table(rng)
    spec = GroupSpec(gen.categorical[0], gen.numeric[0])
    a = enumerate_groups(gen.table, spec)
    b = enumerate_groups(gen.table, spec)
    assert [(g.key, g.rows.tolist()) for g in a] == [(g.key, g.rows.tolist()) for g in b]


def test_spec_errors():
    t = infer_kinds(load_csv(b"k,v\na,1"))
    with pytest.raises(ColumnNotFound):
        enumerate_groups(t, GroupSpec("nope", "v"))
    with pytest.raises(KindMismatch):
        enumerate_groups(t, GroupSpec("v", "k"))
    with pytest.raises(ValueError):
        GroupSpec("k", "k")
    with pytest.raises(ValueError):
        GroupSpec("k", "v", min_support=0)


class TestEnumerateAllSpecs:
    def test_product_count(self):
        t = infer_kinds(load_csv(b"a,b,x,y,z\nk,m,1,2,3\nl,n,4,5,6"))
        specs = enumerate_all_specs(t)
        assert len(specs) == 6  # 2 categorical x 3 numeric

    def test_target_filter(self, income_table):
        specs = enumerate_all_specs(income_table, targets=["Income"])
        assert len(specs) == 2
        assert {s.group_by for s in specs} == {"Country", "Degree"}

    def test_no_numeric(self):
        t = infer_kinds(load_csv(b"a,b\nx,y"))
        with pytest.raises(NoNumericColumns):
            enumerate_all_specs(t)

    def test_no_categorical(self):
        t = infer_kinds(load_csv(b"a,b\n1,2"))
        with pytest.raises(NoCategoricalColumns):
            enumerate_all_specs(t)

    def test_bad_target_kind(self, income_table):
        with pytest.raises(KindMismatch):
            enumerate_all_specs(income_table, targets=["Country"])


class TestGroupStats:
    def test_two_point_case(self):
        t = Table([
            Column("k", ColumnKind.CATEGORICAL, ["a", "a"]),
            Column("v", ColumnKind.NUMERIC, [2.0, 4.0]),
        ])
        g = enumerate_groups(t, GroupSpec("k", "v"))[0]
        stats = group_stats(t, g)
        assert stats.mean == 3.0
        assert stats.std == 1.0
        assert stats.count == 2

    def test_exclusion_rule(self):
        t = Table([
            Column("k", ColumnKind.CATEGORICAL, ["a", "a", "a"]),
            Column("v", ColumnKind.NUMERIC, [5.0, None, "12k"]),
        ])
        g = enumerate_groups(t, GroupSpec("k", "v"))[0]
        stats = group_stats(t, g)
        assert stats.count == 3
        assert stats.mean == 5.0
        assert stats.std == 0.0
        assert stats.missing_count == 1
        assert stats.mismatch_count == 1

    def test_all_unusable_gives_undefined(self):
        t = Table([
            Column("k", ColumnKind.CATEGORICAL, ["a"]),
            Column("v", ColumnKind.NUMERIC, [None]),
        ])
        g = enumerate_groups(t, GroupSpec("k", "v"))[0]
        stats = group_stats(t, g)
        assert stats.mean is None and stats.std is None

    def test_against_two_pass_oracle(self):
        rng = random.Random(99)
        gen = random_table(rng, max_rows=120)
        t = gen.table
        spec = GroupSpec(gen.categorical[0], gen.numeric[0])
        for g in enumerate_groups(t, spec):
            cells = [t.column(spec.target).cells[r] for r in g.rows.tolist()]
            mean, std = oracle_group_stats(cells)
            stats = group_stats(t, g)
            if mean is None:
                assert stats.mean is None
            else:
                assert math.isclose(stats.mean, mean, rel_tol=0, abs_tol=1e-12)
                assert math.isclose(stats.std, std, rel_tol=0, abs_tol=1e-12)

    def test_stale_group(self, income_table):
        g = enumerate_groups(income_table, GroupSpec("Country", "Income"))[0]
        newer = income_table.with_columns(income_table.columns, version=5)
        with pytest.raises(StaleGroup):
            group_stats(newer, g)
