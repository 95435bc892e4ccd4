# -*- coding: utf-8 -*-
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodescale.errors import DuplicatePointError, RecordValidationError
from nodescale.study.model import (
    Family, RunStatus, dofs_per_node, group_series, log2_bucket, series_key, validate_record,
)

from factories import make_record


def raw_record(**overrides):
    data = {
        "study_id": "s", "platform": "cpu", "problem": "p", "nodes": 2, "cycles": 10,
        "wall_time_s": 5.0, "dofs_total": 1000, "status": "ok",
    }
    data.update(overrides)
    return data


def test_validate_record_normalizes_defaults():
    record = validate_record(raw_record(variant=None, metadata={"ranks": 36, "mpi": True}))
    assert record.variant == ""
    assert record.repeat_index == 0
    assert record.status is RunStatus.OK
    assert record.metadata == {"mpi": "true", "ranks": "36"}


def test_validate_record_reports_every_issue():
    with pytest.raises(RecordValidationError) as info:
        validate_record(raw_record(nodes=0, cycles=-1, status="crashed", bogus=1))
    fields = {issue.field for issue in info.value.issues}
    assert {"nodes", "cycles", "status", "bogus"} <= fields
    assert any(issue.reason == "must be ≥ 1" for issue in info.value.issues)


def test_ok_record_requires_wall_time():
    with pytest.raises(RecordValidationError) as info:
        validate_record(raw_record(wall_time_s=None))
    assert [issue.field for issue in info.value.issues] == ["wall_time_s"]


def test_oom_record_without_wall_time_is_valid():
    record = validate_record(raw_record(status="oom", wall_time_s=None))
    assert record.status is RunStatus.OOM
    assert record.wall_time_s is None


@pytest.mark.parametrize("value", [0.0, -1.0, float("nan"), float("inf"), "5"])
def test_wall_time_must_be_positive_finite(value):
    with pytest.raises(RecordValidationError):
        validate_record(raw_record(wall_time_s=value))


def test_ok_record_needs_at_least_one_dof_per_node():
    with pytest.raises(RecordValidationError):
        validate_record(raw_record(nodes=8, dofs_total=4))


def test_booleans_are_not_integers():
    with pytest.raises(RecordValidationError):
        validate_record(raw_record(nodes=True))


def test_dofs_per_node_may_be_fractional():
    assert dofs_per_node(make_record(nodes=4, dofs=10)) == 2.5
    with pytest.raises(ValueError):
        dofs_per_node(make_record(status=RunStatus.FAILED))


@pytest.mark.parametrize("value, expected", [(1, 0), (2, 1), (3, 2), (1024, 10), (1500, 11), (1400, 10)])
def test_log2_bucket(value, expected):
    assert log2_bucket(value) == expected


def test_series_keys_per_family():
    record = make_record(nodes=4, dofs=4096)
    assert series_key(record, Family.STRONG).family_param == 12
    assert series_key(record, Family.WEAK).family_param == 10
    assert series_key(record, Family.THROUGHPUT).family_param == 0


def test_group_series_sorts_and_keeps_ensembles():
    records = [
        make_record("gpu", nodes=2, t=1.0),
        make_record("cpu", nodes=4, t=2.0),
        make_record("cpu", nodes=1, t=8.0),
        make_record("cpu", nodes=1, t=8.5, repeat_index=1),
    ]
    series = group_series(records, "strong")
    assert [s.key.platform for s in series] == ["cpu", "gpu"]
    cpu = series[0]
    assert [p.x for p in cpu.points] == [1, 4]
    assert [r.repeat_index for r in cpu.points[0].records] == [0, 1]


def test_group_series_rejects_duplicates():
    records = [make_record(nodes=2, t=1.0), make_record(nodes=2, t=1.1)]
    with pytest.raises(DuplicatePointError) as info:
        group_series(records, Family.STRONG)
    assert info.value.x == 2


def test_group_series_drops_failed_records(caplog):
    records = [make_record(nodes=1), make_record(nodes=2, status=RunStatus.FAILED)]
    with caplog.at_level(logging.WARNING, logger="nodescale"):
        series = group_series(records, Family.STRONG)
    assert [p.x for p in series[0].points] == [1]
    assert "失败记录" in caplog.text


def test_oom_points_stay_in_series():
    records = [make_record(nodes=1, dofs=100, t=1.0), make_record(nodes=1, dofs=400, status=RunStatus.OOM)]
    (series,) = group_series(records, Family.THROUGHPUT)
    assert [p.x for p in series.points] == [100, 400]
    assert [p.x for p in series.ok_points] == [100]
    assert series.points[1].is_oom


record_lists = st.lists(
    st.tuples(
        st.sampled_from(["cpu", "gpu", "arm"]),
        st.integers(min_value=0, max_value=6),
        st.integers(min_value=10, max_value=30),
        st.sampled_from([RunStatus.OK, RunStatus.OOM, RunStatus.FAILED]),
    ),
    max_size=40,
    unique_by=lambda item: item[:3],
)


@settings(max_examples=200)
@given(record_lists, st.sampled_from(list(Family)))
def test_group_series_partitions_usable_records(items, family):
    records = [make_record(p, nodes=2 ** k, dofs=2 ** d, status=s) for p, k, d, s in items]
    usable = [r for r in records if r.status is not RunStatus.FAILED]
    try:
        series = group_series(records, family)
    except DuplicatePointError:
        return
    grouped = [r for s in series for r in s.records]
    assert sorted(grouped, key=lambda r: r.sort_key()) == sorted(usable, key=lambda r: r.sort_key())
    for s in series:
        xs = [p.x for p in s.points]
        assert xs == sorted(set(xs))
    assert group_series(grouped, family) == series
