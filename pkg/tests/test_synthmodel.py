# -*- coding: utf-8 -*-
import json

import pytest

from nodescale.errors import ModelValidationError, RecordValidationError, UnknownPlatformError
from nodescale.study.ingest import parse_records, serialize_records
from nodescale.study.metrics import strong_speedup, throughput_series, weak_efficiency
from nodescale.study.model import Family, RunStatus, SeriesKey, group_series
from nodescale.study.planner import RunSpec, parse_study_spec, plan
from nodescale.study.synthmodel import (
    PlatformModel, dump_platform_models, load_platform_models, model_time_per_cycle, noise_unit,
    parse_platform_model, parse_platform_models, resolve_model, simulate_plan, simulate_run, splitmix64,
)


def run_spec(nodes=1, dofs_total=1_000_000, cycles=10, platform="m", variant=""):
    return RunSpec(
        study_id="synthetic", platform=platform, nodes=nodes, refinement_level=None,
        dofs_total=dofs_total, cycles=cycles, command="", variant=variant,
        expected_series=SeriesKey(platform, variant, "synthetic", Family.STRONG, 0),
    )


def model(**overrides):
    params = dict(name="m", rate_dofs_per_s=1e6, mem_capacity_dofs_per_node=1e9)
    params.update(overrides)
    return PlatformModel(**params)


def test_model_time_examples():
    assert model_time_per_cycle(model(), 1, 10 ** 6) == 1.0
    assert model_time_per_cycle(model(), 2, 10 ** 6) == 0.5
    assert model_time_per_cycle(model(half_saturation_dofs=1e6), 1, 10 ** 6) == 2.0
    with pytest.raises(ValueError):
        model_time_per_cycle(model(), 0, 10)


def test_oom_when_over_capacity():
    record = simulate_run(model(mem_capacity_dofs_per_node=1e7), run_spec(dofs_total=2 * 10 ** 7))
    assert record.status is RunStatus.OOM
    assert record.wall_time_s is None
    assert record.metadata["simulated"] == "true"


def test_noiseless_wall_time_is_exact():
    record = simulate_run(model(), run_spec(nodes=4, cycles=25))
    assert record.wall_time_s == 25 * 0.25
    assert record.problem == "synthetic"


def test_noise_is_deterministic_and_bounded():
    noisy = model(noise_rel=0.1, seed=42)
    first = [simulate_run(noisy, run_spec(nodes=n), repeat_index=i) for n in (1, 2, 4) for i in range(5)]
    second = [simulate_run(noisy, run_spec(nodes=n), repeat_index=i) for n in (1, 2, 4) for i in range(5)]
    assert first == second
    for record in first:
        exact = record.cycles * model_time_per_cycle(noisy, record.nodes, record.dofs_total)
        assert abs(record.wall_time_s / exact - 1.0) <= 0.1
    assert len({r.wall_time_s for r in first if r.nodes == 1}) == 5


def test_noise_generator_is_pinned():
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    u = noise_unit(7, "s", "cpu", 1, 1000, 0)
    assert 0.0 <= u < 1.0
    assert u == noise_unit(7, "s", "cpu", 1, 1000, 0)
    assert u != noise_unit(8, "s", "cpu", 1, 1000, 0)


def test_parse_platform_model_collects_issues():
    with pytest.raises(ModelValidationError) as info:
        parse_platform_model({"name": "", "rate_dofs_per_s": 0, "mem_capacity_dofs_per_node": 1e6,
                              "noise_rel": 0.5, "comm_s_per_cycle": -1, "color": "red"})
    fields = {issue.field for issue in info.value.issues}
    assert fields == {"name", "rate_dofs_per_s", "noise_rel", "comm_s_per_cycle", "color"}


def test_load_platform_models(tmp_path):
    path = tmp_path / "platforms.json"
    path.write_text(json.dumps({"platforms": [
        {"name": "cpu-like", "rate_dofs_per_s": 2e7, "mem_capacity_dofs_per_node": 5e7},
        {"name": "gpu-like", "rate_dofs_per_s": 4e8, "mem_capacity_dofs_per_node": 3e7,
         "half_saturation_dofs": 2e6, "seed": 3},
    ]}), encoding="utf-8")
    models = load_platform_models(str(path))
    assert sorted(models) == ["cpu-like", "gpu-like"]
    assert models["gpu-like"].seed == 3

    reloaded = parse_platform_models(json.loads(dump_platform_models(models.values())))
    assert reloaded == models


def test_simulate_plan_repeats():
    runs = [run_spec(nodes=2 ** k) for k in range(4)]
    records = simulate_plan({"m": model(noise_rel=0.05)}, runs, repeats=5)
    assert len(records) == 20
    assert sorted({r.repeat_index for r in records}) == [0, 1, 2, 3, 4]
    with pytest.raises(UnknownPlatformError):
        simulate_plan({}, runs)


def test_ideal_model_scales_perfectly():
    ideal = model()
    strong = simulate_plan({"m": ideal}, [run_spec(nodes=2 ** k) for k in range(6)])
    (series,) = group_series(strong, Family.STRONG)
    for point in strong_speedup(series):
        assert point.value == pytest.approx(point.x, rel=1e-12)

    weak = simulate_plan({"m": ideal}, [run_spec(nodes=8 ** k, dofs_total=8 ** k * 4096) for k in range(4)])
    (series,) = group_series(weak, Family.WEAK)
    assert weak_efficiency(series).efficiency.values == pytest.approx([1.0] * 4, rel=1e-12)


def test_communication_makes_weak_slowdown_grow():
    comm = model(comm_s_per_cycle=0.01)
    runs = [run_spec(nodes=8 ** k, dofs_total=8 ** k * 100_000) for k in range(5)]
    (series,) = group_series(simulate_plan({"m": comm}, runs), Family.WEAK)
    slowdown = weak_efficiency(series).slowdown.values
    assert all(later > earlier for earlier, later in zip(slowdown, slowdown[1:]))


def test_saturating_throughput_is_monotone():
    gpu = model(rate_dofs_per_s=1e8, half_saturation_dofs=1e5)
    runs = [run_spec(dofs_total=1000 * 2 ** k) for k in range(16)]
    (series,) = group_series(simulate_plan({"m": gpu}, runs), Family.THROUGHPUT)
    values = throughput_series(series).values
    assert all(later >= earlier for earlier, later in zip(values, values[1:]))
    assert values[-1] < 1e8
    assert values[-1] > 0.99 * 1e8


def test_simulated_records_parse_back_unchanged():
    spec = parse_study_spec({
        "study_id": "sedov", "kind": "strong_weak", "platforms": ["m", {"name": "m", "variant": "pool"}],
        "base_elements": 2, "dofs_per_element": 8, "refinements": 1, "doublings": 3, "cycles": 5,
    })
    records = simulate_plan({"m": model(noise_rel=0.1, mem_capacity_dofs_per_node=64)}, plan(spec), repeats=2)
    assert {r.status for r in records} == {RunStatus.OK, RunStatus.OOM}
    parsed, errors = parse_records(serialize_records(records).encode("utf-8").splitlines(keepends=True))
    assert errors == []
    assert parsed == records


def test_simulate_run_rejects_more_nodes_than_dofs():
    with pytest.raises(RecordValidationError):
        simulate_run(model(), run_spec(nodes=8, dofs_total=4))


def test_variant_resolves_its_own_model():
    base, pool = model(), model(name="m:pool", rate_dofs_per_s=2e6)
    models = {"m": base, "m:pool": pool}
    assert resolve_model(models, run_spec()) is base
    assert resolve_model(models, run_spec(variant="pool")) is pool
    assert resolve_model(models, run_spec(variant="container")) is base
    with pytest.raises(UnknownPlatformError):
        resolve_model(models, run_spec(platform="gpu"))

    runs = [run_spec(nodes=n, variant=v) for v in ("", "pool") for n in (1, 2, 4)]
    records = simulate_plan(models, runs)
    base_times = [r.wall_time_s for r in records if r.variant == ""]
    pool_times = [r.wall_time_s for r in records if r.variant == "pool"]
    assert pool_times == [t / 2 for t in base_times]
    assert {r.metadata["model"] for r in records if r.variant == "pool"} == {"m:pool"}
