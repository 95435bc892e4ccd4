# -*- coding: utf-8 -*-
import csv
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest
from click.testing import CliRunner

from nodescale.charts.render import ChartKind
from nodescale.cli import cli, run
from nodescale.commands.chart_cmd import build_chart_spec
from nodescale.study.ingest import serialize_records
from nodescale.study.model import Family

from factories import make_record

SVG = "{http://www.w3.org/2000/svg}"

WEAK_STUDY = {
    "study_id": "sedov", "kind": "weak", "platforms": ["CTS-1"], "base_nodes": 4,
    "refinements": 3, "dim": 3, "base_elements": 1764, "dofs_per_element": 64, "cycles": 20,
    "command_template": "srun -N {nodes} ./laghos -rs {refinement_level}",
}

MODELS = {"platforms": [
    {"name": "CTS-1", "rate_dofs_per_s": 2e7, "serial_s_per_cycle": 1e-3, "comm_s_per_cycle": 2e-3,
     "mem_capacity_dofs_per_node": 5e7, "noise_rel": 0.03, "seed": 1},
    {"name": "ATS-2", "rate_dofs_per_s": 4e8, "half_saturation_dofs": 2e6, "launch_s_per_cycle": 1e-3,
     "comm_s_per_cycle": 4e-3, "mem_capacity_dofs_per_node": 3e7, "noise_rel": 0.03, "seed": 2},
]}


@pytest.fixture
def runner():
    return CliRunner()


def write_json(path, data):
    Path(path).write_text(json.dumps(data), encoding="utf-8")


def read_csv(path):
    return list(csv.reader(io.StringIO(Path(path).read_text(encoding="utf-8"), newline="")))


def invoke(runner, *args):
    result = runner.invoke(cli, list(args))
    assert result.exit_code == 0, result.output
    return result


def test_plan_strong_and_weak(runner):
    with runner.isolated_filesystem():
        write_json("strong.json", {**WEAK_STUDY, "kind": "strong", "doublings": 3, "base_nodes": 1})
        invoke(runner, "plan", "--spec", "strong.json", "--out", "strong.jsonl")
        assert len(Path("strong.jsonl").read_text().splitlines()) == 4

        write_json("weak.json", WEAK_STUDY)
        invoke(runner, "plan", "--spec", "weak.json", "--out", "weak.jsonl")
        nodes = [json.loads(line)["nodes"] for line in Path("weak.jsonl").read_text().splitlines()]
        assert nodes == [4, 32, 256, 2048]


def test_plan_rejects_malformed_spec(runner):
    with runner.isolated_filesystem():
        write_json("bad.json", {"study_id": "x", "kind": "weak", "platforms": [], "refinements": -1})
        result = runner.invoke(cli, ["plan", "--spec", "bad.json", "--out", "runs.jsonl"])
        assert result.exit_code == 1
        assert "refinements" in result.output
        assert not Path("runs.jsonl").exists()


def test_simulate_repeats_and_determinism(runner):
    with runner.isolated_filesystem():
        write_json("study.json", {**WEAK_STUDY, "kind": "strong", "doublings": 3, "base_nodes": 1})
        write_json("models.json", MODELS)
        invoke(runner, "plan", "--spec", "study.json", "--out", "runs.jsonl")
        invoke(runner, "simulate", "--plan", "runs.jsonl", "--model", "models.json", "--repeats", "5",
               "--out", "a.jsonl")
        invoke(runner, "simulate", "--plan", "runs.jsonl", "--model", "models.json", "--repeats", "5",
               "--out", "b.jsonl")
        lines = Path("a.jsonl").read_text().splitlines()
        assert len(lines) == 20
        assert Path("a.jsonl").read_bytes() == Path("b.jsonl").read_bytes()


def test_simulate_marks_oom_at_end_of_ladder(runner):
    with runner.isolated_filesystem():
        write_json("study.json", {"study_id": "tp", "kind": "throughput", "platforms": ["ATS-2"],
                                  "dof_ladder": [10 ** k for k in range(4, 9)]})
        write_json("models.json", MODELS)
        invoke(runner, "plan", "--spec", "study.json", "--out", "runs.jsonl")
        invoke(runner, "simulate", "--plan", "runs.jsonl", "--model", "models.json", "--out", "records.jsonl")
        statuses = [json.loads(line)["status"] for line in Path("records.jsonl").read_text().splitlines()]
        assert statuses == ["ok", "ok", "ok", "ok", "oom"]

        invoke(runner, "chart", "--records", "records.jsonl", "--kind", "throughput", "--out", "tp.svg")
        root = ET.parse("tp.svg").getroot()
        assert [el.text for el in root.iter(f"{SVG}text") if el.get("class") == "oom"] == ["OOM"]

        invoke(runner, "analyze", "--records", "records.jsonl", "--family", "throughput", "--out", "tp.csv")
        rows = read_csv("tp.csv")
        column = rows[0].index("throughput")
        assert [row[column] == "" for row in rows[1:]] == [False, False, False, False, True]


def test_simulate_unknown_platform(runner):
    with runner.isolated_filesystem():
        write_json("study.json", {**WEAK_STUDY, "platforms": ["mystery"]})
        write_json("models.json", MODELS)
        invoke(runner, "plan", "--spec", "study.json", "--out", "runs.jsonl")
        result = runner.invoke(cli, ["simulate", "--plan", "runs.jsonl", "--model", "models.json",
                                     "--out", "records.jsonl"])
        assert result.exit_code == 1
        assert not Path("records.jsonl").exists()


def weak_fixture():
    return [make_record("CTS-1", nodes=n, t=t, dofs=n * 112896) for n, t in
            ((4, 2.00), (32, 2.40), (256, 2.80), (2048, 2.98))]


def test_analyze_weak_slowdown(runner):
    with runner.isolated_filesystem():
        Path("weak.jsonl").write_text(serialize_records(weak_fixture()), encoding="utf-8")
        invoke(runner, "analyze", "--records", "weak.jsonl", "--family", "weak", "--out", "weak.csv")
        rows = read_csv("weak.csv")
        slowdown = [row[rows[0].index("slowdown")] for row in rows[1:]]
        assert slowdown[0] == "1"
        assert slowdown[-1] == "1.49"
        assert Path("weak.csv").read_bytes().count(b"\r\n") == len(rows)


def test_analyze_strong_with_filter(runner):
    records = [make_record(p, nodes=n, t=8.0 / n) for p in ("CTS-1", "ATS-2") for n in (1, 2, 4, 8)]
    with runner.isolated_filesystem():
        Path("strong.jsonl").write_text(serialize_records(records), encoding="utf-8")
        invoke(runner, "analyze", "--records", "strong.jsonl", "--family", "strong", "--out", "all.csv")
        rows = read_csv("all.csv")
        assert rows[1][rows[0].index("speedup")] == "1"

        invoke(runner, "analyze", "--records", "strong.jsonl", "--family", "strong",
               "--filter", "platform == CTS-1 and nodes >= 4", "--out", "some.csv")
        rows = read_csv("some.csv")
        assert [(row[0], row[5]) for row in rows[1:]] == [("CTS-1", "4"), ("CTS-1", "8")]


def test_analyze_partial_parse(runner):
    with runner.isolated_filesystem():
        text = serialize_records(weak_fixture()) + "{broken\n"
        Path("weak.jsonl").write_text(text, encoding="utf-8")
        result = runner.invoke(cli, ["analyze", "--records", "weak.jsonl", "--family", "weak", "--out", "a.csv"])
        assert result.exit_code == 0
        assert "weak.jsonl:5" in result.output

        result = runner.invoke(cli, ["analyze", "--records", "weak.jsonl", "--family", "weak",
                                     "--strict", "--out", "b.csv"])
        assert result.exit_code == 1
        assert not Path("b.csv").exists()


def test_chart_weak_annotations(runner):
    with runner.isolated_filesystem():
        Path("weak.jsonl").write_text(serialize_records(weak_fixture()), encoding="utf-8")
        invoke(runner, "chart", "--records", "weak.jsonl", "--kind", "weak", "--annotate", "--ideal", "0",
               "--out", "weak.svg")
        root = ET.parse("weak.svg").getroot()
        notes = [el.text for el in root.iter(f"{SVG}text") if el.get("class") == "annotation"]
        assert notes == ["1.0", "1.2", "1.4", "1.49"]
        assert [el for el in root.iter(f"{SVG}line") if el.get("class") == "ideal"]


def test_chart_empty_selection(runner):
    with runner.isolated_filesystem():
        Path("weak.jsonl").write_text(serialize_records(weak_fixture()), encoding="utf-8")
        result = runner.invoke(cli, ["chart", "--records", "weak.jsonl", "--kind", "weak",
                                     "--filter", "platform == nowhere", "--out", "none.svg"])
        assert result.exit_code == 1
        assert not Path("none.svg").exists()


def test_compare_platforms(runner):
    records = [make_record("CTS-1", nodes=n, t=t) for n, t in ((1, 30.0), (8, 4.0), (32, 1.2))]
    records += [make_record("ATS-2", nodes=n, t=t) for n, t in ((1, 2.0), (8, 0.5), (32, 0.3))]
    with runner.isolated_filesystem():
        Path("r.jsonl").write_text(serialize_records(records), encoding="utf-8")
        invoke(runner, "compare", "--records", "r.jsonl", "--a", "CTS-1", "--b", "ATS-2", "--out", "cmp.csv")
        rows = read_csv("cmp.csv")
        column = rows[0].index("speedup_b_over_a")
        assert [float(row[column]) for row in rows[1:]] == pytest.approx([15.0, 8.0, 4.0], rel=0.01)
        column = rows[0].index("doublings")
        assert [float(row[column]) for row in rows[1:]] == pytest.approx([3.907, 3.0, 2.0], abs=0.01)


def test_end_to_end_determinism(runner):
    with runner.isolated_filesystem():
        write_json("study.json", {**WEAK_STUDY, "kind": "strong_weak", "platforms": ["CTS-1", "ATS-2"],
                                  "base_nodes": 1, "doublings": 6, "refinements": 2})
        write_json("models.json", MODELS)
        outputs = []
        for attempt in range(2):
            invoke(runner, "plan", "--spec", "study.json", "--out", f"runs{attempt}.jsonl")
            invoke(runner, "simulate", "--plan", f"runs{attempt}.jsonl", "--model", "models.json",
                   "--repeats", "3", "--out", f"records{attempt}.jsonl")
            invoke(runner, "analyze", "--records", f"records{attempt}.jsonl", "--family", "strong",
                   "--stat", "stddev", "--out", f"table{attempt}.csv")
            invoke(runner, "chart", "--records", f"records{attempt}.jsonl", "--kind", "strong-weak",
                   "--ideal", "-1", "--out", f"chart{attempt}.svg")
            outputs.append((Path(f"table{attempt}.csv").read_bytes(), Path(f"chart{attempt}.svg").read_bytes()))
        assert outputs[0] == outputs[1]

        root = ET.fromstring(outputs[0][1])
        lines = [el for el in root.iter(f"{SVG}polyline") if el.get("class") == "series"]
        assert any(el.get("stroke-dasharray") == "6,4" for el in lines)
        assert any(el.get("stroke-dasharray") is None for el in lines)
        assert [el for el in root.iter(f"{SVG}polygon") if el.get("class") == "band"]


def test_config_file_sets_chart_size(runner):
    with runner.isolated_filesystem():
        Path("nodescale.toml").write_text("[chart]\nwidth = 640\nheight = 480\n", encoding="utf-8")
        Path("weak.jsonl").write_text(serialize_records(weak_fixture()), encoding="utf-8")
        invoke(runner, "chart", "--records", "weak.jsonl", "--kind", "weak", "--out", "a.svg")
        assert ET.parse("a.svg").getroot().get("width") == "640"
        invoke(runner, "chart", "--records", "weak.jsonl", "--kind", "weak", "--width", "900", "--out", "b.svg")
        assert ET.parse("b.svg").getroot().get("width") == "900"


def test_invalid_config_is_a_user_error(runner):
    with runner.isolated_filesystem():
        Path("nodescale.toml").write_text("[analyze]\nstat = 'median'\n", encoding="utf-8")
        Path("weak.jsonl").write_text(serialize_records(weak_fixture()), encoding="utf-8")
        result = runner.invoke(cli, ["analyze", "--records", "weak.jsonl", "--family", "weak"])
        assert result.exit_code == 1


def test_init_writes_starter_files(runner):
    with runner.isolated_filesystem():
        invoke(runner, "init")
        for name in ("nodescale.toml", "study.json", "platforms.json"):
            assert Path(name).exists()
        invoke(runner, "plan", "--spec", "study.json", "--out", "runs.jsonl")
        invoke(runner, "simulate", "--plan", "runs.jsonl", "--model", "platforms.json", "--out", "r.jsonl")

        Path("study.json").write_text("{}", encoding="utf-8")
        runner.invoke(cli, ["init"], input="n\nn\nn\n")
        assert Path("study.json").read_text(encoding="utf-8") == "{}"
        invoke(runner, "init", "--force")
        assert json.loads(Path("study.json").read_text(encoding="utf-8"))["kind"] == "strong_weak"


def test_run_maps_usage_errors_to_exit_code_1():
    assert run(["plan"]) == 1
    assert run(["--version"]) == 0


def test_strong_weak_chart_drops_single_point_weak_series(runner):
    mega = 1 << 20
    records = [make_record("cpu", nodes=n, dofs=mega) for n in (1, 2, 4)]
    records.append(make_record("cpu", nodes=2, dofs=2 * mega))
    spec = build_chart_spec(records, ChartKind.STRONG_WEAK, "minmax")
    families = [s.key.family for s in spec.series]
    assert families.count(Family.STRONG) == 2
    assert families.count(Family.WEAK) == 1
    assert all(len(s.points) >= 2 for s in spec.series if s.key.family is Family.WEAK)
    with runner.isolated_filesystem():
        Path("r.jsonl").write_text(serialize_records(records), encoding="utf-8")
        invoke(runner, "chart", "--records", "r.jsonl", "--kind", "strong-weak", "--out", "sw.svg")
        root = ET.parse("sw.svg").getroot()
        labels = [el for el in root.iter(f"{SVG}text") if el.get("class") == "legend-label"]
        assert len(labels) == len(spec.series) == 3


def test_chart_too_small_is_a_user_error(runner):
    with runner.isolated_filesystem():
        Path("weak.jsonl").write_text(serialize_records(weak_fixture()), encoding="utf-8")
        result = runner.invoke(cli, ["chart", "--records", "weak.jsonl", "--kind", "weak",
                                     "--width", "200", "--out", "tiny.svg"])
        assert result.exit_code == 1
        assert not Path("tiny.svg").exists()


def test_plan_rejects_bad_format_spec(runner):
    with runner.isolated_filesystem():
        write_json("study.json", {**WEAK_STUDY, "command_template": "run {platform:04d}"})
        result = runner.invoke(cli, ["plan", "--spec", "study.json", "--out", "runs.jsonl"])
        assert result.exit_code == 1
        assert "command_template" in result.output
        assert not Path("runs.jsonl").exists()
