import json

import pytest
import yaml

from scalebench import cli
from scalebench.config import ConfigError, from_dict, load_config
from scalebench.results import read_demand_csv, read_manifest, write_lag_csv

BASE = {
    "name": "tiny",
    "use_case": "UC1",
    "sut_profile": {"name": "cap1000", "cost_per_record": {"UC1": 1.0}, "capacity_per_core": 1000.0},
    "load": {"kind": "sensor_count", "magnitudes": [1000, 2000]},
    "resources": {"kind": "instances", "amounts": [1, 2, 3]},
    "duration": 20,
    "warmup": 5,
    "repetitions": 1,
    "engine": {"partitions": 60},
}


def _write(tmp_path, doc, name="tiny.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def test_config_roundtrip():
    cfg = from_dict(BASE)
    assert from_dict(cfg.to_dict()) == cfg
    assert cfg.to_dict()["duration"] == 20


def test_builtin_profile_by_name():
    cfg = from_dict({**BASE, "sut_profile": "flink-like"})
    assert cfg.sut_profile.name == "flink-like"


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"load": {"magnitudes": []}}, "load.magnitudes"),
        ({"resources": {"amounts": [2, 1]}}, "resources.amounts"),
        ({"use_case": "UC7"}, "use_case"),
        ({"bogus": 1}, "bogus"),
        ({"sut_profile": {"name": "z", "cost_per_record": {"UC1": 0}, "capacity_per_core": 1}}, "sut_profile"),
        ({"search": {"strategy": "binary"}}, "search.strategy"),
        ({"warmup": 50}, "warm-up"),
    ],
)
def test_invalid_configs_name_the_problem(patch, field):
    with pytest.raises(ConfigError, match=field):
        from_dict({**BASE, **patch})


def test_run_writes_results(tmp_path, capsys):
    cfg = _write(tmp_path, BASE)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0
    run_dir = tmp_path / "out" / "tiny"
    points = read_demand_csv(run_dir / "demand.csv")
    assert [(p.load, p.demand) for p in points] == [(1000, 1), (2000, 2)]
    assert (run_dir / "demand.csv").read_text().splitlines()[0] == "load,demand,status"
    cells = (run_dir / "cells.csv").read_text().splitlines()
    assert cells[0] == "load,resources,repetition,slope,dropped_ratio,passed"
    assert len(cells) == 1 + 3
    assert "1000,1,ok" in capsys.readouterr().out


def test_run_honours_output_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SCALEBENCH_OUT", str(tmp_path / "env"))
    assert cli.main(["run", str(_write(tmp_path, BASE)), "--run-id", "r1"]) == 0
    assert (tmp_path / "env" / "r1" / "demand.csv").is_file()


def test_exceeded_written_as_empty_demand(tmp_path):
    doc = {**BASE, "load": {"magnitudes": [5000]}}
    cli.main(["run", str(_write(tmp_path, doc)), "--out", str(tmp_path)])
    assert (tmp_path / "tiny" / "demand.csv").read_text().splitlines()[1] == "5000,,exceeded"


def test_run_empty_grid_exits_3(tmp_path, capsys):
    doc = {**BASE, "load": {"magnitudes": []}}
    assert cli.main(["run", str(_write(tmp_path, doc))]) == 3
    assert "load.magnitudes" in capsys.readouterr().err


def test_run_unparseable_exits_2(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("use_case: [unclosed\n")
    assert cli.main(["run", str(path)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.yaml")]) == 2


def test_json_configs_are_accepted(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(BASE))
    assert load_config(path).name == "tiny"


def test_manifest_reexecutes_to_same_results(tmp_path):
    cli.main(["run", str(_write(tmp_path, BASE)), "--out", str(tmp_path / "a")])
    manifest = tmp_path / "a" / "tiny" / "manifest.json"
    assert read_manifest(manifest)["manifest"]["experiments_run"] == 3
    cli.main(["run", str(manifest), "--out", str(tmp_path / "b")])
    for name in ("demand.csv", "cells.csv"):
        assert (tmp_path / "a" / "tiny" / name).read_bytes() == (tmp_path / "b" / "tiny" / name).read_bytes()


def test_analyze_linear_series(tmp_path, capsys):
    path = tmp_path / "lag.csv"
    write_lag_csv(path, [(t, 200 + 3 * t) for t in range(0, 61, 5)])
    assert cli.main(["analyze", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "slope=3.000000"


def test_analyze_constant_series_passes(tmp_path, capsys):
    path = tmp_path / "lag.csv"
    write_lag_csv(path, [(t, 100) for t in range(0, 61, 5)])
    assert cli.main(["analyze", str(path), "--load", "1000"]) == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("slope=0.000000") and out.endswith("PASS")


def test_analyze_failing_trend(tmp_path, capsys):
    path = tmp_path / "lag.csv"
    write_lag_csv(path, [(t, 600 * t) for t in range(0, 61, 5)])
    cli.main(["analyze", str(path), "--load", "50000"])
    assert capsys.readouterr().out.strip().endswith("FAIL")


@pytest.mark.parametrize("body", ["t_seconds,lag\n", "time,value\n1,2\n", "t_seconds,lag\n1,x\n"])
def test_analyze_bad_files_exit_4(tmp_path, body):
    path = tmp_path / "lag.csv"
    path.write_text(body)
    assert cli.main(["analyze", str(path)]) == 4


def test_analyze_warmup_after_all_samples(tmp_path, capsys):
    path = tmp_path / "lag.csv"
    write_lag_csv(path, [(0, 1), (5, 2)])
    assert cli.main(["analyze", str(path), "--warmup", "10"]) == 4
    assert "warm-up" in capsys.readouterr().err


def test_oracle_command(tmp_path, capsys):
    assert cli.main(["oracle", str(_write(tmp_path, BASE))]) == 0
    assert capsys.readouterr().out.splitlines() == ["1000,1", "2000,2"]


def test_oracle_uc4(tmp_path, capsys):
    doc = {**BASE, "use_case": "UC4", "duration": 600, "warmup": 240,
           "sut_profile": {"name": "p", "cost_per_record": {"UC4": 1.0}, "capacity_per_core": 110.0},
           "load": {"kind": "nested_groups", "magnitudes": [4, 5]}}
    assert cli.main(["oracle", str(_write(tmp_path, doc))]) == 0
    # ceil((256 + 340/60) / 110) and ceil((1024 + 1364/60) / 110)
    assert capsys.readouterr().out.splitlines() == ["4,3", "5,10"]


def test_oracle_rejects_zero_cost_profile(tmp_path):
    doc = {**BASE, "sut_profile": {"name": "z", "cost_per_record": {"UC1": 0.0}, "capacity_per_core": 1.0}}
    assert cli.main(["oracle", str(_write(tmp_path, doc))]) == 3


def test_oracle_refuses_lateness(tmp_path):
    doc = {**BASE, "engine": {"p_late": 0.01}}
    assert cli.main(["oracle", str(_write(tmp_path, doc))]) == 3
