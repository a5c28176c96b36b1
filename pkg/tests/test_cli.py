import json

import numpy as np
import pytest

from finslercut import scenario
from finslercut.cli import main, run_scenario
from finslercut.errors import SchemaError

SMALL = {"tasks.rho.params.sample_count": 64}


def test_missing_metric_kind_names_field():
    doc = scenario.load("circle_euclid").doc
    del doc["metric"]["kind"]
    with pytest.raises(SchemaError) as exc:
        scenario.load(doc)
    assert exc.value.field == "metric.kind"


def test_unknown_key_rejected():
    with pytest.raises(SchemaError):
        scenario.load("circle_euclid", {"metric.colour": "red"})


def test_undefined_submanifold():
    with pytest.raises(SchemaError):
        scenario.load("circle_euclid", {"tasks.rho.submanifold": "nowhere"})


def test_circle_scenario_outputs(tmp_path):
    status, report = run_scenario("circle_euclid", SMALL, tmp_path, 1)
    assert status == 0 and report["passed"]
    vals = {t["id"]: t["values"] for t in report["tasks"]}
    assert vals["rho"]["min_rho"] == pytest.approx(1, abs=1e-3)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["seed"] == 0 and len(man["scenario_sha256"]) == 64
    assert all(a["passed"] for t in man["tasks"] for a in t["assertions"])
    assert (tmp_path / "results.csv").exists() and (tmp_path / "rho.csv").exists()


def test_results_independent_of_workers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_scenario("circle_euclid", SMALL, a, 1)
    run_scenario("circle_euclid", SMALL, b, 2)
    assert (a / "results.csv").read_text() == (b / "results.csv").read_text()
    assert (a / "rho.csv").read_text() == (b / "rho.csv").read_text()


def test_failed_assertion_exit_code(tmp_path):
    args = ["run", "circle_euclid", "--out", str(tmp_path), "--set", "tasks.rho.params.sample_count=64",
            "--set", "tasks.rho.expect.0.value=2.0"]
    assert main(args) == 1


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: x\nmetric: {}\ntasks: []\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "metric.kind" in capsys.readouterr().err


def test_oracle_distance_command(capsys):
    assert main(["oracle-distance", "RD", "0,0", "1,0"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.5, rel=0.03)
    assert main(["oracle-distance", "RD", "1,0", "0,0"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.5, rel=0.03)


def test_verify_tensors(capsys):
    assert main(["verify", "tensors"]) == 0
    assert main(["verify", "nonsense"]) == 2


def test_ellipse_scenario(tmp_path):
    status, report = run_scenario("ellipse_cutlocus", {}, tmp_path, 1)
    assert status == 0
    vals = {t["id"]: t["values"] for t in report["tasks"]}
    assert vals["cloud"]["inj_radius"] == pytest.approx(0.5, rel=0.01)
    # the inward cut locus is the major-axis segment between the evolute cusps
    pts = np.loadtxt(tmp_path / "cloud.csv", delimiter=",", skiprows=1, usecols=(1, 2))
    assert np.abs(pts[:, 1]).max() < 1e-5
    assert np.abs(pts[:, 0]).max() <= 1.5 + 1e-4
