import io
import json
import subprocess
import sys

import numpy as np
import pytest

from perceived_ttc import formats
from perceived_ttc.cli import main
from perceived_ttc.errors import EmptyManifest, NoApproachPhase, TooFewPoints
from perceived_ttc.trajectory import TrialRecord, analyze_trial

from conftest import line_trajectory


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_points(path, kind, a, b, n=50):
    x = np.linspace(0.2, 2.0, n)
    y = a * np.exp(b * x) if kind == "exp" else a * x + b
    path.write_text("min_ttc,discomfort\n" + "".join(f"{formats.fmt(u)},{formats.fmt(v)}\n" for u, v in zip(x, y)))
    return path


def test_fit_noiseless_exponential(tmp_path, capsys):
    data = write_points(tmp_path / "p.csv", "exp", 33.9, -6.5)
    code, out, _ = run(capsys, "fit", "--data", data, "--model", "exp", "--out", tmp_path / "m.json",
                       "--curve", tmp_path / "curve.csv")
    assert code == 0
    model = json.loads((tmp_path / "m.json").read_text())
    assert model["a"] == pytest.approx(33.9, rel=1e-6) and model["b"] == pytest.approx(-6.5, rel=1e-6)
    assert json.loads(out)["correlation"] == "strong"
    run_doc = json.loads((tmp_path / "m.json.run.json").read_text())
    assert run_doc["command"] == "fit" and run_doc["parameters"]["model"] == "exp"
    assert len((tmp_path / "curve.csv").read_text().splitlines()) == 201


def test_fit_line(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("min_ttc,discomfort\n" + "".join(f"{x},{2 * x + 1}\n" for x in range(1, 6)))
    assert run(capsys, "fit", "--data", tmp_path / "p.csv", "--model", "line", "--out", tmp_path / "m.json")[0] == 0
    model = json.loads((tmp_path / "m.json").read_text())
    assert (model["a"], model["b"]) == (pytest.approx(2), pytest.approx(1))


def test_fit_one_point_exit_code(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("min_ttc,discomfort\n0.5,1\n")
    code, _, err = run(capsys, "fit", "--data", tmp_path / "p.csv", "--model", "line", "--out", tmp_path / "m.json")
    assert code == TooFewPoints.exit_code
    assert json.loads(err)["error"] == "TooFewPoints"
    assert not (tmp_path / "m.json").exists()


def test_estimate(tmp_path, capsys):
    (tmp_path / "m.json").write_text(json.dumps({"kind": "exp", "a": 33.9, "b": -6.5, "r2": 0.82, "n": 0}))
    code, out, _ = run(capsys, "estimate", "--model", tmp_path / "m.json", "--ttc", 0.52)
    doc = json.loads(out)
    assert code == 0
    assert doc["raw"] == pytest.approx(1.15, abs=0.01) and doc["clamped"] == doc["raw"]
    assert doc["run"]["command"] == "estimate"
    code, _, err = run(capsys, "estimate", "--model", tmp_path / "missing.json", "--ttc", 0.5)
    assert code == json.loads(err)["exit_code"] != 0


def test_analyze_head_on(tmp_path, capsys):
    a = line_trajectory("a", (0, 0), (2, 0), 1.9)
    b = line_trajectory("b", (10, 0), (-3, 0), 1.9)
    trial = TrialRecord("h", "facing", a, b, {"rider": 3, "pedestrian": 2})
    manifest = formats.write_trials(tmp_path / "trials", [trial])
    code, _, _ = run(capsys, "analyze", "--trials", manifest, "--out", tmp_path / "r.csv", "--smoothing", 0)
    assert code == 0
    (row,) = formats.read_rows(tmp_path / "r.csv")
    expected = analyze_trial(trial, 0.0)
    assert float(row["min_ttc"]) == expected.min_ttc
    assert float(row["pass_time"]) == expected.pass_time
    assert (row["discomfort_rider"], row["discomfort_pedestrian"]) == ("3", "2")
    assert json.loads((tmp_path / "r.csv.run.json").read_text())["parameters"]["smoothing"] == 0.0


def test_analyze_empty_manifest(tmp_path, capsys):
    (tmp_path / "m.json").write_text('{"trials": []}')
    code, _, err = run(capsys, "analyze", "--trials", tmp_path / "m.json", "--out", tmp_path / "r.csv")
    assert code == EmptyManifest.exit_code
    assert not (tmp_path / "r.csv").exists()
    assert json.loads(err)["error"] == "EmptyManifest"


def test_analyze_receding_trial(tmp_path, capsys):
    a = line_trajectory("a", (0, 0), (-1, 0), 2.0)
    b = line_trajectory("b", (1, 0), (1, 0), 2.0)
    manifest = formats.write_trials(tmp_path, [TrialRecord("away", "passing", a, b)])
    code, _, err = run(capsys, "analyze", "--trials", manifest, "--out", tmp_path / "r.csv")
    assert code == NoApproachPhase.exit_code
    assert "away" in json.loads(err)["message"]


def test_simulate_determinism_and_empty(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"preset": "default", "sets": 2, "seed": 4,
                                "label_model": {"calibration": {"kind": "exp", "a": 33.9, "b": -6.5,
                                                                "r2": 0.82, "n": 0}}}))
    for name in ("one", "two"):
        assert run(capsys, "simulate", "--spec", spec, "--n", 3, "--out", tmp_path / name)[0] == 0
    files = sorted(p.name for p in (tmp_path / "one").iterdir())
    assert len(files) == 7 and "manifest.json" in files
    for name in files:
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()

    assert run(capsys, "simulate", "--spec", spec, "--n", 0, "--out", tmp_path / "empty")[0] == 0
    assert [p.name for p in (tmp_path / "empty").iterdir()] == ["manifest.json"]
    doc = json.loads((tmp_path / "empty" / "manifest.json").read_text())
    assert doc["trials"] == [] and doc["run"]["parameters"]["seed"] == 4


def test_simulate_bad_specs(tmp_path, capsys):
    for doc in ({"preset": "moon"}, {"scenarios": []},
                {"kind": "facing", "rider_speed": 9, "pedestrian_speed": 1, "initial_gap": 5}):
        (tmp_path / "s.json").write_text(json.dumps(doc))
        code, _, err = run(capsys, "simulate", "--spec", tmp_path / "s.json", "--n", 1, "--out", tmp_path / "o")
        assert code == 60 and json.loads(err)["error"] == "InvalidSpec"


def test_pipeline_round_trip(tmp_path, capsys):
    """simulate -> analyze -> fit -> estimate -> stats using only file outputs."""
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"preset": "default", "sets": 10, "seed": 1,
                                "label_model": {"calibration": {"kind": "exp", "a": 33.9, "b": -6.5,
                                                                "r2": 0.82, "n": 0}, "noise_sigma": 0.3}}))
    assert run(capsys, "simulate", "--spec", spec, "--n", 100, "--out", tmp_path / "sim")[0] == 0
    assert run(capsys, "analyze", "--trials", tmp_path / "sim" / "manifest.json", "--out", tmp_path / "r.csv")[0] == 0
    rows = formats.read_rows(tmp_path / "r.csv")
    assert len(rows) == 200
    assert [r["trial_id"] for r in rows] == sorted(r["trial_id"] for r in rows)
    assert run(capsys, "fit", "--data", tmp_path / "r.csv", "--model", "exp", "--out", tmp_path / "m.json")[0] == 0
    code, out, _ = run(capsys, "estimate", "--model", tmp_path / "m.json", "--ttc", 0.5)
    assert code == 0 and 0 <= json.loads(out)["clamped"] <= 6
    assert run(capsys, "stats", "--data", tmp_path / "r.csv", "--group-by", "kind", "--out", tmp_path / "box.json",
               "--csv", tmp_path / "box.csv")[0] == 0
    box = json.loads((tmp_path / "box.json").read_text())
    assert list(box) == ["facing", "passing"]
    assert box["facing"]["median"] < box["passing"]["median"]
    assert run(capsys, "stats", "--data", tmp_path / "r.csv", "--group-by", "rider", "--out", tmp_path / "rb.json")[0] == 0
    assert sorted(json.loads((tmp_path / "rb.json").read_text())) == [f"rider_{c}" for c in "ABCDEFGHIJ"]


def test_stream_command(tmp_path, capsys, monkeypatch):
    (tmp_path / "m.json").write_text(json.dumps({"kind": "exp", "a": 33.9, "b": -6.5, "r2": 0.82, "n": 0}))
    lines = [
        {"agent_id": "a", "t": 0.0, "position": [0, 0], "velocity": [2, 0]},
        {"agent_id": "b", "t": 0.0, "position": [10, 0], "velocity": [-3, 0]},
    ]
    monkeypatch.setattr(sys, "stdin", io.StringIO("\n".join(json.dumps(x) for x in lines) + "\n"))
    code, out, _ = run(capsys, "stream", "--model", tmp_path / "m.json", "--threshold", 1.0,
                       "--run-manifest", tmp_path / "stream.run.json")
    assert code == 0
    (event,) = [json.loads(line) for line in out.splitlines()]
    assert event["ttc"]["value"] == pytest.approx(2.0) and event["alert"] is False
    assert json.loads((tmp_path / "stream.run.json").read_text())["parameters"]["threshold"] == 1.0

    monkeypatch.setattr(sys, "stdin", io.StringIO('{"agent_id": "a", "t": 1}\n'))
    code, _, err = run(capsys, "stream", "--model", tmp_path / "m.json", "--threshold", 1.0)
    assert code == json.loads(err)["exit_code"] == 12

    code, _, err = run(capsys, "stream", "--model", tmp_path / "m.json", "--threshold", 7)
    assert json.loads(err)["error"] == "OutOfRange" and code == 71


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "perceived_ttc", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
