import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from opindyn.cli import run
from opindyn.formats import load_trajectory

NETWORKS = Path(__file__).resolve().parent.parent / "demos" / "networks"


def net(name):
    return str(NETWORKS / name)


def test_analyze_social_power(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run(["analyze", "--input", net("ex1.json"), "--output", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["verdict"]["consensus"] is True
    np.testing.assert_allclose(rep["social_power"], [2 / 7, 3 / 7, 2 / 7], atol=1e-12)
    np.testing.assert_allclose(rep["final_opinions"], 4 / 7, atol=1e-12)
    assert capsys.readouterr().out == ""


def test_analyze_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["analyze", "--input", net("fj_stubborn.json"), "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_fj_identity_lambda_reaches_stubborn_opinion(tmp_path, capsys):
    doc = json.loads((NETWORKS / "fj_stubborn.json").read_text())
    doc["lambda"] = [1, 1, 1, 1]
    src = tmp_path / "fjW.json"
    src.write_text(json.dumps(doc))
    out = tmp_path / "traj.csv"
    code = run(["simulate", "--model", "fj", "--input", str(src), "--steps", "200", "--output", str(out)])
    assert code == 0
    _, states = load_trajectory(out.read_text())
    np.testing.assert_allclose(states[-1], 0.6, atol=1e-6)
    assert "stop reason: converged" in capsys.readouterr().err


def test_simulate_periodic_orbit_to_stdout(capsys):
    assert run(["simulate", "--input", net("twocycle.json"), "--steps", "10"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("t,agent_1_topic_1,agent_2_topic_1\n")
    assert len(captured.out.splitlines()) == 12
    assert "periodic-orbit-suspected" in captured.err


def test_simulate_continuous_needs_horizon(capsys):
    assert run(["simulate", "--input", net("two_closed.json")]) == 2
    assert "--horizon" in capsys.readouterr().err
    assert run(["simulate", "--input", net("two_closed.json"), "--horizon", "1", "--dt", "0.5"]) == 0
    assert run(["simulate", "--input", net("ex1.json"), "--horizon", "1"]) == 2


def test_centrality_pagerank_two_cycle(capsys):
    assert run(["centrality", "--method", "pagerank", "--damping", "0.15", "--input", net("twocycle.json")]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["method"] == "pagerank"
    np.testing.assert_allclose(res["vector"], [0.5, 0.5], atol=1e-12)


def test_centrality_influence(capsys):
    assert run(["centrality", "--method", "influence", "--input", net("fj_stubborn.json")]) == 0
    c = json.loads(capsys.readouterr().out)["vector"]
    assert abs(sum(c) - 1) < 1e-12
    assert run(["centrality", "--method", "influence", "--alpha", "0.5", "--input", net("ex1.json"),
                "--seed-note", "run-7"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["parameters"] == {"alpha": 0.5} and res["note"] == "run-7"
    assert run(["centrality", "--method", "influence", "--input", net("ex1.json")]) == 2


def test_refusal_exit_code_cites_reason(capsys):
    assert run(["centrality", "--input", net("twocycle.json")]) == 3
    assert "closed-component-periodic:{1,2}" in capsys.readouterr().err
    assert run(["centrality", "--input", net("two_closed.json")]) == 3


def test_predict_has_no_derived_quantities(capsys):
    assert run(["predict", "--input", net("ex1.json")]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"]["consensus"] and "social_power" not in rep


def test_containment(capsys):
    assert run(["containment", "--input", net("leaders.json")]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "certified"
    np.testing.assert_allclose(np.sum(rep["weights"], axis=1), 1, atol=1e-12)
    assert run(["containment", "--input", net("ex1.json")]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["analyze"],
        ["analyze", "--input", "/nonexistent/file.json"],
        ["simulate", "--input", net("ex1.json"), "--steps", "-1"],
        ["centrality", "--input", net("ex1.json"), "--alpha", "0.5"],
        ["centrality", "--input", net("ex1.json"), "--method", "pagerank", "--damping", "1.5"],
        ["frobnicate", "--input", net("ex1.json")],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().out == ""


def test_no_partial_write_on_error(tmp_path):
    out = tmp_path / "keep.json"
    out.write_text("previous")
    assert run(["centrality", "--input", net("twocycle.json"), "--output", str(out)]) == 3
    assert out.read_text() == "previous"
    assert [p.name for p in tmp_path.iterdir()] == ["keep.json"]


def test_bad_document_reports_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": "1", "n": 1, "matrix": [[1.0]], "lambda": [1.5], "u": [0]}))
    assert run(["analyze", "--input", str(bad)]) == 2
    assert "lambda out of [0,1]" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opindyn", "predict", "--input", net("ex1.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["quasi_strong"] is True
