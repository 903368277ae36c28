import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from entwit import states
from entwit.cli import main
from entwit.hilbert import DENSE_CAP_ENV


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_evaluate_w3(capsys):
    out = run_json(capsys, "evaluate", "--family", "w-noise", "--n", "3", "--visibility", "1.0",
                   "--criterion", "theorem1")
    (rep,) = out["reports"]
    assert rep["verdict"] == "DETECTED"
    assert rep["margin"] == pytest.approx(1.0, abs=1e-12)


def test_evaluate_ghz_boundary(capsys):
    out = run_json(capsys, "evaluate", "--family", "ghz-noise", "--n", "3", "--d", "2",
                   "--visibility", "0.2", "--criterion", "theorem2")
    assert out["reports"][0]["verdict"] == "BOUNDARY"


def test_evaluate_input_file(tmp_path, capsys):
    path = tmp_path / "maximally_mixed.json"
    states.save_json(states.maximally_mixed([2, 2, 2]), path)
    out = run_json(capsys, "evaluate", "--input", str(path), "--criterion", "theorem3")
    assert out["reports"][0]["verdict"] == "NOT_DETECTED"


def test_evaluate_several_criteria_dense(capsys):
    out = run_json(capsys, "evaluate", "--family", "ghz-w-noise", "--n", "10", "--alpha", "0",
                   "--beta", "0.2", "--criterion", "theorem1,huber3", "--dense")
    assert [r["verdict"] for r in out["reports"]] == ["DETECTED", "NOT_DETECTED"]


def test_evaluate_rejects_non_hermitian(tmp_path, capsys):
    m = np.eye(4) / 4
    m[0, 1] = 0.1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [2, 2], "re": m.tolist(), "im": np.zeros((4, 4)).tolist()}))
    assert main(["evaluate", "--input", str(path), "--criterion", "theorem3"]) == 2
    assert "non-Hermitian" in capsys.readouterr().err
    assert main(["evaluate", "--input", str(path), "--criterion", "theorem3", "--force"]) == 0


@pytest.mark.parametrize("payload,needle", [
    ("{not json", "not valid JSON"),
    (json.dumps({"dims": [2, 2], "re": [[1]], "im": [[0]]}), "dims mismatch"),
    (json.dumps({"dims": [2, 2], "re": np.eye(4).tolist(), "im": np.zeros((4, 4)).tolist()}), "trace defect"),
])
def test_evaluate_invalid_inputs(tmp_path, capsys, payload, needle):
    path = tmp_path / "in.json"
    path.write_text(payload)
    assert main(["evaluate", "--input", str(path)]) == 2
    assert needle in capsys.readouterr().err


def test_evaluate_needs_one_source(capsys):
    assert main(["evaluate", "--criterion", "theorem1"]) == 2


def test_capacity_exit(tmp_path, monkeypatch, capsys):
    path = tmp_path / "rho.json"
    states.save_json(states.maximally_mixed([2, 2, 2, 2]), path)
    monkeypatch.setenv(DENSE_CAP_ENV, "8")
    assert main(["evaluate", "--input", str(path)]) == 3
    assert main(["evaluate", "--family", "w-noise", "--n", "4", "--visibility", "1", "--dense"]) == 3


@pytest.mark.parametrize("argv,key,expected", [
    (["--family", "w-noise", "--n", "6", "--criterion", "theorem1"], "noise_weight", "32/59"),
    (["--family", "w-noise", "--n", "6", "--criterion", "huber3"], "noise_weight", "4/13"),
    (["--family", "qudit-ghz-noise", "--n", "4", "--d", "3", "--criterion", "theorem2"], "visibility", "1/28"),
])
def test_threshold_closed_forms(capsys, argv, key, expected):
    out = run_json(capsys, "threshold", *argv)
    assert out["method"] == "CLOSED_FORM"
    assert out["exact"][key] == expected


def test_threshold_force_bisect(capsys):
    out = run_json(capsys, "threshold", "--family", "w-noise", "--n", "6", "--criterion", "theorem1",
                   "--force-bisect")
    assert abs(out["difference"]) < 1e-9
    assert out["bisection"]["threshold"]["noise_weight"] == pytest.approx(32 / 59, abs=1e-9)


def test_threshold_bracket_failure(capsys):
    code = main(["threshold", "--family", "w-noise", "--n", "4", "--criterion", "theorem1",
                 "--force-bisect", "--bracket", "0.9,1.0"])
    assert code == 4


def test_threshold_bisection_only(capsys):
    out = run_json(capsys, "threshold", "--family", "ghz-w-noise", "--n", "5", "--alpha", "0.2",
                   "--criterion", "theorem1")
    assert out["method"] == "BISECTION" and out["parameter"] == "beta"


def test_scan_small(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    assert main(["scan", "--n", "3", "--steps", "10", "--output", str(path)]) == 0
    rows = list(csv.reader(path.open()))
    assert len(rows) == 1 + 55  # simplex-valid cells of the 10 x 10 grid
    path2 = tmp_path / "scan2.csv"
    main(["scan", "--n", "3", "--steps", "10", "--output", str(path2)])
    assert path.read_bytes() == path2.read_bytes()


def test_scan_n10_intercepts(tmp_path):
    path = tmp_path / "fig.csv"
    assert main(["scan", "--n", "10", "--steps", "200", "--criteria", "theorem1,huber3",
                 "--output", str(path)]) == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 200 * 201 // 2
    col = [r for r in rows if float(r["alpha"]) == 0.0]
    step = 1 / 199
    for c, beta in (("theorem1", 170 / 1194), ("huber_iii", 800 / 1824)):
        first = min(float(r["beta"]) for r in col if r[f"{c}_verdict"] == "DETECTED")
        assert abs(first - beta) <= step


@pytest.mark.parametrize("criterion,n,count", [("theorem1", 3, 19), ("theorem2", 5, 40), ("theorem3", 3, 16)])
def test_plan(capsys, criterion, n, count):
    out = run_json(capsys, "plan", "--criterion", criterion, "--n", str(n))
    assert len(out["settings"]) == count == out["counts"]["total"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "entwit", "plan", "--criterion", "theorem3", "--n", "3"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["counts"]["total"] == 16
