import json
import os
import subprocess
import sys

import pytest

from comodsys.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, EXIT_USAGE, REPORT_SCHEMA, SEED_ENV, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema"] == REPORT_SCHEMA and doc["command"] == "list"
    assert len(doc["models"]) == 6
    code, text, _ = run(capsys, "list")
    assert "so22-calogero" in text and "construction:" in text


def test_verify_text_and_json(capsys):
    code, text, _ = run(capsys, "verify", "so22-calogero", "--N", "3", "--trials", "20")
    assert code == EXIT_OK
    assert "checks, 0 failed" in text
    code, out, _ = run(capsys, "verify", "schrodinger-tau", "--trials", "20", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"] and doc["seed"] == 0
    assert doc["summary"]["flagged"] >= 1


def test_verify_quantum(capsys):
    code, out, _ = run(capsys, "verify", "q-oscillator-quantum", "--json")
    assert code == EXIT_OK and json.loads(out)["kind"] == "quantum"


def test_verify_is_deterministic_per_seed(capsys, monkeypatch):
    args = ("verify", "q-oscillator-classical", "--k", "3", "--trials", "15", "--json")
    _, a, _ = run(capsys, *args, "--seed", "5")
    _, b, _ = run(capsys, *args, "--seed", "5")
    assert a == b
    monkeypatch.setenv(SEED_ENV, "5")
    _, c, _ = run(capsys, *args)
    assert c == a
    _, d, _ = run(capsys, *args, "--seed", "6")
    assert json.loads(d)["seed"] == 6


def test_json_identical_across_processes(tmp_path):
    cmd = [sys.executable, "-m", "comodsys.cli", "verify", "schrodinger-sigma", "--trials", "10", "--json"]
    outs = []
    for hashseed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        outs.append(subprocess.run(cmd, capture_output=True, text=True, env=env, check=True).stdout)
    assert outs[0] == outs[1]


def test_integrate(capsys, tmp_path):
    stem = str(tmp_path / "orbit")
    code, out, _ = run(capsys, "integrate", "schrodinger-sigma", "--t-end", "2", "--samples", "21",
                       "--out", stem, "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["passed"] and doc["summary"]["samples"] == 21
    assert os.path.exists(stem + ".csv") and os.path.exists(stem + ".json")
    saved = json.loads(open(stem + ".json").read())
    assert saved["summary"]["max_drift"] == doc["summary"]["max_drift"]


def test_integrate_text_and_custom_start(capsys):
    code, text, _ = run(capsys, "integrate", "so22-calogero", "--t-end", "1", "--x0", "1.3,0.4,0.9,0.2,-0.3,0.1",
                        "--no-reversal")
    assert code == EXIT_OK
    assert "PASS" in text and "time-reversal" not in text


def test_integrate_drift_bound_failure(capsys):
    code, text, err = run(capsys, "integrate", "schrodinger-tau", "--t-end", "2", "--rel-tol", "1e-3",
                          "--abs-tol", "1e-3", "--drift-max", "1e-12", "--no-reversal")
    assert code == EXIT_FAIL
    assert "FAIL" in text


def test_integrate_singularity_is_an_error(capsys):
    code, _, err = run(capsys, "integrate", "so22-calogero", "--x0", "0.5,0.5001,0.9,0,0,0", "--t-end", "1")
    assert code == EXIT_ERROR
    assert "SingularityApproach" in err


@pytest.mark.parametrize("argv", [
    ("verify", "kepler"),
    ("verify", "so22-calogero", "--N", "1"),
    ("verify", "so22-calogero", "--z", "0.1"),
    ("verify", "so22-calogero", "--trials", "0"),
    ("integrate", "re-algebra"),
    ("integrate", "so22-calogero", "--x0", "1,2"),
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err.startswith("comodsys:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "so22-calogero", "--tol", "-1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main([])


def test_bad_seed_env(capsys, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "abc")
    code, _, err = run(capsys, "verify", "so22-calogero", "--trials", "5")
    assert code == EXIT_USAGE and SEED_ENV in err


def test_export_and_verify_file(capsys, tmp_path):
    path = str(tmp_path / "model.json")
    code, out, _ = run(capsys, "export", "q-oscillator-classical", "--k", "3", "--out", path)
    assert code == EXIT_OK and path in out
    code, out, _ = run(capsys, "verify", path, "--trials", "15", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["model"] == "q-oscillator-classical"
    code, _, err = run(capsys, "verify", path, "--k", "2")
    assert code == EXIT_USAGE


def test_export_to_stdout(capsys):
    code, out, _ = run(capsys, "export", "re-algebra")
    assert code == EXIT_OK and json.loads(out)["kind"] == "quantum"


def test_verify_failure_exit_code(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "schrodinger-sigma")
    doc = json.loads(out)
    doc["derived"]["realized_hamiltonian"] = "q1"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify", str(path), "--trials", "10")
    assert code == EXIT_FAIL
    assert "check failed: declared hamiltonian" in err


def test_malformed_model_file(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{}")
    code, _, err = run(capsys, "verify", str(path))
    assert code == EXIT_USAGE
