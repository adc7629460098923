import json
import math
import subprocess
import sys

import pytest

from solenoidal_hup.cli import main, parse_config
from solenoidal_hup.config import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--N", "3")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["solenoidal"] == 6.25
    assert row["curl_free"] == 6.25
    assert row["unconstrained"] == 2.25


def test_minimize(capsys):
    code, out, _ = run(capsys, "minimize", "--N", "4", "--nu", "1", "--K-max", "30", "--tol", "1e-6")
    assert code == 0
    rep = json.loads(out)
    assert rep["converged"]
    assert rep["rows"][-1]["quotient"] == pytest.approx(4 + 2 * math.sqrt(3), rel=1e-6)
    assert all(r["gap"] >= 0 for r in rep["rows"])


@pytest.mark.parametrize("argv", [
    ["constants", "--N", "2"],
    ["frobnicate"],
    ["minimize", "--K-max", "80"],
    ["minimize", "--tol", "-1"],
    ["constants", "--format", "xml"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err


def test_parse_defaults():
    cfg = parse_config(["sweep"])
    assert cfg.K_max == 25 and cfg.tol == 1e-6
    assert parse_config(["accept", "--seed", "0x10"]).seed == 16
    with pytest.raises(UsageError):
        parse_config(["accept", "--seed", "-3"])


def test_verification_failure_exit(capsys):
    code, out, _ = run(capsys, "oracle3d", "--grid-n", "16")
    assert code == 2
    assert json.loads(out)["passed"] is False


def test_oracle3d_passes(capsys):
    code, out, _ = run(capsys, "oracle3d")
    assert code == 0
    assert json.loads(out)["rows"][0]["quotient"] == pytest.approx(6.25, abs=1e-3)


def test_verify_extremal(capsys):
    code, out, _ = run(capsys, "verify-extremal", "--N", "3")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["sphere_check"]) == 3


@pytest.mark.parametrize("argv", [
    ["minimize", "--N", "3", "--K-max", "12"],
    ["identity-check", "--seed", "7"],
])
def test_json_reproducible(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_identity_check(capsys):
    code, out, _ = run(capsys, "identity-check", "--seed", "7")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 5 and all(r["profiles"] == 20 for r in rows)


def test_csv_and_text(capsys):
    code, out, _ = run(capsys, "sweep", "--format", "csv", "--K-max", "20")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split(",")[:3] == ["n", "nu", "k"]
    assert len(lines) == 13
    code, out, _ = run(capsys, "constants", "--N", "5", "--format", "text")
    assert code == 0
    assert out.startswith("constants: PASSED")


def test_sweep_passes(capsys):
    code, out, _ = run(capsys, "sweep")
    assert code == 0
    assert all(0 <= r["gap"] <= 1e-6 for r in json.loads(out)["rows"])


def test_out_file(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "constants", "--N", "4", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["rows"][0]["n"] == 4


def test_accept(capsys):
    code, out, err = run(capsys, "accept", "--seed", "7")
    assert code == 0
    rep = json.loads(out)
    assert [r["id"] for r in rep["rows"]] == list(range(1, 11))
    assert all(r["passed"] for r in rep["rows"])
    assert err.count("[PASS]") == 10


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "solenoidal_hup", "constants", "--N", "6"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["n"] == 6
