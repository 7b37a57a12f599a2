import json
import math
import subprocess
import sys

import numpy as np
import pytest

from analog_ecc import AnalogCode, construct_code
from analog_ecc.channel import read_csv
from analog_ecc.cli import main

T4_GAMMA2 = 87.8061197520669


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_and_reload(tmp_path, capsys):
    path = tmp_path / "t4.json"
    code, out, _ = run(capsys, "construct", "--t", "4", "--out", str(path))
    assert code == 0 and "n=33" in out
    loaded = AnalogCode.load(path)
    np.testing.assert_array_equal(loaded.H, construct_code(4).H)


def test_construct_by_length_matches_rings(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "construct", "--n", "33", "--out", str(a))[0] == 0
    assert run(capsys, "construct", "--t", "4", "--out", str(b))[0] == 0
    assert json.loads(a.read_text())["H"] == json.loads(b.read_text())["H"]


def test_construct_rejects_small(tmp_path, capsys):
    code, _, err = run(capsys, "construct", "--n", "5", "--out", str(tmp_path / "x.json"))
    assert code == 1 and "n >= 20" in err
    assert run(capsys, "construct", "--t", "3", "--out", str(tmp_path / "x.json"))[0] == 1


def test_usage_errors_exit_two(tmp_path, capsys):
    path = tmp_path / "t4.json"
    construct_code(4).save(path)
    for argv in (["eval", "--code", str(path), "--m", "0"],
                 ["simulate", "--code", str(path), "--trials", "0"],
                 ["nonsense"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    capsys.readouterr()


def test_missing_code_file(tmp_path, capsys):
    code, _, err = run(capsys, "eval", "--code", str(tmp_path / "none.json"), "--m", "2")
    assert code == 1 and "cannot read" in err


def test_budget_exceeded_exit_one(tmp_path, capsys):
    path = tmp_path / "t4.json"
    construct_code(4).save(path)
    code, _, err = run(capsys, "eval", "--code", str(path), "--m", "2", "--budget", "10")
    assert code == 1 and "2112" in err


def test_sample_eval_json(tmp_path, capsys):
    path = tmp_path / "t4.json"
    construct_code(4).save(path)
    code, out, _ = run(capsys, "eval", "--code", str(path), "--m", "2", "--mode", "sample",
                       "--trials", "20000", "--seed", "1")
    assert code == 0
    data = json.loads(out)
    assert data["method"] == "Sampled"
    assert 4 <= data["gamma"] <= T4_GAMMA2 + 1e-6
    assert data["bounds"]["construction_gamma_bound"] == pytest.approx(66 / math.sin(math.pi / 8))


def test_simulate_appends_csv(tmp_path, capsys):
    path = tmp_path / "t4.json"
    csv_path = tmp_path / "runs.csv"
    construct_code(4).save(path)
    for seed in ("1", "2"):
        code, out, _ = run(capsys, "simulate", "--code", str(path), "--trials", "2000",
                           "--seed", seed, "--out", str(csv_path))
        assert code == 0 and "violation_d1=0" in out
    rows = read_csv(csv_path)
    assert len(rows) == 2
    assert all(r["exact"] == "2000" for r in rows)


def test_simulate_uniform_and_none(tmp_path, capsys):
    path = tmp_path / "t4.json"
    construct_code(4).save(path)
    assert run(capsys, "simulate", "--code", str(path), "--trials", "1000",
               "--magnitude", "uniform:0:1xDelta")[0] == 0
    assert run(capsys, "simulate", "--code", str(path), "--trials", "1000",
               "--magnitude", "none")[0] == 0
    assert run(capsys, "simulate", "--code", str(path), "--trials", "100",
               "--magnitude", "bogus")[0] == 1


def test_bound_command(capsys):
    code, out, _ = run(capsys, "bound", "--n", "33")
    data = json.loads(out)
    assert data["Delta"] == pytest.approx(198.902, abs=1e-3)
    code, out, _ = run(capsys, "bound", "--n", "3", "--rho", str(1 / math.sqrt(2)))
    assert json.loads(out)["theta"] == pytest.approx(7.2426, abs=1e-4)
    assert run(capsys, "bound", "--n", "10")[0] == 1


def test_table_command(capsys):
    code, out, _ = run(capsys, "table", "--n-list", "33", "1000000")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",")[:3] == ["n", "r", "t"]
    first = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert float(first["gamma2_bound"]) == pytest.approx(172.46631136368168, rel=1e-12)
    assert float(first["ratio"]) == pytest.approx(0.90977, abs=1e-5)
    assert run(capsys, "table", "--n-list", "19")[0] == 1


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "analog_ecc", "bound", "--n", "33"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["n"] == 33


@pytest.mark.parametrize("t,mode", [(4, "exact"), (5, "sample"), (6, "sample")])
def test_pipeline(tmp_path, capsys, t, mode):
    path = tmp_path / f"t{t}.json"
    assert run(capsys, "construct", "--t", str(t), "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "eval", "--code", str(path), "--m", "2", "--mode", mode,
                       "--trials", "20000")
    assert code == 0
    data = json.loads(out)
    n = 2 * t * t + 1
    assert 4 <= data["gamma"] <= 2 * n / math.sin(math.pi / (2 * t)) + 1e-6
    if mode == "exact":
        assert data["gamma"] == pytest.approx(T4_GAMMA2, abs=1e-6)
    code, out, _ = run(capsys, "simulate", "--code", str(path), "--trials", "4000",
                       "--out", str(tmp_path / "p.csv"))
    assert code == 0
    assert read_csv(tmp_path / "p.csv")[0]["exact"] == "4000"
