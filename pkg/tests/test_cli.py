import json
import subprocess
import sys

import pytest

from bvinf.cli import main
from bvinf.config import data_path


def cfg(name):
    return str(data_path(name))


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_check_bv_exit_codes(capsys):
    code, out = run(capsys, "check-bv", cfg("a1.toml"))
    assert code == 0
    assert json.loads(out.out)["ok"] is True
    code, out = run(capsys, "check-bv", cfg("a1_mutated.toml"), "--format", "text")
    assert code == 1
    assert "FAIL" in out.out and "koszul_n3" in out.out


def test_missing_and_malformed_config(capsys, tmp_path):
    code, out = run(capsys, "check-bv", str(tmp_path / "nope.toml"))
    assert code == 2 and "config not found" in out.err
    bad = tmp_path / "bad.toml"
    bad.write_text("name = [\n")
    assert run(capsys, "check-bv", str(bad))[0] == 2
    junk = tmp_path / "junk.toml"
    junk.write_text('name = "j"\nm = 1\ngenerators = [{name = "t", degree = 0}]\n'
                    'delta = ["d/d<q>"]\n')
    assert run(capsys, "check-bv", str(junk))[0] == 2


def test_solve_mc_a2(capsys):
    code, out = run(capsys, "solve-mc", cfg("a2.toml"))
    assert code == 0
    doc = json.loads(out.out)
    assert doc["data"]["mc_element"]["gamma"] == "u1*1 + u2*t"
    assert set(doc["data"]["mc_element"]["corrections"].values()) == {"0"}


def test_twist_and_morphism(capsys):
    code, out = run(capsys, "twist", cfg("a1_to_b.toml"), "--gamma", "u*t", "--arity-max", "2")
    assert code == 0
    assert json.loads(out.out)["data"]["gamma"] == "u*t"
    code, out = run(capsys, "twist", cfg("a1.toml"), "--gamma", "u*dt")
    assert code == 2 and "degree 0" in out.err
    code, _ = run(capsys, "check-morphism", cfg("a1_to_b.toml"), "--arity-max", "3",
                  "--tuple-cutoff", "6")
    assert code == 0


def test_pairing_with_morphism(capsys):
    code, _ = run(capsys, "pairing", cfg("a1_pairing.toml"), cfg("b_pairing.toml"),
                  "--morphism", cfg("a1_to_b.toml"))
    assert code == 0
    code, out = run(capsys, "pairing", cfg("a1_pairing.toml"), cfg("b_pairing.toml"))
    assert code == 2


def test_report_file_and_formats(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out = run(capsys, "check-bv", cfg("b.toml"), "--report", str(path))
    assert code == 0
    assert path.read_text() == out.out
    code, out = run(capsys, "check-bv", cfg("b.toml"), "--format", "text")
    assert code == 0 and "PASS" in out.out


def test_demo_report(capsys, tmp_path):
    path = tmp_path / "demo.json"
    code, out = run(capsys, "demo-a1", "--report", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["data"]["(t^2,t^2)"] == "(-1)*h^2*1"
    assert all(c["status"] == "pass" for c in doc["checks"])


@pytest.mark.parametrize("argv", [["solve-mc", "a2.toml"], ["check-bv", "a1_mutated.toml"]])
def test_output_is_deterministic(argv):
    cmd = [sys.executable, "-m", "bvinf.cli", argv[0], cfg(argv[1])]
    a = subprocess.run(cmd, capture_output=True, env={"PYTHONHASHSEED": "1"}, check=False)
    b = subprocess.run(cmd, capture_output=True, env={"PYTHONHASHSEED": "2"}, check=False)
    assert a.returncode == b.returncode
    assert a.stdout == b.stdout and a.stdout
