import csv
import json
import math
import os
import subprocess
import sys

import pytest

from branchsurf.cli import main, parse_angle


@pytest.mark.parametrize("text, want", [("pi", math.pi), ("3pi/4", 3 * math.pi / 4), ("3*pi/4", 3 * math.pi / 4),
                                        ("-pi/2", -math.pi / 2), ("2.5", 2.5), ("0.5pi", math.pi / 2)])
def test_parse_angle(text, want):
    assert parse_angle(text) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("text", ["tau", "pi/0", "", "3pi/"])
def test_parse_angle_rejects(text):
    import argparse
    with pytest.raises(argparse.ArgumentTypeError):
        parse_angle(text)


def test_build_outputs(tmp_path):
    out = tmp_path / "b"
    assert main(["build", "--radius", "2", "--delta", "0.1", "--threads", "1", "--out", str(out)]) == 0
    obj = (out / "surface.obj").read_text().splitlines()
    nv = sum(1 for x in obj if x.startswith("v "))
    with open(out / "scalars.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["vertex", "phi", "kappa_max", "sector", "generation"]
    assert len(rows) - 1 == nv
    rep = json.loads((out / "report.json").read_text())
    assert rep["n_branches"] == len(json.loads((out / "branches.json").read_text())["branches"])
    assert rep["complex_checks"]["ok"] and rep["embedding_checks"]["ok"]
    assert "threads" not in rep["config"] and "out" not in rep["config"]


def test_build_without_branches(tmp_path):
    out = tmp_path / "b1"
    assert main(["build", "--radius", "1", "--delta", "0.1", "--out", str(out)]) == 0
    assert json.loads((out / "branches.json").read_text())["branches"] == []


def test_amsler_and_bobbin(tmp_path, capsys):
    assert main(["amsler", "--phi0", "pi/100", "--z-max", "8", "--out", str(tmp_path / "p.csv")]) == 0
    assert "z* = 6.754" in capsys.readouterr().out
    assert main(["bobbin", "--kappa", "3", "--out", str(tmp_path / "b.csv")]) == 0
    assert "1.8184464" in capsys.readouterr().out


def test_amsler_not_reached(tmp_path, capsys):
    assert main(["amsler", "--phi0", "pi/100", "--z-max", "2", "--out", str(tmp_path / "p.csv")]) == 0
    assert "not reached" in capsys.readouterr().out


def test_verify_passes(tmp_path, capsys):
    rep = tmp_path / "v.json"
    assert main(["verify", "--radius", "2", "--report", str(rep)]) == 0
    checks = json.loads(rep.read_text())["checks"]
    assert all(c["passed"] for c in checks)
    assert "FAIL" not in capsys.readouterr().out


def test_energy_scan_small(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["energy-scan", "--r-list", "1.5,2", "--delta", "0.1", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["R"]) for r in rows] == [1.5, 2.0]
    assert all(float(r["e_inf_branched"]) >= 1 for r in rows)


def test_frontier_small_warns(tmp_path, capsys):
    out = tmp_path / "f"
    assert main(["frontier", "--radius", "2", "--delta", "0.1", "--out", str(out)]) == 0
    assert "TOO_FEW_BRANCHES" in capsys.readouterr().err
    summary = json.loads((out / "summary.json").read_text())
    assert summary["f2_coefficient"] == pytest.approx(0.7291, abs=1e-3)
    assert (out / "frontier.csv").exists() and (out / "curves.csv").exists()


@pytest.mark.parametrize("argv", [
    ["build", "--radius", "-1"],
    ["build", "--phi-star", "tau"],
    ["build", "--sectors", "5"],
    ["build", "--phi-star", "pi/4"],
    ["nonsense"],
])
def test_config_errors(argv, tmp_path):
    assert main(argv + (["--out", str(tmp_path / "x")] if argv[0] == "build" else [])) == 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["bobbin", "--out", str(blocker / "sub" / "b.csv")]) == 3


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "branchsurf", "amsler", "--z-max", "3", "--out",
                        os.path.join(tmp_path, "a.csv")], capture_output=True, text=True)
    assert r.returncode == 0
    assert "not reached" in r.stdout
