import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from warpgeo.cli import main

DESC = Path(__file__).resolve().parents[1] / "descriptors"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_curvature_warped_csc(capsys):
    code, out, _ = run(["curvature", "--config", str(DESC / "cosh_sphere.json")], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["csc_check"]["pass"]


def test_curvature_hessian(capsys):
    code, out, _ = run(["curvature", "--config", str(DESC / "hessian_user.json")], capsys)
    assert code == 0
    assert json.loads(out)["max_fd_delta"] < 1e-4


def test_geodesic_csv_footer(capsys):
    code, out, _ = run(["geodesic", "--config", str(DESC / "geodesic_arctan.json")], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["t", "r", "y0"]
    assert rows[-1][0] == "max"
    assert all(float(x) < 1e-7 for x in rows[-1][4:7])


def test_geodesic_truncated(capsys):
    code, out, _ = run(["geodesic", "--config", str(DESC / "geodesic_truncated.json")], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[-2][-1] == "truncated"
    assert float(rows[-2][0]) < 2.0
    assert rows[-1][-1] == "truncated"


def test_geodesic_pair_json(capsys):
    code, out, _ = run(["geodesic", "--config", str(DESC / "geodesic_pair.json"), "--format", "json"], capsys)
    assert code == 0
    json.loads(out)


@pytest.mark.parametrize(
    "name, tag",
    [
        ("flat_cone.json", "ConeAtZero"),
        ("cosh_sphere.json", "Suspension"),
        ("profile_cone.json", "ConeAtZero"),
        ("profile_table.json", "Unclassified"),
        ("pair_quadratic_v1.json", "ConeAtZero"),
    ],
)
def test_classify(capsys, name, tag):
    code, out, _ = run(["classify", "--config", str(DESC / name)], capsys)
    assert code == 0
    assert json.loads(out)["class"] == tag


def test_classify_ebin(capsys):
    code, out, _ = run(["classify", "--config", str(DESC / "ebin_p2.json")], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["label"] == "Mfinite_plus_with_ginf"


@pytest.mark.parametrize(
    "argv, code",
    [
        (["classify", "--config", "/nonexistent.json"], 2),
        (["curvature", "--config", str(DESC / "ebin_p1.json")], 2),
        (["curvature", "--config", str(DESC / "invalid_regime.json")], 3),
        (["classify", "--config", str(DESC / "sine_hyperbolic.json")], 3),
        (["bogus"], 2),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(argv, capsys)[0] == code


def test_outputs_are_deterministic(capsys, tmp_path):
    for name, cmd in (("geodesic_pair.json", "geodesic"), ("pair_maschke_inv2.json", "curvature"), ("cosh_sphere.json", "classify")):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([cmd, "--config", str(DESC / name), "--out", str(a)]) == 0
        assert main([cmd, "--config", str(DESC / name), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_verify_subset_and_tight_tolerance(capsys):
    code, out, _ = run(["verify", "--only", "geodesics", "--format", "csv"], capsys)
    assert code == 0
    assert out.startswith("name,module,criterion,pass,residual,tol")
    code, _, _ = run(["verify", "--only", "geodesics.oracle_gap", "--tol", "1e-14"], capsys)
    assert code == 1


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "warpgeo.cli", "classify", "--config", str(DESC / "ebin_p1.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stderr == ""
