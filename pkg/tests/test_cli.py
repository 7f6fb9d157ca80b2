import json
from pathlib import Path

import numpy as np
import pytest

from hypermhs.abelian import JacobianPoint
from hypermhs.cli import main

CURVES = Path(__file__).resolve().parent.parent / "curves"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_periods_lemniscatic(capsys):
    code, rep = report(capsys, "periods", "--curve", str(CURVES / "lemniscatic.json"))
    assert code == 0
    Z = complex(*rep["periods"]["Z"][0][0])
    assert abs(Z - 1j) < 1e-8


def test_nodes_doubled_stable(capsys):
    _, a = report(capsys, "periods", "--curve", str(CURVES / "genus2.json"))
    _, b = report(capsys, "periods", "--curve", str(CURVES / "genus2.json"), "--nodes", "64")
    za = np.array([[complex(*z) for z in row] for row in a["periods"]["Z"]])
    zb = np.array([[complex(*z) for z in row] for row in b["periods"]["Z"]])
    assert np.max(np.abs(za - zb)) < 1e-9


def test_invalid_curve_exit_code(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"f": [["1", "0"], ["0", "0"], ["-2", "0"], ["0", "0"], ["1", "0"]]}))
    code, _, err = run(capsys, "periods", "--curve", str(f))
    assert code == 2 and "NotSquarefree" in err
    code, _, _ = run(capsys, "periods", "--curve", str(tmp_path / "missing.json"))
    assert code == 2


def test_kappa_g1(capsys):
    code, rep = report(capsys, "kappa", "--curve", str(CURVES / "lemniscatic.json"))
    assert code == 0
    k = complex(*rep["kappa"]["kappa_reduced"][0])
    assert JacobianPoint([k - (0.5 + 0.5j)], np.array([[1j]])).is_zero(1e-7)
    assert rep["theta"]["pass"]


def test_kappa_even_degree_skips_canonical(capsys, tmp_path):
    f = tmp_path / "even.json"
    f.write_text(json.dumps({"f": [["1", "0"], ["0", "0"], ["-3", "0"], ["0.5", "0"], ["0", "0"], ["0", "0"], ["1", "0"]],
                             "points": {"p": ["0.3", "0.9"], "q": ["-0.5", "0.2"]}}))
    code, out, _ = run(capsys, "kappa", "--curve", str(f), "--json")
    rep = json.loads(out)
    assert "skipped" in rep["kappa"]["canonical"]
    assert len(rep["kappa"]["kappa"]) == 2


@pytest.mark.parametrize("name", ["lemniscatic", "genus2"])
def test_verify_all_passes(capsys, name):
    code, out, _ = run(capsys, "verify", "all", "--curve", str(CURVES / f"{name}.json"))
    assert code == 0
    assert "overall: PASS" in out


def test_tampered_z_fails(capsys):
    code, rep = report(capsys, "verify", "period-relation", "--curve", str(CURVES / "genus2.json"), "--perturb-z", "0.01")
    assert code == 1
    assert rep["checks"]["period-relation"]["residuals"][0] > 1e-3


def test_verify_main_q_equals_p(capsys):
    code, rep = report(capsys, "verify", "main", "--curve", str(CURVES / "genus2.json"), "--q", "0.3,0.4")
    assert code == 0
    assert all(f["pass"] for f in rep["checks"]["main"])


def test_report_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["report", "--curve", str(CURVES / "genus2.json"), "--seed", "5", "--out", str(out)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["seed"] == 5 and "timings" not in rep


def test_timings_flag(capsys):
    code, rep = report(capsys, "periods", "--curve", str(CURVES / "lemniscatic.json"), "--timings")
    assert "timings" in rep


def test_point_override_validated(capsys):
    code, _, err = run(capsys, "periods", "--curve", str(CURVES / "lemniscatic.json"), "--p", "1,0")
    assert code == 2 and "Clearance" in err
