import io
import json

import pytest

from veerct.cli import Plan, UsageError, execute, main, parse_args


def run(argv, capsys=None):
    out, err = io.StringIO(), io.StringIO()
    code = execute(parse_args(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_build_plan():
    p = parse_args(["build", "--word", "RL", "--out", "m.json"])
    assert p == Plan("Build", word="RL", matrix=((2, 1), (1, 1)), out="m.json")


def test_dict_check_plan():
    p = parse_args(["dict-check", "--word", "RL", "--quadrants", "0..2", "--depth", "6"])
    assert p.command == "DictCheck" and p.quadrants == (0, 2) and p.depth == 6


def test_matrix_and_budget():
    p = parse_args(["ct", "--matrix", "3,2,1,1", "--budget", "5/2", "--quadrants", "-1..1"])
    assert p.matrix == ((3, 2), (1, 1))
    assert p.budget.numerator == 5 and p.budget.denominator == 2
    assert p.quadrants == (-1, 1)


@pytest.mark.parametrize("argv", [
    ["build", "--word", "R"],                       # trace 2
    ["build", "--word", "RXL"],
    ["build", "--matrix", "2,1,1,2"],               # determinant 3
    ["build"],
    ["build", "--word", "RL", "--bogus"],
    ["frobnicate", "--word", "RL"],
    ["ct", "--word", "RL", "--depth", "0"],
    ["ct", "--word", "RL", "--budget", "-1/2"],
    ["ct", "--word", "RL", "--quadrants", "2..0"],
    ["ct", "--word", "RL", "--quadrants", "0-2"],
    ["build", "--word", "RL", "--matrix", "2,1,1,1"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)


def test_main_usage_status(capsys):
    assert main(["build", "--word", "R"]) == 64
    assert "hyperbolic" in capsys.readouterr().err


def test_build_rl(tmp_path):
    path = tmp_path / "m.json"
    code, _, _ = run(["build", "--word", "RL", "--out", str(path)])
    assert code == 0
    data = json.loads(path.read_text())
    assert data["tetrahedra"] == 2 and data["events"] == 2
    assert data["checks"] == {"taut": "Ok", "veering": "Ok"}


def test_outputs_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["export", "--word", "RLL", "--out", str(a)])
    run(["export", "--word", "RLL", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_export_roundtrips_surface(tmp_path):
    path = tmp_path / "bundle.json"
    run(["export", "--word", "RL", "--out", str(path)])
    surf = tmp_path / "surf.json"
    surf.write_text(json.dumps(json.loads(path.read_text())["surface"]))
    code, out, _ = run(["validate", "--surface", str(surf)])
    assert code == 0 and json.loads(out)["ok"] is True


def test_validate(capsys):
    code, out, _ = run(["validate", "--word", "RRL"])
    assert code == 0
    checks = json.loads(out)["checks"]
    assert checks["cellulation"] == "Ok"
    assert checks["cusp 0"].startswith("Ok")


def test_link_with_svg(tmp_path):
    svg = tmp_path / "l.svg"
    code, out, _ = run(["link", "--word", "RLLR", "--quadrants", "0..2", "--depth", "4", "--svg", str(svg)])
    assert code == 0
    assert svg.read_text().startswith("<svg")
    assert json.loads(out)["window"]["triangles"]


def test_ct_and_cap(monkeypatch, tmp_path):
    code, out, _ = run(["ct", "--word", "RL", "--quadrants", "0..1", "--depth", "4"])
    assert code == 0 and len(json.loads(out)["window"]["cells"]) == 8
    monkeypatch.setenv("VEER_CELL_CAP", "5")
    code, _, err = run(["ct", "--word", "RL", "--depth", "6"])
    assert code == 2 and json.loads(err)["error"] == "BudgetExhausted"


def test_dict_check(tmp_path):
    svg = tmp_path / "o.svg"
    code, out, _ = run(["dict-check", "--word", "RL", "--quadrants", "0..2", "--depth", "6", "--svg", str(svg)])
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert rep["dictionary"]["counts"]["cells"] == 18
    assert "<polygon" in svg.read_text()
