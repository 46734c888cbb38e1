import json
import subprocess
import sys

import pytest

from fourvortex import cli, export
from fourvortex.errors import DomainError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "r.json"
    assert cli.main(["solve", "--m", "2/5", "--family", "all", "--out", str(path)]) == 0
    return path


def test_parse_m_accepts_fractions():
    assert cli.parse_m("2/5") == 0.4
    assert cli.parse_m("-0.55") == -0.55


def test_solve_is_deterministic(capsys):
    a = run(capsys, "solve", "--m", "-0.3", "--family", "rhombus")
    b = run(capsys, "solve", "--m", "-0.3", "--family", "rhombus")
    assert a[0] == 0 and a[1] == b[1]
    recs = export.records_from_json(a[1])
    assert sorted(r.lambda_prime > 0 for r in recs) == [False, True]


def test_solve_verify_round_trip(capsys, solved):
    code, out, _ = run(capsys, "verify", "--in", str(solved))
    assert code == 0
    n = len(export.records_from_json(solved.read_text()))
    assert out.splitlines()[-1] == f"{n}/{n} records verified"


def test_verify_flags_corrupted_record(capsys, solved, tmp_path):
    doc = json.loads(solved.read_text())
    doc["records"] = doc["records"][:1]
    doc["records"][0]["distances"]["s13"] *= 1.001
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--in", str(bad))
    assert code == 1 and out.startswith("[FAIL]")


def test_verify_writes_trajectories(capsys, tmp_path):
    rec = tmp_path / "t.json"
    assert cli.main(["solve", "--m", "0.4", "--family", "trapezoid", "--out", str(rec)]) == 0
    code, _, _ = run(capsys, "verify", "--in", str(rec), "--trajectories", str(tmp_path / "traj"))
    assert code == 0
    assert (tmp_path / "traj" / "record_000.csv").read_text().startswith("t,x1x")


def test_census_single_value(capsys):
    code, out, _ = run(capsys, "census", "--m", "0.4")
    assert code == 0
    assert out.splitlines()[1].split(",")[-4:-1] == ["34", "34", "true"]


def test_negative_values_after_flags(capsys):
    code, out, _ = run(capsys, "census", "--m", "-1/5")
    assert code == 0 and out.splitlines()[1].startswith("-0.20000000000000001,")
    code, out, _ = run(capsys, "trace", "--family", "trapezoid", "--grid", "-0.5:0.5:3")
    assert code == 0 and out.splitlines()[1] == "-0.5,,,,"


def test_census_json(capsys):
    code, out, _ = run(capsys, "census", "--m", "-0.55", "--format", "json")
    (row,) = json.loads(out)
    assert code == 0 and row["total"] == 18 and row["match"] is True


def test_trace_and_render(capsys, solved):
    code, out, _ = run(capsys, "trace", "--family", "rhombus", "--grid", "-0.5:0.5:3")
    assert code == 0 and out.splitlines()[0] == "m,x_plus,lambda_plus,x_minus,lambda_minus"
    code, out, _ = run(capsys, "render", "--in", str(solved))
    assert code == 0 and out.startswith("<svg")


@pytest.mark.parametrize("argv", [["solve", "--m", "1.5"], ["census", "--m", "0"],
                                  ["verify", "--in", "/nonexistent.json"], ["census", "--grid", "0:1"]])
def test_errors_exit_with_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("fourvortex: error:")


def test_unknown_family_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["solve", "--m", "0.4", "--family", "hexagon"])
    assert exc.value.code == 2


def test_tolerances_must_be_positive():
    with pytest.raises(DomainError):
        cli.Tolerances(0.0, 1e-8, 1e-10, 1e-6)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fourvortex", "census", "--m", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert "degenerate-center" in out
