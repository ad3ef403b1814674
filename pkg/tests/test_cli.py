import json
import subprocess
import sys
from pathlib import Path

import pytest

from quasistates.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def rows(text):
    return [line.split(",") for line in text.strip().splitlines()]


def test_eval_square_on_interval(capsys):
    code, out, _ = run(capsys, "eval", "--space", DATA / "cp1.json", "--function", DATA / "p_squared.json")
    assert code == 0
    table = dict(rows(out))
    assert float(table["zeta"]) == pytest.approx(1 / 12, abs=1e-15)
    assert float(table["calabi"]) == pytest.approx(1 / 3, abs=1e-15)
    assert float(table["sigma"]) == pytest.approx(1 / 4, abs=1e-15)


def test_eval_product_on_triangle(capsys):
    code, out, _ = run(capsys, "eval", "--space", DATA / "cp2.json", "--function", DATA / "p1p2.json")
    assert code == 0
    assert float(dict(rows(out))["zeta"]) == pytest.approx(1 / 12 - 1 / 9, abs=1e-15)


def test_median_of_star(capsys):
    code, out, _ = run(capsys, "median", "--tree", DATA / "star.json")
    assert code == 0 and out.strip() == "median,vertex:c,unique:true"


@pytest.mark.parametrize("extra, expected", [
    (["--point", "0.5,0.2"], "(1 2)"),
    (["--point", "0.3333333333333333,0.3333333333333333"], "none"),
    (["--balls", DATA / "balls.json"], "(1 2)"),
])
def test_displace(capsys, extra, expected):
    code, out, _ = run(capsys, "displace", "--space", DATA / "cp2.json", *extra)
    assert code == 0 and rows(out)[0] == ["certificate", expected]


def test_independence_rank(capsys):
    code, out, _ = run(capsys, "independence", "--n", 1, "--deltas", "1,0.9")
    assert code == 0
    assert dict((r[0], r[1]) for r in rows(out) if r[0] != "row")["rank"] == "2"


def test_mu_delta_paths_agree(capsys):
    code, out, _ = run(capsys, "mu-delta", "--n", 1, "--deltas", "1,0.9,0.8",
                       "--function", DATA / "bump_profile.json")
    assert code == 0
    assert all(abs(float(r[3])) <= 1e-9 for r in rows(out)[1:])


def test_mu_delta_paper_convention_fails_check(capsys):
    code, _, err = run(capsys, "mu-delta", "--n", 1, "--deltas", "1,0.94",
                       "--function", DATA / "bump_profile.json", "--convention", "paper")
    assert code == 2 and "two-path" in err


@pytest.mark.parametrize("argv", [
    ["eval", "--space", DATA / "cp1.json", "--function", DATA / "broken.json"],
    ["mu-delta", "--n", 1, "--deltas", "0.4", "--function", DATA / "bump_profile.json"],
    ["eval", "--space", DATA / "cp1.json", "--function", DATA / "missing.json"],
    ["mu-delta", "--n", 1, "--function", DATA / "bump_profile.json"],
])
def test_input_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err.startswith("error:")


def test_broken_json_names_line_and_column(capsys):
    _, _, err = run(capsys, "eval", "--space", DATA / "cp1.json", "--function", DATA / "broken.json")
    assert "line 2, column 1" in err


def test_decompose_large_gamma_is_a_precondition_error(capsys):
    code, _, err = run(capsys, "decompose", "--space", DATA / "cp1.json",
                       "--function", DATA / "p_squared.json", "--gamma", 5.0)
    assert code == 1 and "gamma" in err


def test_decompose_output_is_deterministic(capsys, tmp_path):
    argv = ["decompose", "--space", DATA / "cp1.json", "--function", DATA / "p_squared.json",
            "--gamma", 0.1, "--out", tmp_path / "a.csv"]
    assert run(capsys, *argv)[0] == 0
    argv[-1] = tmp_path / "b.csv"
    assert run(capsys, *argv)[0] == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    report = json.loads((tmp_path / "a.json").read_text())
    assert report["gamma"] == 0.1 and report["additivity_error"] <= 1e-12


def test_gamma_sweep_table(capsys):
    code, out, _ = run(capsys, "decompose", "--space", DATA / "cp1.json",
                       "--function", DATA / "p_squared.json", "--gamma-sweep")
    assert code == 0
    table = rows(out)
    assert table[0][:2] == ["gamma", "epsilon_achieved"]
    errors = [float(r[4]) for r in table[1:]]
    assert errors == sorted(errors, reverse=True)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quasistates", "median", "--tree", str(DATA / "star.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "vertex:c" in proc.stdout
