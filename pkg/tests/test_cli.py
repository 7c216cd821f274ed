import json
import subprocess
import sys

import pytest

from frobwitt.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def js(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_zeta_fp3(capsys):
    code, rep = js(capsys, "zeta", "--field", "3", "--fp", "3")
    assert code == 0 and rep["schema"] == 1
    assert rep["zeta1"] == [[1], [2]] and rep["hw"] == [[[1]]]


def test_zeta_curve(capsys):
    code, rep = js(capsys, "zeta", "--field", "5", "--curve", "a=1,b=0")
    assert code == 0 and rep["zeta1"] == [[1], [3]]  # 1 - 2T
    assert rep["zeta0"] == [[1], [4]]


def test_zeta_poly_over_extension(capsys):
    code, rep = js(capsys, "zeta", "--field", "3,2", "--poly", "X0^3 + X1^3 + X2^3 + X0*X1*X2")
    assert code == 0 and rep["variety"]["field"]["f"] == 2


@pytest.mark.parametrize("argv", [
    ["zeta", "--field", "3", "--poly", "X0^3+"],
    ["zeta", "--field", "3", "--poly", "Y^2"],
    ["zeta", "--poly", "X0^3"],
    ["zeta", "--field", "4", "--poly", "X0^3"],
    ["zeta", "--field", "5", "--fp", "3"],
    ["zeta", "--field", "5", "--curve", "c=1"],
    ["verify-fp", "--p", "2"],
    ["nonsense"],
    ["count", "--field", "3"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_budget_exit(capsys):
    code, rep = js(capsys, "katz", "--fp", "3", "--emax", "3", "--budget", "100")
    assert code == 3 and rep["required"] == 757


def test_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("FROBWITT_BUDGET", "50")
    code, _ = js(capsys, "count", "--fp", "3", "--e", "2")
    assert code == 3


def test_count(capsys):
    code, rep = js(capsys, "count", "--field", "3", "--fp", "3", "--e", "2")
    assert code == 0 and rep["counts"] == [{"e": 2, "N_e": 12}]
    code, rep = js(capsys, "count", "--fp", "3", "--emax", "3")
    assert [c["N_e"] for c in rep["counts"]] == [6, 12, 18]


def test_katz_smooth_fixed_cohdims(capsys):
    code, rep = js(capsys, "katz", "--fp", "3", "--emax", "3")
    assert code == 0 and rep["pass"]
    code, rep = js(capsys, "smooth", "--fp", "3", "--emax", "2")
    assert code == 0 and not rep["singular_found"]
    code, rep = js(capsys, "fixed-points", "--fp", "3", "--emax", "1")
    assert rep["fixed_points"]["on_X"] == []
    code, rep = js(capsys, "cohdims", "--fp", "5")
    assert rep["h"] == [1, 0, 0, 1]


def test_mu(capsys):
    code, rep = js(capsys, "mu", "--p", "5", "--curve", "a=1,b=0")
    assert code == 0 and rep["report"]["mu"] == [2]
    code, rep = js(capsys, "mu", "--p", "5", "--curve", "a=0,b=1")
    assert code == 0 and rep["report"]["inapplicable"] == "supersingular"


def test_mu_sweep(capsys):
    code, rep = js(capsys, "mu-sweep", "--p", "7")
    assert code == 0 and rep["pass"] and rep["curves"] == 42


def test_modrep(capsys):
    code, rep = js(capsys, "modrep", "--p", "3", "--n", "1", "--ll")
    assert code == 0 and (rep["L"], rep["Lprime"]) == (1, 1)
    code, rep = js(capsys, "modrep", "--p", "3", "--jordan", "2,3", "--report", "tate,ext,LLprime")
    assert code == 0 and rep["tate"]["0"] == 1 and rep["ext"] == rep["ext_resolution"]
    assert main(["modrep", "--p", "3"]) == 2


def test_verify_fp(capsys):
    code, rep = js(capsys, "verify-fp", "--p", "3", "--emax", "3")
    assert code == 0 and all(rep["checks"].values())
    code, rep = js(capsys, "verify-fp", "--p", "5", "--emax", "1")
    assert code == 0 and rep["bounded"] and rep["smooth_probe"]["probed"] == [1]


def test_verify_fp_budget_partial(capsys):
    code, rep = js(capsys, "verify-fp", "--p", "5", "--emax", "2", "--budget", "5000")
    assert code == 3 and rep["partial"] and "checks" in rep


def test_text_format(capsys):
    code, out, _ = run(capsys, "zeta", "--fp", "3", "--format", "text")
    assert code == 0 and "zeta1_text: " in out and "schema: 1" in out


def test_selftest_deterministic():
    cmd = [sys.executable, "-m", "frobwitt", "selftest", "--seed", "0"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["pass"]


def test_selftest_seed_changes_output(capsys):
    _, a = js(capsys, "selftest", "--seed", "0")
    _, b = js(capsys, "selftest", "--seed", "1")
    assert a["seed"] == 0 and b["seed"] == 1 and a["pass"] and b["pass"]
