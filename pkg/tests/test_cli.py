import json
import subprocess
import sys

import numpy as np
import pytest

from morrey_lab.cli import main, parse_domain
from morrey_lab.grid import GridFunction, centered_grid, read_pmg, write_pmg
from morrey_lab.harness import families as fam
from morrey_lab.norms import Domain, lp_norm, morrey_norm
from morrey_lab.potentials import apply_P_alpha


@pytest.fixture
def pmg(tmp_path):
    g = centered_grid(1, 16, 0.125, (-0.5, 1.0))
    f = GridFunction(g, fam.gaussians()[0].values(g))
    path = tmp_path / "f.pmg"
    write_pmg(path, f)
    return path, f


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_matches_library(pmg, capsys):
    path, f = pmg
    code, out, _ = run(["norm", "--kind", "morrey", "--p", 2, "--beta", 1, "--in", path], capsys)
    assert code == 0
    js = json.loads(out)
    assert js["value"] == morrey_norm(f, 2.0, 1.0).value
    code, out, _ = run(["norm", "--kind", "lp", "--p", "inf", "--in", path], capsys)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(np.max(np.abs(f.values)))


def test_norm_exit_codes(pmg, tmp_path, capsys):
    path, _ = pmg
    code, _, err = run(["norm", "--kind", "morrey", "--p", 2, "--beta", 2, "--in", path], capsys)
    assert code == 4 and "warning" in err
    bad = tmp_path / "bad.pmg"
    bad.write_bytes(b"garbage")
    assert run(["norm", "--kind", "lp", "--p", 2, "--in", bad], capsys)[0] == 1
    assert run(["norm", "--kind", "morrey", "--p", 2, "--in", path], capsys)[0] == 1
    assert run(["norm", "--kind", "lp", "--p", 2, "--domain", "disc:1", "--in", path], capsys)[0] == 1


def test_parse_domain():
    assert parse_domain("whole").to_json() == Domain.whole().to_json()
    assert parse_domain("strip:-1,1").to_json() == Domain.strip(-1, 1).to_json()
    with pytest.raises(ValueError):
        parse_domain("cylinder:1,2")


def test_apply_then_norm_reproduces_library(pmg, tmp_path, capsys):
    path, f = pmg
    out_path = tmp_path / "pf.pmg"
    code, out, _ = run(["apply", "--op", "Palpha", "--alpha", 1, "--in", path, "--out", out_path], capsys)
    assert code == 0
    info = json.loads(out)
    assert info["quadrature_error"] < 1e-6
    pf = apply_P_alpha(f, 1.0)
    assert read_pmg(out_path).values.tobytes() == pf.values.tobytes()
    code, out, _ = run(["norm", "--kind", "lp", "--p", 3, "--in", out_path], capsys)
    assert abs(json.loads(out)["value"] / lp_norm(pf, 3.0) - 1) <= 1e-12


@pytest.mark.parametrize("argv", [["potential", "--op", "P1adj"], ["maximal", "--kind", "Mhat"],
                                  ["transform", "--op", "fold", "--S", "-0.5", "--T", "0.5"],
                                  ["apply", "--op", "scale", "--R", "2"]])
def test_operator_aliases(pmg, argv, capsys):
    path, _ = pmg
    code, out, _ = run(argv + ["--in", path], capsys)
    assert code == 0 and json.loads(out)["max_abs"] > 0


def test_apply_reports_operator_errors(pmg, capsys):
    path, _ = pmg
    assert run(["apply", "--op", "riesz", "--in", path], capsys)[0] == 1
    assert run(["apply", "--op", "scale", "--R", "1.5", "--in", path], capsys)[0] == 1


def test_check_unknown_id_lists_known(tmp_path, capsys):
    code, _, err = run(["check", "--suite", "bogus", "--out", tmp_path / "r"], capsys)
    assert code == 1 and "eq2.3" in err


def test_check_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        prefix = tmp_path / f"r{k}"
        code, out, _ = run(["check", "--suite", "eq2.3,lem2.1", "--out", prefix], capsys)
        assert code == 0 and "exit 0" in out
        outs.append((prefix.with_suffix(".json").read_bytes(), prefix.with_suffix(".csv").read_bytes()))
    assert outs[0] == outs[1]
    js = json.loads(outs[0][0])
    assert js["schema"] == "mlab-report/1" and js["cases"][0]["case"] == "eq2.3"


def test_console_entry_point(pmg):
    path, _ = pmg
    res = subprocess.run([sys.executable, "-m", "morrey_lab.cli", "norm", "--kind", "slashed", "--p", "2",
                          "--in", str(path)], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["kind"] == "slashed"
