import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.interpolate import PchipInterpolator

from frechet_skew import dist
from frechet_skew.cli import main
from frechet_skew.errors import InputError, InvalidP, InvalidParams
from frechet_skew.fileio import default_grid, load_samples, parse_grid, parse_spec_text


def write_spec(tmp_path, obj, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def gamma_spec(tmp_path):
    return write_spec(tmp_path, {"family": "gamma", "params": {"alpha": 2, "lambda": 1}})


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- spec and grid parsing ----------------------------------------------------
def test_parse_spec_builtin_and_custom():
    s = parse_spec_text('{"family": "beta", "params": {"alpha": 2, "beta": 5}}')
    assert s.family == "beta" and s.params == {"alpha": 2, "beta": 5}
    c = parse_spec_text('{"family": "custom", "grid": {"x": [0, 1], "f": [1, 1]},'
                        ' "interpolation": "linear"}')
    assert c.grid_x == (0.0, 1.0) and c.interpolation == "linear"


@pytest.mark.parametrize("text,needle", [
    ('{"family": "gamma", "params": {"alpha": 2, "lambda": 1}, "extra": 1}', "'extra'"),
    ('{"family": "weibull", "params": {}}', "family"),
    ('{"family": "gamma", "params": {"alpha": "2", "lambda": 1}}', "params.alpha"),
    ('{"family": "custom", "grid": {"x": [0, 1], "f": [1, 1], "g": []}}', "grid.g"),
    ('{"family": "custom", "params": {}, "grid": {"x": [0, 1], "f": [1, 1]}}', "params"),
    ('[1, 2]', "object"),
    ('{"family": ', "line 1"),
])
def test_parse_spec_errors_name_the_field(text, needle):
    with pytest.raises(InvalidParams, match=needle):
        parse_spec_text(text)


@pytest.mark.parametrize("text,expected", [
    ("1,2,4", [1.0, 2.0, 4.0]),
    ("linear:1..3:3", [1.0, 2.0, 3.0]),
    ("geometric:1..100:3", [1.0, 10.0, 100.0]),
    ("geometric:0.5..0.5:1", [0.5]),
])
def test_parse_grid(text, expected):
    assert parse_grid(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["", "a,b", "1,-2", "geometric:2..1:5", "linear:1..2:0", "nan"])
def test_parse_grid_rejects(text):
    with pytest.raises(InvalidP):
        parse_grid(text)


def test_default_grid():
    g = default_grid(dist("pareto", alpha=3.0))
    assert len(g) == 16 and g[0] == 1.0 and g[-1] == pytest.approx(4 - 1e-3)
    g = default_grid(dist("gamma", alpha=2.0, lam=1.0), full_domain=True)
    assert g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(8.0)


def test_load_samples_header_and_errors(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("x,y\n1,2\n3,4\n")
    np.testing.assert_array_equal(load_samples(str(p)), [[1, 2], [3, 4]])
    p.write_text("1,2\n3\n")
    with pytest.raises(InputError, match="row 2"):
        load_samples(str(p))
    with pytest.raises(InputError):
        load_samples(str(tmp_path / "missing.csv"))


# -- commands -------------------------------------------------------------------
def test_pmean_json(gamma_spec, capsys):
    code, out, _ = run(["pmean", "--dist", gamma_spec, "--p", "2"], capsys)
    assert code == 0
    summary, body = out.split("\n", 1)
    assert summary.startswith("nu_p = 2")
    obj = json.loads(body)
    assert obj["nu_p"] == pytest.approx(2.0, rel=1e-12)
    assert obj["method"] == "interior_formula"


def test_pmean_csv_to_file(gamma_spec, tmp_path, capsys):
    out_path = tmp_path / "pm.csv"
    code, out, _ = run(["pmean", "--dist", gamma_spec, "--p", "1", "--format", "csv",
                        "-o", str(out_path)], capsys)
    assert code == 0 and out.count("\n") == 1
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert list(rows[0]) == ["p", "nu_p", "H_p", "dnu_dp", "method", "residual"]
    assert rows[0]["method"] == "general_formula"


def test_pmean_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(
        '{"family": "exponential", "params": {"lambda": 1}}'))
    code, out, _ = run(["pmean", "--dist", "-", "--p", "1"], capsys)
    assert code == 0
    assert json.loads(out.split("\n", 1)[1])["nu_p"] == pytest.approx(math.log(2))


def test_curve_csv(gamma_spec, capsys):
    code, out, _ = run(["curve", "--dist", gamma_spec, "--grid", "0.5,1,2", "--full-domain"],
                       capsys)
    assert code == 0
    summary, body = out.split("\n", 1)
    assert summary == "3 points, 0 dropped"
    rows = list(csv.DictReader(io.StringIO(body)))
    assert [float(r["p"]) for r in rows] == [0.5, 1.0, 2.0]
    assert all(float(r["dnu_dp"]) > 0 for r in rows)


def test_curve_json_reports_dropped(tmp_path, capsys):
    spec = write_spec(tmp_path, {"family": "pareto", "params": {"alpha": 3}})
    with pytest.warns(UserWarning, match="dropped"):
        code, out, _ = run(["curve", "--dist", spec, "--grid", "0.5,2,5", "--format", "json"],
                           capsys)
    assert code == 0
    obj = json.loads(out.split("\n", 1)[1])
    assert obj["dropped"] == [0.5, 5.0] and len(obj["points"]) == 1


def test_classify_writes_report_and_curve(tmp_path, capsys):
    spec = write_spec(tmp_path, {"family": "exponential", "params": {"lambda": 1}})
    out_path = tmp_path / "rep.json"
    code, out, _ = run(["classify", "--dist", spec, "--grid", "geometric:0.01..8:8",
                        "--full-domain", "-o", str(out_path)], capsys)
    assert code == 0
    assert out.strip() == "truly_mode_positive (full domain)"
    rep = json.loads(out_path.read_text())
    assert rep["classification"] == "truly_mode_positive_full_domain"
    assert rep["ell"] == pytest.approx(0.0, abs=1e-3)
    curve = (tmp_path / "rep.curve.csv").read_text().splitlines()
    assert rep["curve_csv_path"].endswith("rep.curve.csv") and len(curve) == 9


def test_classify_lognormal_full_domain(tmp_path, capsys):
    spec = write_spec(tmp_path, {"family": "lognormal", "params": {"mu": 0, "sigma2": 1}})
    code, out, _ = run(["classify", "--dist", spec, "--grid", "geometric:0.25..6:16",
                        "--full-domain", "--no-ell"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "truly_mode_positive (full domain)"


def test_triangle_custom_spec_accepted(tmp_path, capsys):
    spec = write_spec(tmp_path, {"family": "custom", "grid": {"x": [0, 1], "f": [2, 0]}})
    code, out, _ = run(["pmean", "--dist", spec, "--p", "1"], capsys)
    assert code == 0
    assert json.loads(out.split("\n", 1)[1])["nu_p"] == pytest.approx(1 - math.sqrt(0.5))


def _non_monotone_spec(tmp_path):
    x = np.linspace(0.0, 1.0, 2001)
    bump = np.where(x > 0.55, (x - 0.55) * np.exp(-(x - 0.55) / 0.05), 0.0)
    f = 0.02 + bump / np.trapezoid(bump, x)
    f = f / PchipInterpolator(x, f).integrate(0.0, 1.0)
    return write_spec(tmp_path, {"family": "custom", "grid": {"x": x.tolist(), "f": f.tolist()}})


def test_classify_strict_exit_3(tmp_path, capsys):
    spec = _non_monotone_spec(tmp_path)
    argv = ["classify", "--dist", spec, "--grid", "geometric:1..64:8", "--no-ell"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and out.startswith("indeterminate")
    code, _, err = run(argv + ["--strict"], capsys)
    assert code == 3
    assert json.loads(err.strip().splitlines()[-1])["exit_code"] == 3


def test_dominance(gamma_spec, capsys):
    code, out, _ = run(["dominance", "--dist", gamma_spec, "--p", "2"], capsys)
    assert code == 0
    summary, body = out.split("\n", 1)
    assert summary == "right_dominates_strictly"
    obj = json.loads(body)
    assert math.sqrt(2) < obj["c"] < 2


def test_tailbone_from_samples(tmp_path, capsys, rng):
    p = tmp_path / "x.csv"
    X = rng.lognormal(size=(2000, 2))
    np.savetxt(p, X, delimiter=",", header="a,b", comments="", fmt="%.17g")
    code, out, _ = run(["tailbone", "--samples", str(p), "--grid", "1,2,4"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("zeta = ")
    assert lines[1] == "p,nu_1,nu_2,objective,iterations,converged"
    assert float(lines[3].split(",")[1]) == pytest.approx(X[:, 0].mean(), rel=1e-12)


def test_tailbone_from_dists_seeded(tmp_path, capsys):
    e = write_spec(tmp_path, {"family": "exponential", "params": {"lambda": 1}}, "e.json")
    n = write_spec(tmp_path, {"family": "normal", "params": {"mu": 0, "sigma2": 1}}, "n.json")
    argv = ["tailbone", "--dist", e, "--dist", n, "--n", "5000", "--seed", "3",
            "--format", "json"]
    first = run(argv, capsys)[1]
    second = run(argv, capsys)[1]
    assert first == second
    obj = json.loads(first.split("\n", 1)[1])
    assert len(obj["entries"]) == 4 and len(obj["entries"][0]["nu"]) == 2


def test_tailbone_requires_seed(gamma_spec, capsys):
    code, _, err = run(["tailbone", "--dist", gamma_spec], capsys)
    assert code == 1
    assert "seed" in json.loads(err)["message"]


@pytest.mark.parametrize("argv_tail,code", [
    (["--p", "-1"], 1),
    (["--p", "5"], 2),
])
def test_pmean_exit_codes(tmp_path, capsys, argv_tail, code):
    spec = write_spec(tmp_path, {"family": "pareto", "params": {"alpha": 3}})
    got, _, err = run(["pmean", "--dist", spec] + argv_tail, capsys)
    assert got == code
    assert json.loads(err)["exit_code"] == code


def test_bad_spec_exit_1(tmp_path, capsys):
    spec = write_spec(tmp_path, {"family": "gamma", "params": {"alpha": 2}})
    code, _, err = run(["pmean", "--dist", spec, "--p", "1"], capsys)
    assert code == 1
    assert json.loads(err)["error"] == "InvalidParams"
    code, _, _ = run(["pmean", "--dist", str(tmp_path / "none.json"), "--p", "1"], capsys)
    assert code == 1


def test_usage_error_exit_1(capsys):
    code, _, err = run(["pmean"], capsys)
    assert code == 1
    assert '"UsageError"' in err


def test_output_dir_missing(gamma_spec, tmp_path, capsys):
    code, _, _ = run(["pmean", "--dist", gamma_spec, "--p", "2", "-o",
                      str(tmp_path / "no" / "x.json")], capsys)
    assert code == 1


def test_console_entry_point(gamma_spec):
    r = subprocess.run([sys.executable, "-m", "frechet_skew", "pmean", "--dist", gamma_spec,
                        "--p", "2"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("nu_p = 2")


def test_oracle_check_passes(tmp_path, capsys):
    out_path = tmp_path / "oc.json"
    code, out, _ = run(["oracle-check", "-o", str(out_path)], capsys)
    assert code == 0
    obj = json.loads(out_path.read_text())
    assert obj["n_failed"] == 0 and obj["n_checks"] == len(obj["checks"])
    assert out.startswith("oracle-check: ")
