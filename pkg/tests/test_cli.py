import csv
import json
import subprocess
import sys

import pytest

from solitonlab.cli import main
from solitonlab.errors import ConfigurationError
from solitonlab.suites import CHECKS, SUITES, RunConfig, emit_report, run_suite


def verify(tmp_path, *args, fmt="json", name="report"):
    out = tmp_path / name
    code = main(["verify", *args, "--out", str(out), "--format", fmt])
    return code, out


def load(path):
    return json.loads(path.read_text())


def test_gaussian_main_identity(tmp_path):
    code, out = verify(tmp_path, "--metric", "gaussian", "--suite", "main-identity",
                       "--points", "50", "--seed", "1")
    assert code == 0
    rep = load(out)
    assert set(rep) == {"version", "config", "points", "summary"}
    assert len(rep["points"]) == 50
    s = rep["summary"]["main_identity"]
    assert s["max_residual"] <= 1e-8 and s["fail"] == 0 and s["pass"] == 50


def test_random_poly_cotton_divergence(tmp_path):
    code, out = verify(tmp_path, "--metric", "random_poly:seed=3", "--suite", "cotton-divergence",
                       "--points", "20")
    assert code == 0
    rep = load(out)
    assert rep["config"]["params"] == {"seed": "3"}
    assert rep["summary"]["cotton_plus_2divw"]["max_residual"] <= 1e-4


def test_page_hermitian_lee(tmp_path):
    code, out = verify(tmp_path, "--metric", "page", "--suite", "hermitian-lee", "--points", "30")
    assert code == 0
    rep = load(out)
    assert rep["summary"]["lee_closed"]["max_residual"] <= 5e-5
    for p in rep["points"]:
        lee = next(c for c in p["checks"] if c["name"] == "lee_extraction")
        assert lee["observables"]["theta_norm"] > 0


def test_summary_matches_records(tmp_path):
    code, out = verify(tmp_path, "--metric", "fubini_study", "--suite", "curvature",
                       "--points", "4")
    rep = load(out)
    for name, s in rep["summary"].items():
        vals = [c["residual"] for p in rep["points"] for c in p["checks"] if c["name"] == name]
        assert s["max_residual"] == max(vals)
        assert s["pass"] + s["fail"] == len(vals)
        assert isinstance(s["reference"], str) and s["reference"]


def test_byte_identical_reports(tmp_path):
    args = ["--metric", "random_poly:seed=2", "--suite", "curvature", "--points", "3",
            "--seed", "7"]
    _, a = verify(tmp_path, *args, name="a.json")
    _, b = verify(tmp_path, *args, name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_seed_changes_points(tmp_path):
    _, a = verify(tmp_path, "--metric", "gaussian", "--suite", "frames", "--points", "2",
                  "--seed", "1", name="a.json")
    _, b = verify(tmp_path, "--metric", "gaussian", "--suite", "frames", "--points", "2",
                  "--seed", "2", name="b.json")
    assert load(a)["points"][0]["point"] != load(b)["points"][0]["point"]


def test_seventeen_digit_numbers(tmp_path):
    _, out = verify(tmp_path, "--metric", "gaussian", "--suite", "frames", "--points", "1",
                    "--seed", "3")
    text = out.read_text()
    coord = load(out)["points"][0]["point"][0]
    assert format(coord, ".17g") in text


def test_csv_summary(tmp_path):
    code, out = verify(tmp_path, "--metric", "fubini_study", "--suite", "soliton",
                       "--points", "2", fmt="csv-summary")
    assert code == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["check", "max_residual", "tolerance", "pass"]
    assert len(rows) - 1 == len(SUITES["soliton"])


def test_tolerance_override_forces_failure(tmp_path):
    code, out = verify(tmp_path, "--metric", "round_s4", "--suite", "curvature", "--points", "2",
                       "--tol", "scalar_curvature=1e-30")
    assert code == 1
    s = load(out)["summary"]["scalar_curvature"]
    assert s["tolerance"] == 1e-30 and s["fail"] == 2


def test_tolerance_override_loosens(tmp_path):
    _, out = verify(tmp_path, "--metric", "gaussian", "--suite", "curvature", "--points", "1",
                    "--tol", "scalar_curvature=0.5")
    assert load(out)["summary"]["scalar_curvature"]["tolerance"] == 0.5


@pytest.mark.parametrize("args", [
    ["--metric", "torus", "--suite", "curvature"],
    ["--metric", "gaussian", "--suite", "nope"],
    ["--metric", "gaussian", "--suite", "curvature", "--points", "0"],
    ["--metric", "gaussian", "--suite", "curvature", "--h", "-1"],
    ["--metric", "gaussian", "--suite", "curvature", "--tol", "main_identity=1"],
    ["--metric", "gaussian", "--suite", "curvature", "--tol", "scalar_curvature"],
    ["--metric", "round_s4:a", "--suite", "curvature"],
    ["--metric", "random_poly", "--suite", "kappa"],
])
def test_usage_errors(tmp_path, args, capsys):
    code, _ = verify(tmp_path, *args)
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_missing_required_flag(capsys):
    assert main(["verify", "--metric", "gaussian"]) == 2


def test_unwritable_path(tmp_path, capsys):
    bad = tmp_path / "missing" / "dir" / "r.json"
    code = main(["verify", "--metric", "gaussian", "--suite", "frames", "--points", "1",
                 "--out", str(bad)])
    assert code == 2
    assert str(bad) in capsys.readouterr().err


def test_precondition_failures_are_records(monkeypatch):
    import dataclasses

    from solitonlab import suites
    from solitonlab.errors import EigenGapError

    def boom(spec, x, cfg, rng):
        raise EigenGapError("gap too small", 0.0)

    check = dataclasses.replace(CHECKS["frame_invariants"], fn=boom)
    monkeypatch.setitem(suites.CHECKS, "frame_invariants", check)
    rep = run_suite(RunConfig("gaussian", "frames", points=2))
    assert not rep.passed
    rec = rep.points[0]["checks"][0]
    assert rec["residual"] is None and rec["pass"] is False
    assert rec["error"].startswith("EigenGapError")
    assert rep.summary["frame_invariants"]["fail"] == 2


def test_tiny_tolerance_fails_without_crash():
    rep = run_suite(RunConfig("random_poly", "divwplus-expansion", points=2,
                              tolerances={"nabla_wplus_expansion": 1e-30}))
    assert rep.summary["nabla_wplus_expansion"]["fail"] == 2


def test_stdout_report(capsys):
    assert main(["verify", "--metric", "gaussian", "--suite", "frames", "--points", "1",
                 "--out", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["summary"]


def test_timing_flag(tmp_path):
    code = main(["verify", "--metric", "gaussian", "--suite", "frames", "--points", "1",
                 "--out", str(tmp_path / "t.json"), "--timing"])
    assert code == 0
    assert load(tmp_path / "t.json")["wall_time"] >= 0


def test_list_metrics(capsys):
    assert main(["list-metrics"]) == 0
    out = capsys.readouterr().out
    for name in ("gaussian", "round_s4 (a:float)", "page (sign:int)", "random_poly"):
        assert name in out


def test_list_suites(capsys):
    assert main(["list-suites"]) == 0
    out = capsys.readouterr().out
    for suite in SUITES:
        assert suite + ":" in out


def test_spectrum(capsys):
    assert main(["spectrum", "--metric", "fubini_study", "--point", "0.1,0.2,-0.1,0.3"]) == 0
    out = capsys.readouterr().out.splitlines()
    wplus = [float(t) for t in out[0].split(":")[1].split()]
    assert wplus == pytest.approx([1 / 3, -1 / 6, -1 / 6], abs=1e-5)
    assert float(out[2].split(":")[1]) == pytest.approx(2.0, abs=5e-5)


def test_spectrum_without_j(capsys):
    assert main(["spectrum", "--metric", "random_poly", "--point", "0,0,0,0"]) == 0
    assert "n/a" in capsys.readouterr().out


def test_spectrum_bad_point(capsys):
    assert main(["spectrum", "--metric", "gaussian", "--point", "1,2,3"]) == 2
    assert main(["spectrum", "--metric", "gaussian", "--point", "9,0,0,0"]) == 2


def test_every_check_in_some_suite():
    listed = {n for s, names in SUITES.items() if s != "all" for n in names}
    assert listed == set(CHECKS)
    assert SUITES["all"] == [n for s, names in SUITES.items() if s != "all" for n in names]


def test_run_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig("gaussian", "frames", seed=-1)
    with pytest.raises(ConfigurationError):
        RunConfig("gaussian", "frames", tolerances={"frame_invariants": 0.0})


def test_emit_report_bad_format(tmp_path):
    rep = run_suite(RunConfig("gaussian", "frames", points=1))
    with pytest.raises(ConfigurationError):
        emit_report(rep, str(tmp_path / "x"), "yaml")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "solitonlab", "list-suites"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "main-identity" in r.stdout
