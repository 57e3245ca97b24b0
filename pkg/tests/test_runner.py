"""Scenario runner: config parsing, outputs, determinism, exit codes."""

import numpy as np
import pytest

from curvlab.errors import ConfigError
from curvlab.runner import (EXIT_CONFIG, EXIT_OK, EXIT_PRECONDITION,
                            ScenarioConfig, emit_csv, main, parse_config_file,
                            parse_profile_expr, run_scenario)


# ---------------------------------------------------------------------------
# expression grammar
# ---------------------------------------------------------------------------


def test_expr_constants_and_r():
    r = np.linspace(0, 1, 5)
    assert np.allclose(parse_profile_expr("2.5")(r), 2.5)
    assert np.allclose(parse_profile_expr("r")(r), r)


def test_expr_arithmetic():
    r = np.linspace(0, 2, 9)
    f = parse_profile_expr("1 + 0.1*sin(r) - 0.5*cos(2*r)")
    assert np.allclose(f(r), 1 + 0.1 * np.sin(r) - 0.5 * np.cos(2 * r))
    g = parse_profile_expr("(1 + r)^2")
    assert np.allclose(g(r), (1 + r) ** 2)
    h = parse_profile_expr("-r + 6*(1 + 0.1*sin(r))")
    assert np.allclose(h(r), -r + 6 * (1 + 0.1 * np.sin(r)))


def test_expr_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_profile_expr("import os")
    with pytest.raises(ConfigError):
        parse_profile_expr("sin r")
    with pytest.raises(ConfigError):
        parse_profile_expr("1 +")


# ---------------------------------------------------------------------------
# csv emission
# ---------------------------------------------------------------------------


def test_emit_csv_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv(path, ["a", "b"], [])
    assert path.read_text() == "a,b\n"


def test_emit_csv_shape(tmp_path):
    path = tmp_path / "t.csv"
    emit_csv(path, ["x", "y"], [(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)])
    assert len(path.read_text().splitlines()) == 4


def test_emit_csv_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(157)
    values = [(float(x), float(y)) for x, y in rng.normal(size=(20, 2))]
    path = tmp_path / "rt.csv"
    emit_csv(path, ["x", "y"], values)
    lines = path.read_text().splitlines()[1:]
    parsed = [tuple(float(t) for t in line.split(",")) for line in lines]
    assert parsed == values


def test_emit_csv_rejects_ragged(tmp_path):
    with pytest.raises(ValueError):
        emit_csv(tmp_path / "bad.csv", ["x", "y"], [(1.0,), (2.0, 3.0)])


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------


def test_parse_config_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\ncommand = classify\nmodel.preset = flat-torus\n\nmodel.N = 32\n")
    options = parse_config_file(cfg_file)
    assert options == {"command": "classify", "model.preset": "flat-torus", "model.N": "32"}


def test_config_rejects_unknown_command():
    with pytest.raises(ConfigError):
        ScenarioConfig(command="explode")


def test_config_rejects_bad_number():
    cfg = ScenarioConfig(command="classify", options={"model.N": "many"})
    with pytest.raises(ConfigError):
        cfg.get_int("model.N")


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


def test_classify_flat_torus(tmp_path):
    cfg = ScenarioConfig(command="classify",
                         options={"model.preset": "flat-torus",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.summary["verdict"] == "Z_G"
    assert abs(report.summary["lambda1"]) < 1e-8
    assert (tmp_path / "out" / "report.txt").exists()
    assert (tmp_path / "out" / "scal.csv").exists()
    assert (tmp_path / "out" / "plotdata" / "scal.dat").exists()


def test_classify_round_fiber(tmp_path):
    cfg = ScenarioConfig(command="classify",
                         options={"model.preset": "round-fiber",
                                  "run.outdir": str(tmp_path / "out")})
    assert run_scenario(cfg).summary["verdict"] == "P_G"


def test_yamabe_positive_run(tmp_path):
    cfg = ScenarioConfig(command="yamabe",
                         options={"model.preset": "round-fiber", "yamabe.c": "6.0",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.residuals["euler_lagrange"] < 1e-8
    text = (tmp_path / "out" / "solution.csv").read_text().splitlines()
    assert text[0] == "r,u,scal_out"
    assert len(text) == 65


def test_yamabe_negative_run(tmp_path):
    cfg = ScenarioConfig(command="yamabe",
                         options={"model.preset": "hyperbolic-fiber",
                                  "yamabe.negative": "true",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.summary["achieved_constant"] == pytest.approx(2.0, rel=1e-8)


def test_prescribe_run(tmp_path):
    cfg = ScenarioConfig(command="prescribe",
                         options={"model.preset": "round-fiber", "model.N": "128",
                                  "prescribe.target": "6*(1 + 0.1*sin(r))",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.summary["c"] == pytest.approx(1.0)
    assert report.residuals["sup_error"] < 1e-3
    header = (tmp_path / "out" / "prescription.csv").read_text().splitlines()[0]
    assert header == "r,phi,u,scal_out"


def test_cheeger_sweep(tmp_path):
    cfg = ScenarioConfig(command="cheeger",
                         options={"model.preset": "su2-biinvariant",
                                  "cheeger.t_max": "10000",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.summary["predicted_limit"] == pytest.approx(1.5)
    assert report.summary["final_ratio"] == pytest.approx(1.0, rel=1e-2)
    lines = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "t,scal,scal_over_t,predicted_limit,ratio"


def test_canonical_sweep(tmp_path):
    cfg = ScenarioConfig(command="canonical",
                         options={"model.preset": "negative-base-product",
                                  "canonical.sweep": "0.05:1.0:20",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.summary["positivity_threshold"] == pytest.approx(0.5, abs=1e-9)
    header = (tmp_path / "out" / "sweep.csv").read_text().splitlines()[0]
    assert header == "s,scal,hh_min,hh_max,hv_min,hv_max,vv_avg"


def test_approx_run(tmp_path):
    cfg = ScenarioConfig(command="approx",
                         options={"model.preset": "bumpy",
                                  "approx.target": "6 + 0.5*sin(r)",
                                  "approx.eps": "0.05",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    assert report.summary["achieved_error"] < 0.05


def test_report_excludes_wall_time(tmp_path):
    cfg = ScenarioConfig(command="classify",
                         options={"model.preset": "flat-torus",
                                  "run.outdir": str(tmp_path / "out")})
    report = run_scenario(cfg)
    text = (tmp_path / "out" / "report.txt").read_text()
    assert report.wall_time > 0
    assert not any(line.split(" = ")[0].strip().startswith("wall")
                   for line in text.splitlines())
    assert "verdict = Z_G" in text


def test_determinism_byte_for_byte(tmp_path):
    # identical config (same outdir) and seed reproduce every byte
    options = {"model.preset": "round-fiber", "yamabe.c": "6.0", "run.seed": "7",
               "run.outdir": str(tmp_path / "out")}
    cfg = ScenarioConfig(command="yamabe", options=dict(options))
    run_scenario(cfg)
    names = ("report.txt", "solution.csv", "plotdata/u.dat")
    first = {n: (tmp_path / "out" / n).read_bytes() for n in names}
    run_scenario(ScenarioConfig(command="yamabe", options=dict(options)))
    for n in names:
        assert (tmp_path / "out" / n).read_bytes() == first[n], n


# ---------------------------------------------------------------------------
# exit codes through main()
# ---------------------------------------------------------------------------


def test_main_success(tmp_path, capsys):
    code = main(["classify", "--model", "round-fiber", "--outdir", str(tmp_path / "o")])
    assert code == EXIT_OK
    assert "verdict = P_G" in capsys.readouterr().out


def test_main_precondition_rejection(tmp_path, capsys):
    # negative target on a positively curved background: pinching fails
    code = main(["prescribe", "--model", "round-fiber", "--target", "-1",
                 "--outdir", str(tmp_path / "o")])
    assert code == EXIT_PRECONDITION
    err = capsys.readouterr().err
    assert "pinching-window" in err


def test_main_config_error(tmp_path, capsys):
    code = main(["classify", "--model", "does-not-exist", "--outdir", str(tmp_path / "o")])
    assert code == EXIT_CONFIG


def test_main_config_file_plus_override(tmp_path, capsys):
    cfg_file = tmp_path / "c.cfg"
    cfg_file.write_text("model.preset = flat-torus\n")
    code = main(["classify", "--config", str(cfg_file),
                 "--set", f"run.outdir={tmp_path / 'o'}"])
    assert code == EXIT_OK
    assert "Z_G" in capsys.readouterr().out


def test_main_solver_failure_exit_code(tmp_path, capsys):
    from curvlab.runner import EXIT_SOLVER
    # an unreachable tolerance forces a solver-failure exit
    code = main(["yamabe", "--model", "round-fiber", "--c", "6.0",
                 "--tol", "1e-30", "--outdir", str(tmp_path / "o")])
    assert code == EXIT_SOLVER
    assert "solver failure" in capsys.readouterr().err
