import filecmp
import json
import math
import os

import numpy as np
import pytest

from arpsweep.cli import main

TRAJ_HEADER = "t_ms,rho11,rho22,re_rho12,im_rho12,mx,my,mz,amplitude"


def run(*argv):
    return main([str(a) for a in argv])


def sim_args(out, **over):
    base = dict(profile="rect", omega1=1.0, duration=200.0, tauc=1e-2)
    base["delta-omega"] = 10.0
    base.update(over)
    argv = ["simulate"]
    for key, val in base.items():
        if val is not None:
            argv += [f"--{key}", str(val)]
    argv += ["--samples", "101", "--out", str(out)]
    return argv


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestSimulate:
    def test_artifacts_and_header(self, tmp_path):
        assert run(*sim_args(tmp_path)) == 0
        lines = read_lines(tmp_path / "trajectory.csv")
        assert lines[0] == TRAJ_HEADER
        assert len(lines) == 102
        assert lines[1].split(",")[0] == "0"
        assert lines[-1].split(",")[0] == "200"
        summary = load_json(tmp_path / "summary.json")
        assert set(summary) == {"p_max", "t_peak_ms", "p_final", "params"}
        assert 0.0 < summary["p_final"] < 1.0
        assert summary["params"]["omega1"] == 1.0
        assert summary["params"]["t1"] is None
        assert summary["params"]["beta"] is None

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(*sim_args(a)) == 0
        assert run(*sim_args(b)) == 0
        assert filecmp.cmp(a / "trajectory.csv", b / "trajectory.csv",
                           shallow=False)
        assert filecmp.cmp(a / "summary.json", b / "summary.json",
                           shallow=False)

    def test_rate_form_echoes_duration(self, tmp_path):
        argv = sim_args(tmp_path, duration=None, rate=0.1)
        assert run(*argv) == 0
        params = load_json(tmp_path / "summary.json")["params"]
        assert params["duration"] == 200.0
        assert params["rate"] == 0.1

    def test_gaussian_params_echoed(self, tmp_path):
        assert run(*sim_args(tmp_path, profile="gauss")) == 0
        params = load_json(tmp_path / "summary.json")["params"]
        assert params["beta"] == pytest.approx(4342.94481903, rel=1e-9)
        assert params["peak_amplitude"] == pytest.approx(1.76860878450,
                                                         rel=1e-9)

    def test_zero_amplitude_keeps_ground_state(self, tmp_path):
        assert run(*sim_args(tmp_path, omega1=0.0, tauc=0.0)) == 0
        summary = load_json(tmp_path / "summary.json")
        assert summary["p_max"] == 0.0
        assert summary["p_final"] == 0.0

    def test_out_directory_is_created(self, tmp_path):
        nested = tmp_path / "x" / "y"
        assert run(*sim_args(nested)) == 0
        assert (nested / "summary.json").is_file()

    def test_duration_and_rate_conflict(self, tmp_path, capsys):
        assert run(*sim_args(tmp_path, rate=0.1)) == 2
        assert "exactly one" in capsys.readouterr().err

    def test_duration_or_rate_required(self, tmp_path, capsys):
        assert run(*sim_args(tmp_path, duration=None)) == 2
        assert "exactly one" in capsys.readouterr().err

    def test_missing_required_flag_is_named(self, tmp_path, capsys):
        assert run(*sim_args(tmp_path, tauc=None)) == 2
        assert "--tauc" in capsys.readouterr().err

    @pytest.mark.parametrize("over", [
        {"delta-omega": -5.0}, {"omega1": "abc"}, {"tauc": -1e-3},
        {"m0": 1.5}, {"cutoff-fraction": 1.0}, {"t1": 0.0},
        {"profile": "triangle"},
    ])
    def test_bad_values_exit_2(self, tmp_path, capsys, over):
        flag = next(iter(over))
        assert run(*sim_args(tmp_path, **over)) == 2
        assert f"--{flag}" in capsys.readouterr().err

    def test_too_few_samples(self, tmp_path, capsys):
        argv = sim_args(tmp_path)
        argv[argv.index("--samples") + 1] = "1"
        assert run(*argv) == 2
        assert "--samples" in capsys.readouterr().err

    def test_integration_failure_exit_3(self, tmp_path, capsys):
        assert run(*sim_args(tmp_path, tauc=1e15)) == 3
        assert "integration failed" in capsys.readouterr().err

    def test_unknown_flag_exit_2(self, tmp_path):
        assert run("simulate", "--bogus", "1") == 2

    def test_missing_command_exit_2(self):
        assert run() == 2


class TestConfig:
    def test_config_supplies_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# shared setup\n"
            "profile = rect\n"
            "delta-omega = 10\n"
            "omega1 = 1\n"
            "duration = 200\n"
            "tauc = 0.01\n"
            "ignored-key = whatever\n")
        flags_dir, cfg_dir = tmp_path / "a", tmp_path / "b"
        assert run(*sim_args(flags_dir, tauc=0.01)) == 0
        assert run("simulate", "--config", cfg, "--samples", "101",
                   "--out", cfg_dir) == 0
        assert filecmp.cmp(flags_dir / "trajectory.csv",
                           cfg_dir / "trajectory.csv", shallow=False)

    def test_cli_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("profile = rect\ndelta-omega = 10\nomega1 = 1\n"
                       "duration = 200\ntauc = 0.01\n")
        assert run("simulate", "--config", cfg, "--omega1", "2",
                   "--samples", "101", "--out", tmp_path) == 0
        params = load_json(tmp_path / "summary.json")["params"]
        assert params["omega1"] == 2.0

    def test_cli_rate_retires_config_duration(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("profile = rect\ndelta-omega = 10\nomega1 = 1\n"
                       "duration = 100\ntauc = 0.01\n")
        assert run("simulate", "--config", cfg, "--rate", "0.1",
                   "--samples", "101", "--out", tmp_path) == 0
        params = load_json(tmp_path / "summary.json")["params"]
        assert params["rate"] == 0.1
        assert params["duration"] == 200.0

    def test_malformed_line_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("profile rect\n")
        assert run("simulate", "--config", cfg, "--out", tmp_path) == 2
        assert "key = value" in capsys.readouterr().err

    def test_missing_config_exit_2(self, tmp_path, capsys):
        assert run("simulate", "--config", tmp_path / "nope.cfg",
                   "--out", tmp_path) == 2
        assert "cannot read" in capsys.readouterr().err


def sweep_args(out, **over):
    base = {"profile": "rect", "delta-omega": 10.0, "tauc": 0.0,
            "omega1-range": "0.5:1:2", "rate-range": "0.5:1:2"}
    base.update(over)
    argv = ["sweep"]
    for key, val in base.items():
        argv += [f"--{key}", str(val)]
    argv += ["--out", str(out)]
    return argv


class TestSweep:
    def test_contour_layout(self, tmp_path):
        assert run(*sweep_args(tmp_path)) == 0
        lines = read_lines(tmp_path / "contour.csv")
        assert lines[0] == "omega1,rate,p_max,t_peak_ms,p_final"
        assert len(lines) == 5
        # omega1-major ordering
        firsts = [line.split(",")[0] for line in lines[1:]]
        assert firsts == ["0.5", "0.5", "1", "1"]
        warnings = load_json(tmp_path / "warnings.json")
        assert warnings == {"warnings": []}

    def test_single_cell_matches_simulate(self, tmp_path):
        sweep_dir, sim_dir = tmp_path / "sweep", tmp_path / "sim"
        assert run(*sweep_args(sweep_dir, **{"omega1-range": "1:1:1",
                                             "rate-range": "0.5:0.5:1",
                                             "tauc": 0.01})) == 0
        assert run("simulate", "--profile", "rect", "--delta-omega", "10",
                   "--omega1", "1", "--rate", "0.5", "--tauc", "0.01",
                   "--out", sim_dir) == 0
        cells = read_lines(sweep_dir / "contour.csv")[1].split(",")
        summary = load_json(sim_dir / "summary.json")
        assert float(cells[2]) == summary["p_max"]
        assert float(cells[3]) == summary["t_peak_ms"]
        assert float(cells[4]) == summary["p_final"]

    def test_threads_do_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(*sweep_args(a)) == 0
        assert run(*(sweep_args(b) + ["--threads", "3"])) == 0
        assert filecmp.cmp(a / "contour.csv", b / "contour.csv",
                           shallow=False)

    def test_bad_range_exit_2(self, tmp_path, capsys):
        assert run(*sweep_args(tmp_path, **{"omega1-range": "2:1:5"})) == 2
        assert "--omega1-range" in capsys.readouterr().err

    def test_failing_cells_reported(self, tmp_path):
        assert run(*sweep_args(tmp_path, tauc=1e15,
                               **{"omega1-range": "1:1:1",
                                  "rate-range": "1:1:1"})) == 0
        warnings = load_json(tmp_path / "warnings.json")["warnings"]
        assert len(warnings) == 1
        cells = read_lines(tmp_path / "contour.csv")[1].split(",")
        assert cells[2] == "nan"


def write_contour(path, omega1, rates, p_max):
    lines = ["omega1,rate,p_max,t_peak_ms,p_final"]
    for i, w in enumerate(omega1):
        for j, r in enumerate(rates):
            lines.append(f"{w:.12g},{r:.12g},{p_max[i][j]:.12g},0,0")
    path.write_text("\n".join(lines) + "\n")


class TestRidgeFit:
    def test_synthetic_parabola_recovery(self, tmp_path):
        omega1 = [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
        targets = [0.5, 1.0, 1.5, 2.0, 2.5]
        rates = [2.0 * t ** 2 for t in targets]
        p = [[math.exp(-(w - t) ** 2) for t in targets] for w in omega1]
        write_contour(tmp_path / "contour.csv", omega1, rates, p)
        assert run("ridge-fit", "--contour", tmp_path / "contour.csv",
                   "--out", tmp_path) == 0
        fit = load_json(tmp_path / "fit.json")
        assert fit["k"] == pytest.approx(2.0, rel=1e-9)
        assert fit["stderr"] == 0.0
        assert fit["n_points"] == 5
        lines = read_lines(tmp_path / "ridge.csv")
        assert lines[0] == "rate,omega1_star"
        assert [line.split(",")[1] for line in lines[1:]] == \
            ["0.5", "1", "1.5", "2", "2.5"]

    def test_monotone_contour_exit_4(self, tmp_path, capsys):
        omega1 = [0.5, 1.0, 1.5, 2.0]
        rates = [1.0, 2.0, 3.0]
        p = [[w for _ in rates] for w in omega1]
        write_contour(tmp_path / "contour.csv", omega1, rates, p)
        assert run("ridge-fit", "--contour", tmp_path / "contour.csv",
                   "--out", tmp_path) == 4
        assert "insufficient ridge" in capsys.readouterr().err

    def test_degenerate_ridge_exit_4(self, tmp_path, capsys):
        omega1 = [0.5, 1.0, 1.5]
        rates = [1.0, 2.0, 3.0]
        p = [[0.1, 0.1, 0.1], [0.9, 0.9, 0.9], [0.2, 0.2, 0.2]]
        write_contour(tmp_path / "contour.csv", omega1, rates, p)
        assert run("ridge-fit", "--contour", tmp_path / "contour.csv",
                   "--out", tmp_path) == 4
        assert "degenerate" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path, capsys):
        assert run("ridge-fit", "--contour", tmp_path / "nope.csv",
                   "--out", tmp_path) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_missing_columns_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert run("ridge-fit", "--contour", bad, "--out", tmp_path) == 2
        assert "lacks column" in capsys.readouterr().err


class TestModel:
    def test_time_scan(self, tmp_path):
        assert run("model", "--scan", "time", "--omega1", "1",
                   "--delta-omega", "10", "--rate", "0.1", "--tauc", "0.01",
                   "--out", tmp_path) == 0
        meta = load_json(tmp_path / "model.json")
        assert meta["t_max_ms"] == pytest.approx(118.44751934494453,
                                                 rel=1e-9)
        assert meta["p_at_t_max"] == pytest.approx(0.6454966476754003,
                                                   rel=1e-9)
        assert meta["peak_omega1"] is None
        assert meta["duration"] == 200.0
        lines = read_lines(tmp_path / "model.csv")
        assert lines[0] == "x,value"
        assert len(lines) == 401
        assert lines[1].split(",")[0] == "0"
        assert lines[-1].split(",")[0] == "200"

    def test_omega1_scan_matches_asymptote_at_tiny_tauc(self, tmp_path):
        assert run("model", "--scan", "omega1", "--delta-omega", "50",
                   "--rate", "1", "--tauc", "1e-12",
                   "--omega1-range", "0.5:2:4", "--out", tmp_path) == 0
        lines = read_lines(tmp_path / "model.csv")[1:]
        for line in lines:
            w, val = (float(c) for c in line.split(","))
            assert val == pytest.approx(1.0 - math.exp(-math.pi * w * w / 2),
                                        abs=1e-6)
        meta = load_json(tmp_path / "model.json")
        assert meta["peak_omega1"] == 2.0
        assert meta["t_max_ms"] is None

    def test_zero_tauc_exit_2(self, tmp_path, capsys):
        assert run("model", "--scan", "time", "--omega1", "1",
                   "--delta-omega", "10", "--rate", "0.1", "--tauc", "0",
                   "--out", tmp_path) == 2
        assert "--tauc" in capsys.readouterr().err

    def test_time_scan_needs_omega1(self, tmp_path, capsys):
        assert run("model", "--scan", "time", "--delta-omega", "10",
                   "--rate", "0.1", "--tauc", "0.01", "--out", tmp_path) == 2
        assert "--omega1" in capsys.readouterr().err

    def test_nonpositive_omega1_exit_2(self, tmp_path, capsys):
        assert run("model", "--scan", "time", "--omega1", "-1",
                   "--delta-omega", "10", "--rate", "0.1", "--tauc", "0.01",
                   "--out", tmp_path) == 2
        assert "--omega1" in capsys.readouterr().err


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    """One simulate + sweep + ridge-fit + family run shared by plot tests."""
    root = tmp_path_factory.mktemp("artifacts")
    assert run(*sim_args(root / "traj")) == 0
    omega1 = [0.25, 0.5, 1.0, 1.5, 2.0]
    targets = [0.5, 1.0, 1.5]
    rates = [2.0 * t ** 2 for t in targets]
    p = [[math.exp(-(w - t) ** 2) for t in targets] for w in omega1]
    write_contour(root / "contour.csv", omega1, rates, p)
    assert run("ridge-fit", "--contour", root / "contour.csv",
               "--out", root) == 0
    assert run("family", "--delta-omega", "10", "--rate", "1",
               "--tauc-list", "0,0.01", "--omega1-range", "0.5:1.5:3",
               "--samples", "400", "--out", root / "fam") == 0
    return root


class TestFamily:
    def test_layout(self, artifacts):
        lines = read_lines(artifacts / "fam" / "family.csv")
        assert lines[0] == "omega1,tau_c,p_max,p_model"
        assert len(lines) == 7
        taucs = [line.split(",")[1] for line in lines[1:]]
        assert taucs == ["0", "0", "0", "0.01", "0.01", "0.01"]
        meta = load_json(artifacts / "fam" / "family.json")
        assert meta["tau_c_values"] == [0.0, 0.01]
        assert meta["warnings"] == []
        assert len(meta["peak_omega1_sim"]) == 2

    def test_bad_tauc_list_exit_2(self, tmp_path, capsys):
        assert run("family", "--delta-omega", "10", "--rate", "1",
                   "--tauc-list", "0,-1", "--out", tmp_path) == 2
        assert "--tauc-list" in capsys.readouterr().err

    def test_empty_tauc_list_exit_2(self, tmp_path, capsys):
        assert run("family", "--delta-omega", "10", "--rate", "1",
                   "--tauc-list", ",", "--out", tmp_path) == 2
        assert "empty list" in capsys.readouterr().err


class TestPlot:
    def test_population_script(self, artifacts, tmp_path):
        traj = artifacts / "traj" / "trajectory.csv"
        assert run("plot", "--kind", "population", "--trajectory", traj,
                   "--out", tmp_path) == 0
        script = (tmp_path / "population.gp").read_text()
        rel = os.path.relpath(traj, tmp_path)
        assert f"'{rel}'" in script
        assert "using 1:2" in script and "rho11" in script

    def test_bloch_script(self, artifacts, tmp_path):
        traj = artifacts / "traj" / "trajectory.csv"
        assert run("plot", "--kind", "bloch", "--trajectory", traj,
                   "--out", tmp_path) == 0
        script = (tmp_path / "bloch.gp").read_text()
        assert "using 6:7:8" in script
        assert "splot" in script

    def test_contour_script(self, artifacts, tmp_path):
        assert run("plot", "--kind", "contour",
                   "--contour", artifacts / "contour.csv",
                   "--ridge", artifacts / "ridge.csv",
                   "--out", tmp_path) == 0
        script = (tmp_path / "contour.gp").read_text()
        assert "with image" in script
        assert "fit k*x**2" in script

    def test_family_script(self, artifacts, tmp_path):
        assert run("plot", "--kind", "family",
                   "--family", artifacts / "fam" / "family.csv",
                   "--out", tmp_path) == 0
        script = (tmp_path / "family.gp").read_text()
        assert script.count("with points") == 2
        assert script.count("with lines") == 2
        assert "tau_c=0.01 model" in script

    def test_missing_input_exit_2(self, tmp_path, capsys):
        assert run("plot", "--kind", "population",
                   "--trajectory", tmp_path / "nope.csv",
                   "--out", tmp_path) == 2
        assert "file not found" in capsys.readouterr().err

    def test_omitted_input_exit_2(self, tmp_path, capsys):
        assert run("plot", "--kind", "contour", "--out", tmp_path) == 2
        assert "--contour" in capsys.readouterr().err
