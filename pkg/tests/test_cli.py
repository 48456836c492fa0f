import json
import math
import xml.etree.ElementTree as ET

import pytest

from src.cli.app import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, RunConfig, main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    assert code == EXIT_OK
    return json.loads(out)


class TestSpectral:
    def test_eigen_uniform_four(self, capsys):
        payload = run_json(capsys, ["eigen", "--n", "4", "--kappa", "0"])
        assert payload["n"] == 4
        assert payload["eigenvalues"] == pytest.approx([1.0, 0.5, 0.0, 0.5], abs=1e-12)
        assert payload["alpha"] == pytest.approx(0.5, abs=1e-14)

    def test_eigen_reports_stability(self, capsys):
        payload = run_json(capsys, ["eigen", "--n", "4", "--kappa", "0"])
        stability = payload["stability"]
        assert stability["verdict"] == "stable"
        assert stability["F"] == pytest.approx(0.5, abs=1e-12)
        assert stability["bound"] == 1.0
        assert stability["m_star"] == 2
        assert stability["lambda_min"] == pytest.approx(0.0, abs=1e-12)

    def test_eigen_csv(self, capsys):
        assert main(["eigen", "--n", "3", "--kappa", "2", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,kappa,F,bound,m_star,lambda_min,verdict"
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert fields[0] == "3" and fields[1] == "2" and fields[4] == "1"
        assert fields[-1] == "stable"

    def test_critical_kappa_no_root(self, capsys):
        payload = run_json(capsys, ["critical-kappa", "--n", "8", "--kappa-max", "100"])
        assert payload["status"] == "no_root"
        assert payload["kappa_c"] is None
        assert payload["max_F"] < payload["bound"]

    def test_fscan_columns(self, capsys):
        assert main(["fscan", "--n", "4", "--nk", "3", "--kappa-max", "2"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "kappa,lambda_min,F,bound,lower_boundary,upper_reference"
        assert len(lines) == 4
        assert lines[1].startswith("0,")

    def test_jacobian_report(self, capsys):
        payload = run_json(capsys, ["jacobian", "--n", "5", "--density", "uniform"])
        assert len(payload["matrix"]) == 5
        assert payload["fd_max_deviation"] < 1e-6
        assert payload["diagnostics"]["residual_intrinsic"] < 1e-12


class TestOrbits:
    def test_sweep_reproducible(self, tmp_path):
        argv = ["sweep", "--n", "4", "--nk", "3", "--kappa-max", "4", "--iters", "20",
                "--trans", "15", "--seed", "5"]
        assert main(argv + ["--out", str(tmp_path / "a.csv")]) == EXIT_OK
        assert main(argv + ["--out", str(tmp_path / "b.csv")]) == EXIT_OK
        a = (tmp_path / "a.csv").read_bytes()
        assert a == (tmp_path / "b.csv").read_bytes()
        lines = a.decode().splitlines()
        assert lines[0] == "kappa,t,j,angle"
        assert len(lines) == 1 + 3 * 5 * 4

    def test_sweep_svg(self, tmp_path):
        path = tmp_path / "figs" / "sweep.svg"
        argv = ["sweep", "--n", "3", "--nk", "2", "--iters", "10", "--trans", "5",
                "--format", "svg", "--out", str(path)]
        assert main(argv) == EXIT_OK
        assert ET.parse(path).getroot().tag.endswith("svg")

    def test_svg_summary_on_stderr(self, tmp_path, capsys):
        path = tmp_path / "trace.svg"
        argv = ["sala", "--density", "uniform", "--n", "4", "--format", "svg", "--out", str(path)]
        assert main(argv) == EXIT_OK
        err = capsys.readouterr().err
        assert f"wrote {path}:" in err
        drawn, dropped = (int(s.split()[0]) for s in err.strip().rsplit(": ", 1)[-1].split(", "))
        assert drawn + dropped > 0

    def test_lyapunov_header(self, capsys):
        argv = ["lyapunov", "--n", "3", "--nk", "2", "--kappa-max", "1", "--iters", "5",
                "--trans", "5"]
        assert main(argv) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "kappa,lambda_1,lambda_2,lambda_3,transverse_max"
        assert len(lines) == 3

    def test_sala_uniform_converges(self, capsys):
        payload = run_json(capsys, ["sala", "--density", "uniform", "--n", "6",
                                    "--format", "json"])
        assert payload["status"] == "converged"
        assert payload["perturbations"] == []
        assert len(payload["terminal"]) == 6
        assert payload["rows"][-1]["residual"] < 1e-9

    def test_step_at_fixed_point(self, capsys):
        payload = run_json(capsys, ["step", "--n", "4", "--density", "uniform"])
        assert payload["residual"] < 1e-12
        assert payload["image"] == pytest.approx(payload["points"], abs=1e-12)

    def test_step_reports_symmetry(self, capsys):
        payload = run_json(capsys, ["step", "--n", "5", "--density", "uniform"])
        symmetry = payload["symmetry"]
        assert symmetry["residual_intrinsic"] < 1e-12
        assert symmetry["fd_max_deviation"] < 1e-6
        assert "orbit" not in payload

    def test_step_orbit_csv(self, capsys):
        argv = ["step", "--n", "4", "--kappa", "1", "--random", "--seed", "3",
                "--iters", "6", "--format", "csv"]
        assert main(argv) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "t,j,angle,residual,distortion"
        assert len(lines) == 1 + 7 * 4
        assert lines[1].startswith("0,0,") and lines[1].split(",")[3] == "nan"
        assert lines[-1].startswith("6,3,")

    def test_step_orbit_json(self, capsys):
        payload = run_json(capsys, ["step", "--n", "3", "--density", "uniform", "--iters", "2"])
        assert len(payload["orbit"]) == 3 * 3
        assert payload["orbit"][-1]["t"] == 2

    def test_step_csv_needs_iters(self, capsys):
        assert main(["step", "--n", "3", "--format", "csv"]) == EXIT_USAGE

    def test_distortion_uniform(self, capsys):
        payload = run_json(capsys, ["distortion", "--n", "4", "--density", "uniform"])
        assert payload["distortion"] == pytest.approx(math.pi ** 2 / 48, rel=1e-12)

    def test_step_random_is_seeded(self, capsys):
        argv = ["step", "--n", "5", "--kappa", "2", "--random", "--seed", "9"]
        first = run_json(capsys, argv)
        second = run_json(capsys, argv)
        assert first == second


class TestExitCodes:
    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK

    def test_unknown_flag(self, capsys):
        assert main(["eigen", "--bogus"]) == EXIT_USAGE

    def test_missing_subcommand(self, capsys):
        assert main([]) == EXIT_USAGE

    def test_eta_not_above_epsilon(self, capsys):
        argv = ["sala", "--n", "4", "--epsilon", "1e-3", "--eta", "1e-4"]
        assert main(argv) == EXIT_USAGE

    def test_svg_needs_out(self, capsys):
        assert main(["fscan", "--format", "svg"]) == EXIT_USAGE

    def test_unsupported_format(self, capsys):
        assert main(["jacobian", "--format", "csv"]) == EXIT_USAGE

    def test_kappa_range_order(self, capsys):
        assert main(["fscan", "--kappa-min", "5", "--kappa-max", "1"]) == EXIT_USAGE

    def test_trans_not_below_iters(self, capsys):
        assert main(["sweep", "--iters", "10", "--trans", "10"]) == EXIT_USAGE

    def test_degenerate_points(self, capsys):
        assert main(["step", "--points", "0,0,1"]) == EXIT_FAILURE
        assert "DegenerateConfigurationError" in capsys.readouterr().err

    def test_points_out_of_range(self, capsys):
        assert main(["distortion", "--points", "0,7"]) == EXIT_FAILURE

    def test_unknown_log_level_is_tolerated(self, capsys, monkeypatch):
        monkeypatch.setenv("CIRCLOYD_LOG", "loud")
        assert main(["eigen", "--n", "2"]) == EXIT_OK


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig(command="fscan")
        assert cfg.n == 8
        assert cfg.grid()[-1] == 10.0
        assert len(cfg.grid()) == 20

    def test_sala_settings(self):
        cfg = RunConfig(command="sala", window=3, tmax=50)
        sala = cfg.sala()
        assert (sala.window_L, sala.t_max) == (3, 50)
