"""Config round-trips, the experiment runner, and the command-line surface."""

import json
from dataclasses import replace

import numpy as np
import pytest

from pommkit import cli
from pommkit.experiment import (
    REFERENCE_CONFIG_TEXT,
    parse_config,
    reference_config,
    run_experiment,
    serialize_config,
)


class TestConfig:
    def test_round_trip_is_identity(self):
        cfg = parse_config(REFERENCE_CONFIG_TEXT)
        again = parse_config(serialize_config(cfg))
        assert again == cfg
        assert serialize_config(again) == serialize_config(cfg)

    def test_missing_section_rejected(self):
        with pytest.raises(ValueError):
            parse_config("[model]\nfamily = ssm\n")

    def test_decreasing_n_list_rejected(self):
        text = REFERENCE_CONFIG_TEXT.replace("n_list = 100 400 1600", "n_list = 400 100")
        with pytest.raises(ValueError):
            parse_config(text)

    def test_grid_must_cover_truth(self):
        text = REFERENCE_CONFIG_TEXT.replace("grid_hi = 0.9", "grid_hi = 0.4")
        with pytest.raises(ValueError):
            parse_config(text)

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            parse_config(REFERENCE_CONFIG_TEXT.replace("family = ssm", "family = arma"))


class TestRunner:
    def test_outputs_and_manifest(self, tmp_path):
        cfg = replace(reference_config(), n_list=(50, 100))
        res = run_experiment(cfg, out_dir=tmp_path / "out")
        names = {p.name for p in (tmp_path / "out").iterdir()}
        assert {"config.ini", "posterior_n50.csv", "posterior_n100.csv",
                "concentration.csv", "audit.jsonl", "manifest.txt"} <= names
        manifest = (tmp_path / "out" / "manifest.txt").read_text()
        assert f"seed {cfg.seed}" in manifest
        assert "config_sha256" in manifest
        assert len(res.posteriors) == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = replace(reference_config(), n_list=(50, 100))
        run_experiment(cfg, out_dir=tmp_path / "a")
        run_experiment(cfg, out_dir=tmp_path / "b")
        for p in sorted((tmp_path / "a").iterdir()):
            assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes(), p.name

    def test_initial_condition_variants(self):
        cfg = replace(reference_config(), n_list=(200,))
        res_st = run_experiment(cfg)
        res_pm = run_experiment(replace(cfg, init_true="pointmass 4.0 4.0"))
        m_st = [r.mass_outside for r in res_st.concentration if r.p == 5][0]
        m_pm = [r.mass_outside for r in res_pm.concentration if r.p == 5][0]
        assert abs(m_st - m_pm) < 0.2  # same order already at n = 200

    def test_threads_do_not_change_results(self):
        cfg = replace(reference_config(), n_list=(100,))
        a = run_experiment(cfg, threads=1)
        b = run_experiment(cfg, threads=4)
        np.testing.assert_array_equal(a.posteriors[0].log_mass, b.posteriors[0].log_mass)

    def test_improper_prior_supported(self):
        cfg = replace(reference_config(), n_list=(100,), prior="improper")
        res = run_experiment(cfg)
        assert abs(res.posteriors[0].masses().sum() - 1.0) < 1e-10


class TestCli:
    def write_config(self, tmp_path, n_list="20 40"):
        text = REFERENCE_CONFIG_TEXT.replace("n_list = 100 400 1600", f"n_list = {n_list}")
        path = tmp_path / "cfg.ini"
        path.write_text(text)
        return path

    def test_simulate_writes_trajectory(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path)
        out = tmp_path / "traj.csv"
        assert cli.main(["simulate", "--config", str(cfg), "--n", "10", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "k,x,y"
        assert len(lines) == 12  # header + z_0..z_10

    def test_simulate_deterministic(self, tmp_path):
        cfg = self.write_config(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["simulate", "--config", str(cfg), "--n", "10", "--out", str(a)])
        cli.main(["simulate", "--config", str(cfg), "--n", "10", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_loglik_from_simulated_and_file(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path)
        traj = tmp_path / "traj.csv"
        cli.main(["simulate", "--config", str(cfg), "--n", "10", "--out", str(traj)])
        capsys.readouterr()
        # feed back only the observed column, dropping z_0
        ys = [line.split(",")[2] for line in traj.read_text().strip().splitlines()[2:]]
        obs = tmp_path / "obs.csv"
        obs.write_text("\n".join(ys) + "\n")
        assert cli.main(["loglik", "--config", str(cfg), "--obs", str(obs)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("loglik ") and "method kalman" in out

    def test_posterior_n_zero_returns_prior(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path)
        assert cli.main(["posterior", "--config", str(cfg), "--n", "0"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "theta0,log_post"
        dens = np.array([float(l.split(",")[1]) for l in lines[1:]])
        # uniform prior: mass 1/181 per cell of width 0.01
        np.testing.assert_allclose(dens, np.log((1.0 / 181) / 0.01), atol=1e-12)

    def test_kld_glm_worked_value(self, capsys):
        rc = cli.main([
            "kld", "--family", "glm", "--p", "1", "--q", "1",
            "--phi-star", "0", "0", "0", "0", "--r-star", "1", "0", "0", "1",
            "--phi", "0", "0", "0", "0", "--r", "2", "0", "0", "2",
        ])
        assert rc == 0
        value = float(capsys.readouterr().out.split()[1])
        assert abs(value - 0.5 * (np.log(4) - 1)) < 1e-12

    def test_kld_sv(self, capsys):
        rc = cli.main(["kld", "--family", "sv", "--theta-star", "1", "0.5", "0.9", "--theta", "2", "0.5", "0.9"])
        assert rc == 0
        value = float(capsys.readouterr().out.split()[1])
        assert abs(value - (np.log(2) - 0.375)) < 1e-12

    def test_audit_b5_emits_two_records(self, tmp_path):
        out = tmp_path / "audit.jsonl"
        rc = cli.main([
            "audit", "--assumption", "B5", "--family", "sv",
            "--sims", "2000", "--seed", "1", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 2
        assumptions = {json.loads(l)["assumption"] for l in lines}
        assert assumptions == {"B5.conv", "B5.logmoment"}

    def test_experiment_command(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path)
        rc = cli.main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert rc == 0
        assert (tmp_path / "out" / "concentration.csv").exists()
        assert "mass_outside" in capsys.readouterr().out

    def test_unknown_flag_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["loglik", "--config", "x", "--bogus"])
