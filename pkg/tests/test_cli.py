import os

import numpy as np
import pytest

from paracalc import cli
from paracalc import spectral as sp
from paracalc.cli import ExperimentConfig, ReportRow


def strip_timestamp(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("# generated ")
    return lines[1:]


class TestReportRow:
    def row(self, measured, expected, tol, bound=None):
        return ReportRow("x", 0, "p", "m", measured, expected, tol, bound=bound)

    def test_two_sided(self):
        assert self.row(1.05, 1.0, 0.1).passed
        assert not self.row(1.2, 1.0, 0.1).passed

    def test_lower_bound(self):
        assert self.row(0.95, 1.0, 0.1, bound="lower").passed
        assert self.row(5.0, 1.0, 0.1, bound="lower").passed
        assert not self.row(0.85, 1.0, 0.1, bound="lower").passed

    def test_upper_bound(self):
        assert self.row(1.05, 1.0, 0.1, bound="upper").passed
        assert not self.row(1.2, 1.0, 0.1, bound="upper").passed

    def test_csv_digits(self):
        line = self.row(1 / 3, 0.0, 1e-10).csv_line()
        assert "0.333333333333" in line  # 12 significant digits


class TestVerifyCommands:
    def test_algebra_passes(self, capsys):
        assert cli.main(["verify-algebra", "--L", "10"]) == 0
        out = capsys.readouterr().out
        assert "checks passed" in out

    def test_algebra_corruption_detected(self, capsys):
        assert cli.main(["verify-algebra", "--L", "10", "--corrupt-coproduct"]) != 0

    def test_corruption_hook_restores(self):
        from paracalc import hopf

        original = hopf.coproduct
        cli.main(["verify-algebra", "--L", "10", "--corrupt-coproduct"])
        assert hopf.coproduct is original

    def test_analysis_passes(self, capsys, tmp_path):
        out = tmp_path / "analysis.csv"
        code = cli.main(["verify-analysis", "--L", "10", "--seeds", "1", "--out", str(out)])
        assert code == 0
        lines = strip_timestamp(out)
        assert lines[0] == cli.CSV_HEADER
        assert all(line.endswith(",true") for line in lines[1:])

    def test_analysis_identities_hold_on_small_grid(self, capsys):
        # exact identities are grid-size independent
        assert cli.main(["verify-analysis", "--L", "8", "--seeds", "1"]) == 0


class TestScaling:
    def test_omega_quick(self, tmp_path):
        out = tmp_path / "om.csv"
        code = cli.main([
            "scaling", "--experiment", "omega", "--alpha", "0.3,0.4",
            "--L", "10", "--seeds", "2", "--out", str(out),
        ])
        assert code == 0
        lines = strip_timestamp(out)
        # per-seed rows plus the aggregate
        assert len(lines) == 1 + 3

    def test_unknown_experiment(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("experiment = bogus\n")
        assert cli.main(["scaling", "--config", str(cfg), "--L", "10"]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_missing_experiment(self, capsys):
        assert cli.main(["scaling", "--L", "10"]) == 2

    def test_invalid_exponents_named(self, capsys):
        code = cli.main([
            "scaling", "--experiment", "commutator", "--beta", "0.9",
            "--alpha", "0.5", "--gamma", "-0.2", "--L", "10",
        ])
        assert code == 2
        err = capsys.readouterr().err
        assert "beta + sum(alpha)" in err

    def test_determinism_modulo_timestamp(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["scaling", "--experiment", "omega", "--alpha", "0.3,0.4",
                "--L", "10", "--seeds", "2"]
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert strip_timestamp(a) == strip_timestamp(b)


class TestSynthDecompose:
    def test_round_trip(self, tmp_path):
        synth_out = tmp_path / "f.csv"
        blocks_out = tmp_path / "blocks.csv"
        assert cli.main([
            "synth", "--alpha", "0.5", "--L", "10", "--seed", "3", "--out", str(synth_out),
        ]) == 0
        lines = strip_timestamp(synth_out)
        assert lines[0] == "index,x,value"
        assert len(lines) == 1 + 1024

        assert cli.main(["decompose", "--input", str(synth_out), "--out", str(blocks_out)]) == 0
        block_lines = strip_timestamp(blocks_out)
        assert block_lines[0] == "j,block_sup"
        grid = sp.Grid(10)
        expected_rows = sp.default_partition(grid).n_blocks
        assert len(block_lines) == 1 + expected_rows

        # the sampled function reconstructs from its blocks
        values = [float(l.split(",")[2]) for l in lines[1:]]
        f = sp.GridFunction(grid, values)
        dec = sp.decompose(f)
        assert np.max(np.abs(dec.blocks.sum(axis=0) - f.samples)) <= 1e-12 * f.sup()

    def test_synth_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for target in (a, b):
            cli.main(["synth", "--alpha", "0.5", "--L", "10", "--seed", "7", "--out", str(target)])
        assert strip_timestamp(a) == strip_timestamp(b)

    def test_decompose_rejects_bad_length(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("index,x,value\n0,0.0,1.0\n1,0.1,2.0\n2,0.2,3.0\n")
        assert cli.main(["decompose", "--input", str(bad)]) == 2


class TestConfigPlumbing:
    def test_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("# comment\nexperiment = omega\nL = 10\nalpha = 0.3,0.4\nseeds = 2\n")
        out = tmp_path / "r.csv"
        assert cli.main(["scaling", "--config", str(cfg), "--out", str(out)]) == 0
        lines = strip_timestamp(out)
        assert "L=10" in lines[1]

    def test_env_var(self, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("experiment = omega\nL = 10\nalpha = 0.3,0.4\nseeds = 2\n")
        monkeypatch.setenv("PARACALC_CONFIG", str(cfg))
        assert cli.main(["scaling"]) == 0

    def test_cli_overrides_config(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("experiment = omega\nL = 10\nalpha = 0.3,0.4\nseeds = 2\n")
        out = tmp_path / "r.csv"
        assert cli.main(["scaling", "--config", str(cfg), "--L", "11", "--out", str(out)]) == 0
        assert "L=11" in strip_timestamp(out)[1]

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("experiment omega\n")
        assert cli.main(["scaling", "--config", str(cfg)]) == 2

    def test_config_parsing_units(self):
        cfg = ExperimentConfig(alphas=(0.3, 0.4), L=10)
        assert "alpha=0.3|0.4" in cfg.params_text()
        assert cfg.grid().size == 1024
