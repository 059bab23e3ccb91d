"""Command-line surface tests: exit codes, output format, config precedence.

Everything drives main(argv) in-process; no subprocesses are spawned.
"""

import json

import pytest

from ckptwin.analytic import daly_period, waste_nopred
from ckptwin.cli import main
from ckptwin.core import SECONDS_PER_YEAR, Platform
from ckptwin.harness import ResultRow, SweepRow, parse_csv

TINY_JSON = {
    "dist": "exp",
    "n_list": [4096],
    "i_list": [600.0],
    "n_reps": 2,
    "base_seed": 7,
}


def tiny_config(tmp_path, **extra):
    payload = dict(TINY_JSON, **extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalytic:
    def test_all_strategies_listed(self, capsys):
        code, out, _ = run(capsys, "--dist", "exp", "analytic", "--n", "65536")
        assert code == 0
        for name in ("daly", "rfo", "instant", "nockpti", "withckpti"):
            assert f"strategy={name}" in out

    def test_daly_line_matches_closed_form(self, capsys):
        code, out, _ = run(
            capsys, "--dist", "exp", "analytic", "--n", "65536", "--strategy", "daly"
        )
        assert code == 0
        fields = dict(
            pair.split("=", 1)
            for line in out.splitlines()
            for pair in line.split()
            if "=" in pair
        )
        platform = Platform(
            n_procs=65536, mu_ind=125.0 * SECONDS_PER_YEAR, c_regular=600.0,
            c_proactive=600.0, downtime=60.0, recovery=600.0,
        )
        t_daly = daly_period(platform.mtbf, platform.recovery, platform.c_regular)
        assert float(fields["t_regular_s"]) == t_daly
        assert float(fields["analytic_waste"]) == waste_nopred(t_daly, platform).waste

    def test_inapplicable_strategy_gets_status_line(self, capsys):
        code, out, _ = run(
            capsys, "--dist", "exp", "--cp-mode", "2",
            "analytic", "--n", "65536", "--i", "600",
        )
        assert code == 0
        line = next(l for l in out.splitlines() if "strategy=withckpti" in l)
        assert "status=" in line


class TestSimulate:
    def test_single_run_is_deterministic(self, capsys):
        args = (
            "--dist", "exp", "--seed", "9",
            "simulate", "--strategy", "rfo", "--n", "4096",
        )
        code_a, out_a, _ = run(capsys, *args)
        code_b, out_b, _ = run(capsys, *args)
        assert code_a == code_b == 0
        assert out_a == out_b
        assert "waste=" in out_a and "makespan_s=" in out_a

    def test_model_error_exit_code(self, capsys):
        code, _, err = run(
            capsys, "--dist", "exp", "--cp-mode", "2",
            "simulate", "--strategy", "withckpti", "--n", "65536", "--i", "600",
        )
        assert code == 2
        assert "model validity error" in err


class TestTable:
    def test_writes_csv(self, capsys, tmp_path):
        out_csv = tmp_path / "t.csv"
        code, out, _ = run(
            capsys, "--config", tiny_config(tmp_path), "--out", str(out_csv), "table"
        )
        assert code == 0
        assert f"wrote 5 rows to {out_csv}" in out
        rows = parse_csv(str(out_csv), ResultRow)
        assert len(rows) == 5
        assert {r.strategy for r in rows} == {
            "daly", "rfo", "instant", "nockpti", "withckpti",
        }

    def test_byte_identical_across_invocations(self, capsys, tmp_path):
        cfg = tiny_config(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, "--config", cfg, "--out", str(a), "table")[0] == 0
        assert run(capsys, "--config", cfg, "--out", str(b), "table")[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_drift_report_for_reference_cells(self, capsys, tmp_path):
        cfg = tiny_config(
            tmp_path, dist="weibull:0.7", n_list=[65536], i_list=[300.0],
            strategies=["daly"], n_reps=2,
        )
        out_csv = tmp_path / "ref.csv"
        code, out, _ = run(capsys, "--config", cfg, "--out", str(out_csv), "table")
        assert code == 0
        assert "reference_days=81.30" in out
        assert "abs_err_days=" in out


class TestSweep:
    def test_axis_values_and_skipped_cells(self, capsys, tmp_path):
        out_csv = tmp_path / "sw.csv"
        code, out, _ = run(
            capsys, "--config", tiny_config(tmp_path), "--cp-mode", "2",
            "--out", str(out_csv),
            "sweep", "--axis", "i", "--values", "600,3000",
        )
        assert code == 0
        rows = parse_csv(str(out_csv), SweepRow)
        assert len(rows) == 10
        # Cp = 1200 makes withckpti inapplicable inside a 600 s window
        skipped = [r for r in rows if r.status != "ok"]
        assert skipped and all(r.strategy == "withckpti" for r in skipped)
        assert "1 cells skipped" in out


class TestBestPeriod:
    def test_search_reports_both_periods(self, capsys):
        code, out, _ = run(
            capsys, "--dist", "exp", "--seed", "4",
            "best-period", "--strategy", "rfo", "--n", "4096",
            "--traces", "4", "--grid", "12", "--rounds", "1",
        )
        assert code == 0
        fields = dict(pair.split("=", 1) for pair in out.split())
        assert float(fields["searched_waste"]) <= float(fields["analytic_waste"]) + 5e-3


class TestExitCodes:
    def test_bad_distribution(self, capsys):
        code, _, err = run(capsys, "--dist", "weibull:zero", "analytic", "--n", "4096")
        assert code == 1
        assert "config error" in err

    def test_unknown_option(self, capsys):
        code, _, _ = run(capsys, "table", "--frobnicate")
        assert code == 1

    def test_missing_config_file(self, capsys):
        code, _, _ = run(capsys, "--config", "/no/such/file.json", "table")
        assert code == 1

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "--config", tiny_config(tmp_path),
            "--out", str(tmp_path / "missing_dir" / "t.csv"), "table",
        )
        assert code == 1
        assert "missing_dir" in err


class TestConfigPrecedence:
    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tiny_config(tmp_path, dist="weibull:0.7")
        out_csv = tmp_path / "t.csv"
        code, _, _ = run(
            capsys, "--config", cfg, "--dist", "exp", "--out", str(out_csv), "table"
        )
        assert code == 0
        rows = parse_csv(str(out_csv), ResultRow)
        assert all(r.dist == "exp" for r in rows)
        assert all(r.n_reps == 2 for r in rows)

    def test_unknown_file_key_rejected(self, capsys, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"dist": "exp", "mu": 1.0}))
        code, _, err = run(capsys, "--config", str(path), "table")
        assert code == 1
        assert "unknown config keys" in err
