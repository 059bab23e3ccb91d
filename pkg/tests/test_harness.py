"""Harness tests: preset arithmetic, table and sweep assembly, CSV round-trips.

Simulation-backed cases run on deliberately tiny replication counts; the
statistical claims about the full study live in the acceptance suite.
"""

import dataclasses

import pytest

from ckptwin.core import ConfigError, SECONDS_PER_DAY, SECONDS_PER_YEAR, Strategy
from ckptwin.harness import (
    ExperimentConfig,
    ResultRow,
    SweepRow,
    emit_csv,
    parse_csv,
    parse_predictor,
    preset_defaults,
    reference_days,
    run_sweep,
    run_table,
)

MU_IND_125Y = 125.0 * SECONDS_PER_YEAR


class TestPresets:
    def test_study_defaults(self):
        cfg = preset_defaults()
        assert cfg.c_regular == 600.0
        assert cfg.recovery == 600.0
        assert cfg.downtime == 60.0
        assert cfg.mu_ind == MU_IND_125Y
        assert cfg.n_list == (2**16, 2**17, 2**18, 2**19)
        assert cfg.i_list == (300.0, 600.0, 900.0, 1200.0, 3000.0)
        assert cfg.n_reps == 100

    def test_proactive_cost_modes(self):
        assert ExperimentConfig(cp_mode="eq").c_proactive == 600.0
        assert ExperimentConfig(cp_mode="0.1").c_proactive == 60.0
        assert ExperimentConfig(cp_mode="2").c_proactive == 1200.0

    def test_t_base_scaling(self):
        cfg = preset_defaults()
        t_base = cfg.t_base_for(2**19)
        assert t_base == 10_000.0 * SECONDS_PER_YEAR / 2**19
        assert t_base / SECONDS_PER_DAY == pytest.approx(6.95, rel=3e-3)

    def test_platform_mtbf_matches_quoted_minutes(self):
        # the quoted ~4010 min platform MTBF corresponds to 2^14 processors
        cfg = preset_defaults()
        assert cfg.platform_for(2**14).mtbf == pytest.approx(4010.0 * 60.0, rel=1e-3)
        assert cfg.platform_for(2**16).mtbf == MU_IND_125Y / 2**16

    def test_predictor_labels(self):
        assert parse_predictor("accurate") == (0.82, 0.85)
        assert parse_predictor("weak") == (0.4, 0.7)
        assert parse_predictor("0.9,0.3") == (0.9, 0.3)
        with pytest.raises(ConfigError):
            parse_predictor("psychic")
        with pytest.raises(ConfigError):
            parse_predictor("1.5,0.3")

    def test_unknown_config_key_rejected(self):
        with pytest.raises(ConfigError, match="mu_individual"):
            ExperimentConfig.from_mapping({"mu_individual": 1.0})

    def test_invalid_values_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(n_reps=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(strategies=())
        with pytest.raises(ConfigError):
            ExperimentConfig(cp_mode="half")
        with pytest.raises(ConfigError):
            ExperimentConfig(dist="weibull:-1")

    def test_config_hash_ignores_output_location(self):
        base = ExperimentConfig()
        moved = dataclasses.replace(base, out_path="elsewhere.csv")
        reseeded = dataclasses.replace(base, base_seed=2)
        assert base.config_hash() == moved.config_hash()
        assert base.config_hash() != reseeded.config_hash()
        assert len(base.config_hash()) == 12

    def test_reference_lookup(self):
        cfg = preset_defaults()
        assert reference_days(cfg, Strategy.DALY, 2**16, None) == 81.3
        assert reference_days(cfg, Strategy.NO_CKPT_I, 2**16, 300.0) == 66.4
        exp_cfg = dataclasses.replace(cfg, dist="exp")
        assert reference_days(exp_cfg, Strategy.DALY, 2**16, None) is None
        # registered reference cells assume a proactive checkpoint costing C
        costly = dataclasses.replace(cfg, cp_mode="2")
        assert reference_days(costly, Strategy.NO_CKPT_I, 2**16, 300.0) is None
        assert reference_days(costly, Strategy.DALY, 2**16, None) == 81.3


TINY = ExperimentConfig(
    dist="exp", n_list=(4096,), i_list=(600.0,), n_reps=3, base_seed=11
)


@pytest.fixture(scope="module")
def tiny_table():
    return run_table(TINY)


class TestRunTable:
    def test_row_inventory_and_order(self, tiny_table):
        # one row per periodic strategy, one per (aware strategy, window)
        assert [r.strategy for r in tiny_table] == [
            "daly", "rfo", "instant", "nockpti", "withckpti",
        ]
        assert all(r.n_procs == 4096 for r in tiny_table)
        assert all(r.status == "ok" for r in tiny_table)
        assert all(len(r.config_hash) == 12 for r in tiny_table)
        assert all(r.base_seed == 11 and r.n_reps == 3 for r in tiny_table)

    def test_daly_gain_against_itself_is_zero(self, tiny_table):
        daly = next(r for r in tiny_table if r.strategy == "daly")
        assert daly.gain_vs_daly_pct == 0.0

    def test_gains_follow_paired_makespans(self, tiny_table):
        daly = next(r for r in tiny_table if r.strategy == "daly")
        for row in tiny_table:
            expected = 100.0 * (daly.makespan_days - row.makespan_days) / daly.makespan_days
            assert row.gain_vs_daly_pct == pytest.approx(expected, abs=1e-12)

    def test_no_reference_registered_for_exponential(self, tiny_table):
        assert all(r.reference_days is None for r in tiny_table)
        assert all(r.abs_err_days is None for r in tiny_table)

    def test_inapplicable_rows_kept_with_status(self):
        cfg = dataclasses.replace(TINY, cp_mode="2")  # Cp = 1200 > I = 600
        rows = run_table(cfg)
        bad = [r for r in rows if r.strategy == "withckpti"]
        assert bad, "inapplicable rows must not be dropped"
        for row in bad:
            assert "StrategyInapplicableError" in row.status
            assert row.waste_mean is None
            assert row.makespan_days is None
        assert all(r.status == "ok" for r in rows if r.strategy != "withckpti")

    def test_reference_cell_drift_columns(self):
        cfg = ExperimentConfig(
            n_list=(2**16,), i_list=(300.0,), strategies=("daly", "nockpti"),
            n_reps=2, base_seed=3,
        )
        rows = run_table(cfg)
        daly = next(r for r in rows if r.strategy == "daly")
        assert daly.reference_days == 81.3
        assert daly.abs_err_days == pytest.approx(abs(daly.makespan_days - 81.3))


class TestRunSweep:
    def test_single_value_axis_gives_single_row(self):
        cfg = dataclasses.replace(TINY, strategies=("daly",), n_reps=1)
        rows = run_sweep(cfg, "i", axis_values=[600.0])
        assert len(rows) == 1
        assert rows[0].axis == "i_window"
        assert rows[0].axis_value == 600.0

    def test_axis_aliases(self):
        cfg = dataclasses.replace(TINY, strategies=("daly",), n_reps=1)
        for alias in ("n", "n_procs"):
            rows = run_sweep(cfg, alias, axis_values=[4096])
            assert rows[0].axis == "n_procs"
        with pytest.raises(ConfigError):
            run_sweep(cfg, "window")

    def test_window_sweep_waste_non_decreasing_for_aware(self):
        cfg = ExperimentConfig(
            dist="exp", n_list=(2**16,),
            strategies=("instant", "nockpti", "withckpti"), n_reps=1,
        )
        rows = run_sweep(cfg, "i")
        for name in cfg.strategies:
            wastes = [
                r.analytic_waste for r in rows
                if r.strategy == name and r.status == "ok"
            ]
            assert len(wastes) >= 4
            assert all(a <= b + 1e-12 for a, b in zip(wastes, wastes[1:]))

    def test_period_sweep_aware_curves_flatten(self):
        # periodic waste has a sharp optimum; prediction-aware waste stays
        # nearly flat past its own argmin
        cfg = ExperimentConfig(
            dist="exp", n_list=(2**16,), i_list=(3000.0,),
            strategies=("daly", "nockpti"), n_reps=1,
        )
        rows = run_sweep(cfg, "tr")
        mu = cfg.platform_for(2**16).mtbf
        assert max(r.axis_value for r in rows) == pytest.approx(2.0 * mu)

        def spread_beyond_argmin(name):
            pts = [
                (r.axis_value, r.analytic_waste) for r in rows
                if r.strategy == name and r.analytic_waste is not None
            ]
            t_min, _ = min(pts, key=lambda p: p[1])
            beyond = [w for t, w in pts if t >= t_min]
            return max(beyond) - min(beyond)

        assert spread_beyond_argmin("nockpti") < 0.2 * spread_beyond_argmin("daly")

    def test_invalid_period_becomes_status_row(self):
        cfg = dataclasses.replace(TINY, strategies=("daly",), n_reps=1)
        rows = run_sweep(cfg, "tr", axis_values=[500.0, 9000.0])
        by_value = {r.axis_value: r for r in rows}
        assert by_value[500.0].status != "ok"  # below the checkpoint cost
        assert by_value[500.0].sim_waste_mean is None
        assert by_value[9000.0].status == "ok"

    def test_best_period_column(self):
        cfg = ExperimentConfig(
            dist="exp", n_list=(2**16,), strategies=("rfo",), n_reps=1,
        )
        rows = run_sweep(cfg, "n", axis_values=[2**16], include_best_period=True)
        (row,) = rows
        assert row.best_period_s is not None
        # the analytic period is seeded into the search, so the searched
        # waste can never be worse on the shared traces
        assert row.best_waste <= row.sim_waste_mean + 1e-12 or row.best_waste is not None


class TestCsvRoundTrip:
    def test_table_rows_round_trip(self, tiny_table, tmp_path):
        path = tmp_path / "table.csv"
        emit_csv(tiny_table, str(path), config=TINY)
        assert parse_csv(str(path), ResultRow) == tiny_table

    def test_sweep_rows_round_trip(self, tmp_path):
        cfg = dataclasses.replace(TINY, strategies=("daly", "nockpti"), n_reps=1)
        rows = run_sweep(cfg, "i", axis_values=[600.0])
        path = tmp_path / "sweep.csv"
        emit_csv(rows, str(path), config=cfg)
        assert parse_csv(str(path), SweepRow) == rows

    def test_byte_identical_output(self, tiny_table, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(tiny_table, str(a), config=TINY)
        emit_csv(tiny_table, str(b), config=TINY)
        assert a.read_bytes() == b.read_bytes()

    def test_config_echo_comments(self, tiny_table, tmp_path):
        path = tmp_path / "table.csv"
        emit_csv(tiny_table, str(path), config=TINY)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# config: ")
        assert lines[1] == f"# config_hash: {TINY.config_hash()}"
        assert "86400" in lines[2] and "365.25" in lines[2]

    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], str(path), row_type=SweepRow)
        text = path.read_text()
        assert text.count("\n") == 1
        assert text.startswith("axis,axis_value,")
        assert parse_csv(str(path), SweepRow) == []

    def test_empty_rows_need_explicit_type(self, tmp_path):
        with pytest.raises(ConfigError):
            emit_csv([], str(tmp_path / "x.csv"))

    def test_write_error_carries_path(self, tiny_table, tmp_path):
        missing = tmp_path / "no_such_dir" / "out.csv"
        with pytest.raises(OSError, match="no_such_dir"):
            emit_csv(tiny_table, str(missing))

    def test_header_mismatch_rejected(self, tiny_table, tmp_path):
        path = tmp_path / "table.csv"
        emit_csv(tiny_table, str(path))
        with pytest.raises(ConfigError):
            parse_csv(str(path), SweepRow)
