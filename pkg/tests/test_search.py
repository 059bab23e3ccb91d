"""Tests for the brute-force period search.

The analytic searcher is checked against the closed-form extremal periods
(they must agree to within the refined grid resolution); the simulated
searcher is checked for determinism, refinement monotonicity, and dominance
over the closed-form periods on shared traces.
"""

import math

import pytest

from ckptwin.analytic import daly_period, rfo_period, tr_extr_instant, tr_extr_window
from ckptwin.core import ConfigError, Platform, PolicyConfig, Predictor, Strategy
from ckptwin.engine import ReplicationConfig, simulate
from ckptwin.search import (
    SearchFailureError,
    SearchSpec,
    best_period,
    best_period_analytic,
    default_search_spec,
    make_trace_set,
)
from ckptwin.tracegen import DistKind, FaultDistribution, Trace

PLATFORM = Platform(
    n_procs=1,
    mu_ind=240600.0,
    c_regular=600.0,
    c_proactive=600.0,
    downtime=60.0,
    recovery=600.0,
)
ACCURATE = Predictor(precision=0.82, recall=0.85, window=600.0)
EXP_DIST = FaultDistribution(DistKind.EXPONENTIAL, 240600.0)

ANALYTIC_SPEC = SearchSpec(t_r_range=(660.0, 20.0 * 240600.0))


def sim_spec(predictor, t_base=1.2e6, n_traces=10, base_seed=900, **kwargs):
    config = ReplicationConfig(
        platform=PLATFORM, dist=EXP_DIST, t_base=t_base, predictor=predictor
    )
    return SearchSpec(
        t_r_range=kwargs.pop("t_r_range", (660.0, t_base)),
        n_grid=kwargs.pop("n_grid", 24),
        refinement_rounds=kwargs.pop("refinement_rounds", 2),
        refine_grid=kwargs.pop("refine_grid", 12),
        trace_set=make_trace_set(config, n_traces, base_seed),
        t_base=t_base,
        **kwargs,
    )


class TestSpecValidation:
    def test_inverted_range_rejected(self):
        with pytest.raises(ConfigError):
            SearchSpec(t_r_range=(2000.0, 1000.0))

    def test_tiny_grid_rejected(self):
        with pytest.raises(ConfigError):
            SearchSpec(t_r_range=(660.0, 5000.0), n_grid=2)

    def test_range_must_clear_checkpoint_cost(self):
        spec = SearchSpec(t_r_range=(500.0, 5000.0))
        with pytest.raises(ConfigError):
            best_period_analytic(Strategy.DALY, PLATFORM, None, spec)

    def test_default_spec_uses_platform_bounds(self):
        config = ReplicationConfig(
            platform=PLATFORM, dist=EXP_DIST, t_base=1.0e7, predictor=None
        )
        spec = default_search_spec(config, base_seed=1, n_traces=2)
        assert spec.t_r_range == (660.0, 20.0 * 240600.0)
        assert spec.n_grid == 64
        assert spec.refinement_rounds == 3
        assert len(spec.trace_set) == 2


class TestAnalyticSearch:
    def test_periodic_strategies_find_rfo_period(self):
        expected = rfo_period(240600.0, 60.0, 600.0, 600.0)
        for strategy in (Strategy.DALY, Strategy.RFO):
            t_star, w_star = best_period_analytic(
                strategy, PLATFORM, None, ANALYTIC_SPEC
            )
            assert t_star == pytest.approx(expected, rel=1e-3)
            assert 0.0 < w_star < 1.0

    def test_window_strategies_find_tr_extr_window(self):
        expected = tr_extr_window(PLATFORM, ACCURATE).seconds
        for strategy in (Strategy.NO_CKPT_I, Strategy.WITH_CKPT_I):
            t_star, _ = best_period_analytic(strategy, PLATFORM, ACCURATE, ANALYTIC_SPEC)
            assert t_star == pytest.approx(expected, rel=1e-3)

    def test_instant_finds_tr_extr_instant(self):
        expected = tr_extr_instant(PLATFORM, ACCURATE).seconds
        t_star, _ = best_period_analytic(Strategy.INSTANT, PLATFORM, ACCURATE, ANALYTIC_SPEC)
        assert t_star == pytest.approx(expected, rel=1e-3)

    def test_zero_recall_degenerates_to_rfo_period(self):
        blind = Predictor(precision=0.82, recall=0.0, window=600.0)
        expected = rfo_period(240600.0, 60.0, 600.0, 600.0)
        t_star, _ = best_period_analytic(Strategy.NO_CKPT_I, PLATFORM, blind, ANALYTIC_SPEC)
        assert t_star == pytest.approx(expected, rel=1e-3)

    def test_all_candidates_invalid_raises(self):
        # Periods beyond the MTBF leave the model's validity region everywhere.
        hostile = Platform(1, 2000.0, 600.0, 600.0, 60.0, 600.0)
        spec = SearchSpec(t_r_range=(1.0e5, 1.0e6), n_grid=4, refinement_rounds=0)
        with pytest.raises(SearchFailureError):
            best_period_analytic(Strategy.DALY, hostile, None, spec)

    def test_missing_predictor_rejected(self):
        with pytest.raises(ConfigError):
            best_period_analytic(Strategy.INSTANT, PLATFORM, None, ANALYTIC_SPEC)


class TestSimulatedSearch:
    def test_fault_free_prefers_upper_bound(self):
        quiet = Trace(events=(), horizon=math.inf, seed=0)
        spec = SearchSpec(
            t_r_range=(660.0, 10000.0),
            n_grid=16,
            refinement_rounds=2,
            refine_grid=8,
            trace_set=(quiet,),
            t_base=1.0e6,
        )
        t_star, w_star = best_period(Strategy.DALY, PLATFORM, None, spec)
        # Checkpointing only hurts without faults, up to plateau ties in the
        # integer checkpoint count.
        assert t_star == pytest.approx(10000.0, rel=0.02)
        at_bound = simulate(
            PolicyConfig(Strategy.DALY, 10000.0), quiet, 1.0e6, PLATFORM
        )
        assert w_star == at_bound.waste

    def test_dominates_closed_form_periods_on_shared_traces(self):
        mu = PLATFORM.mtbf
        t_daly = daly_period(mu, PLATFORM.recovery, PLATFORM.c_regular)
        t_rfo = rfo_period(mu, PLATFORM.downtime, PLATFORM.recovery, PLATFORM.c_regular)
        spec = sim_spec(None, extra_candidates=(t_daly, t_rfo))
        t_star, w_star = best_period(Strategy.DALY, PLATFORM, None, spec)

        def mean_waste(t_r):
            policy = PolicyConfig(Strategy.DALY, t_r)
            wastes = [
                simulate(policy, trace, spec.t_base, PLATFORM).waste
                for trace in spec.trace_set
            ]
            return sum(wastes) / len(wastes)

        assert w_star <= mean_waste(t_daly) + 1e-12
        assert w_star <= mean_waste(t_rfo) + 1e-12
        assert w_star == pytest.approx(mean_waste(t_star), rel=1e-12)

    def test_prediction_aware_lands_near_tr_extr(self):
        spec = sim_spec(ACCURATE, base_seed=950)
        t_star, w_star = best_period(Strategy.NO_CKPT_I, PLATFORM, ACCURATE, spec)
        analytic = tr_extr_window(PLATFORM, ACCURATE).seconds

        policy = PolicyConfig(Strategy.NO_CKPT_I, analytic)
        at_analytic = [
            simulate(policy, trace, spec.t_base, PLATFORM).waste
            for trace in spec.trace_set
        ]
        # Simulated optimum within one waste point of the closed-form period.
        assert w_star <= sum(at_analytic) / len(at_analytic) + 1e-12
        assert abs(sum(at_analytic) / len(at_analytic) - w_star) < 0.01

    def test_refinement_never_worse_than_coarse_pass(self):
        coarse = sim_spec(None, refinement_rounds=0)
        refined = sim_spec(None, refinement_rounds=2)
        _, w_coarse = best_period(Strategy.RFO, PLATFORM, None, coarse)
        _, w_refined = best_period(Strategy.RFO, PLATFORM, None, refined)
        assert w_refined <= w_coarse + 1e-15

    def test_deterministic(self):
        spec = sim_spec(None, n_traces=4)
        first = best_period(Strategy.RFO, PLATFORM, None, spec)
        second = best_period(Strategy.RFO, PLATFORM, None, spec)
        assert first == second

    def test_requires_traces_and_t_base(self):
        empty = SearchSpec(t_r_range=(660.0, 5000.0), t_base=1.0e6)
        with pytest.raises(ConfigError):
            best_period(Strategy.DALY, PLATFORM, None, empty)
        no_base = sim_spec(None)
        object.__setattr__(no_base, "t_base", None)
        with pytest.raises(ConfigError):
            best_period(Strategy.DALY, PLATFORM, None, no_base)


class TestAbandonment:
    """Hopeless candidates are cut off instead of simulated to completion."""

    def test_cap_factor_must_exceed_one(self):
        with pytest.raises(ConfigError):
            SearchSpec(t_r_range=(660.0, 5000.0), makespan_cap_factor=1.0)

    def test_hopeless_extra_candidate_is_skipped(self):
        # a period of 50 platform MTBFs essentially never completes between
        # faults; the cap must reject it without exhausting time or memory
        hopeless = 50.0 * PLATFORM.mtbf
        spec = sim_spec(None, n_traces=4, extra_candidates=(hopeless,))
        t_r, waste = best_period(Strategy.DALY, PLATFORM, None, spec)
        assert t_r != hopeless
        assert math.isfinite(waste)

    def test_cap_factor_does_not_change_optimum(self):
        tight = sim_spec(None, n_traces=4)
        loose = sim_spec(None, n_traces=4, makespan_cap_factor=1e9)
        assert best_period(Strategy.RFO, PLATFORM, None, tight) == \
            best_period(Strategy.RFO, PLATFORM, None, loose)
