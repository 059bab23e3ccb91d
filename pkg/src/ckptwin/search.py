"""Brute-force search for the best regular checkpointing period.

Candidate periods are laid out on a geometric grid, scored, and the interval
bracketing the best candidate is re-gridded a configurable number of times.
Two scorers share the machinery: ``best_period`` scores each candidate by its
mean simulated waste over a shared set of traces (common random numbers, so
comparisons between candidates carry no re-sampling noise), while
``best_period_analytic`` minimizes the closed-form waste instead and doubles
as an independent cross-check of the extremal-period formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import (
    tp_extr,
    waste_instant,
    waste_nockpt,
    waste_nopred,
    waste_withckpt,
)
from .core import (
    ConfigError,
    ModelValidityError,
    Platform,
    PolicyConfig,
    Predictor,
    Strategy,
)
from .engine import ReplicationConfig, simulate
from .tracegen import Trace, generate


class SearchFailureError(ModelValidityError):
    """Every candidate period in the search range was invalid."""


class _CandidateAbandoned(Exception):
    """Internal: the candidate provably cannot beat the incumbent."""


@dataclass(frozen=True)
class SearchSpec:
    """Search range, grid resolution, and the shared evaluation traces.

    The same trace_set is replayed at every candidate period. extra_candidates
    are scored alongside (and before) the first grid; closed-form periods are
    passed here so the searched optimum can never lose to them on the shared
    traces, and so later candidates are abandoned early against a strong
    incumbent. t_base is required only for the simulated search.

    makespan_cap_factor bounds the work spent on hopeless candidates: a
    replication whose clock passes makespan_cap_factor * t_base (waste above
    1 - 1/factor) abandons its candidate as not competitive. Grossly oversized
    periods otherwise need astronomically many attempts to ever complete a
    period between faults.
    """

    t_r_range: tuple[float, float]
    n_grid: int = 64
    refinement_rounds: int = 3
    refine_grid: int = 16
    trace_set: tuple[Trace, ...] = ()
    t_base: float | None = None
    extra_candidates: tuple[float, ...] = ()
    makespan_cap_factor: float = 100.0

    def __post_init__(self) -> None:
        low, high = self.t_r_range
        if not 0.0 < low < high:
            raise ConfigError("t_r_range must satisfy 0 < low < high")
        if self.n_grid < 3 or self.refine_grid < 3:
            raise ConfigError("grids need at least 3 points")
        if self.refinement_rounds < 0:
            raise ConfigError("refinement_rounds must be non-negative")
        if self.makespan_cap_factor <= 1.0:
            raise ConfigError("makespan_cap_factor must exceed 1")
        object.__setattr__(self, "trace_set", tuple(self.trace_set))
        object.__setattr__(
            self, "extra_candidates", tuple(float(x) for x in self.extra_candidates)
        )


def make_trace_set(
    config: ReplicationConfig, n_traces: int, base_seed: int
) -> tuple[Trace, ...]:
    """Independent traces with seeds base_seed..base_seed+n-1."""
    if n_traces < 1:
        raise ConfigError("n_traces must be at least 1")
    trace_cfg = config.trace_config()
    horizon = config.horizon_hint
    if horizon is None:
        horizon = 2.5 * config.t_base
    return tuple(
        generate(trace_cfg, horizon, base_seed + k) for k in range(n_traces)
    )


def default_search_spec(
    config: ReplicationConfig,
    base_seed: int,
    n_traces: int = 20,
    extra_candidates: tuple[float, ...] = (),
) -> SearchSpec:
    """Default grid: 64 geometric points over [1.1 C, min(20 mu, t_base)].

    Three refinement rounds of 16 points each; the geometric spacing matches
    the square-root scaling of the closed-form periods.
    """
    platform = config.platform
    low = 1.1 * platform.c_regular
    high = min(20.0 * platform.mtbf, config.t_base)
    if high <= low:
        raise ConfigError(
            "degenerate search range: t_base and MTBF leave no room above 1.1 C"
        )
    return SearchSpec(
        t_r_range=(low, high),
        trace_set=make_trace_set(config, n_traces, base_seed),
        t_base=config.t_base,
        extra_candidates=extra_candidates,
    )


def _check_applicable(
    strategy: Strategy, platform: Platform, predictor: Predictor | None, low: float
) -> None:
    if low <= platform.c_regular:
        raise ConfigError("search range must start above the regular checkpoint cost")
    if strategy.uses_predictions and predictor is None:
        raise ConfigError(f"{strategy.value} requires a predictor")


def _search(evaluate, spec: SearchSpec) -> tuple[float, float]:
    """Grid minimization with bracketing refinement.

    Invalid or abandoned candidates are skipped; ties resolve to the smallest
    period. The running best is kept across rounds, so refinement can never
    return a worse value than the coarse pass. Extra candidates are evaluated
    before the first grid so the incumbent passed to evaluate is strong from
    the start; evaluation order never affects the recorded scores, which are
    exact means.
    """
    lo, hi = spec.t_r_range
    n = spec.n_grid
    best_w = np.inf
    best_t = np.nan
    for round_idx in range(spec.refinement_rounds + 1):
        grid = np.geomspace(lo, hi, n)
        if round_idx == 0:
            extras = list(dict.fromkeys(spec.extra_candidates))
            candidates = sorted(set(grid.tolist()) | set(extras))
            order = extras + [t for t in candidates if t not in set(extras)]
        else:
            candidates = grid.tolist()
            order = candidates
        scored: list[tuple[float, float]] = []
        inc_w = best_w
        for t_r in order:
            incumbent = None if np.isinf(inc_w) else inc_w
            try:
                w = evaluate(float(t_r), incumbent)
            except (_CandidateAbandoned, ConfigError, ModelValidityError):
                continue
            scored.append((w, float(t_r)))
            inc_w = min(inc_w, w)
        if not scored:
            if round_idx == 0:
                raise SearchFailureError(
                    "every candidate period in the search range is invalid"
                )
            break
        w_round, t_round = min(scored)
        if w_round < best_w or (w_round == best_w and t_round < best_t):
            best_w, best_t = w_round, t_round
        idx = candidates.index(t_round)
        lo = candidates[max(idx - 1, 0)]
        hi = candidates[min(idx + 1, len(candidates) - 1)]
        if not lo < hi:
            break
        n = spec.refine_grid
    return best_t, best_w


def best_period(
    strategy: Strategy,
    platform: Platform,
    predictor: Predictor | None,
    spec: SearchSpec,
) -> tuple[float, float]:
    """Period minimizing the mean simulated waste over the shared trace set.

    For the in-window checkpointing strategy the proactive period is held at
    its closed-form optimum; only the regular period is searched.
    """
    _check_applicable(strategy, platform, predictor, spec.t_r_range[0])
    if not spec.trace_set:
        raise ConfigError("best_period needs a non-empty trace_set")
    if spec.t_base is None or spec.t_base <= 0:
        raise ConfigError("best_period needs a positive t_base")
    t_p = None
    if strategy is Strategy.WITH_CKPT_I:
        t_p = tp_extr(platform, predictor).seconds
    traces = spec.trace_set
    t_base = spec.t_base
    cap = spec.makespan_cap_factor * t_base

    def evaluate(t_r: float, incumbent: float | None) -> float:
        policy = PolicyConfig(strategy, t_r, t_proactive=t_p)
        total = 0.0
        for trace in traces:
            # Wastes are non-negative, so once the partial sum reaches the
            # incumbent's total the candidate can no longer win.
            if incumbent is not None and total >= len(traces) * incumbent:
                raise _CandidateAbandoned(t_r)
            total += simulate(policy, trace, t_base, platform, makespan_cap=cap).waste
        return total / len(traces)

    return _search(evaluate, spec)


def best_period_analytic(
    strategy: Strategy,
    platform: Platform,
    predictor: Predictor | None,
    spec: SearchSpec,
) -> tuple[float, float]:
    """Period minimizing the closed-form waste on the same grid protocol."""
    _check_applicable(strategy, platform, predictor, spec.t_r_range[0])
    if not strategy.uses_predictions:
        def evaluate(t_r: float, incumbent: float | None) -> float:
            return waste_nopred(t_r, platform).waste
    elif strategy is Strategy.INSTANT:
        def evaluate(t_r: float, incumbent: float | None) -> float:
            return waste_instant(t_r, platform, predictor).waste
    elif strategy is Strategy.NO_CKPT_I:
        def evaluate(t_r: float, incumbent: float | None) -> float:
            return waste_nockpt(t_r, platform, predictor).waste
    else:
        t_p = tp_extr(platform, predictor).seconds

        def evaluate(t_r: float, incumbent: float | None) -> float:
            return waste_withckpt(t_r, t_p, platform, predictor).waste

    return _search(evaluate, spec)
