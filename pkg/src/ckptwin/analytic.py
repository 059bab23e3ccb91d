"""Closed-form waste model for checkpointing under fault-prediction windows.

Implements the expected-waste expressions of the interval-accounting analysis:
the no-prediction waste shared by all strategies when predictions are ignored,
the trusted-prediction (q=1) closed forms of the three prediction-aware
strategies, a general-q solver built directly from the per-interval
time-spent/work-done accounting tables, and the extremal periods that minimize
each waste expression. The general-q solver and the closed forms are derived
independently and cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .core import (
    ConfigError,
    ModelValidityError,
    Platform,
    PolicyConfig,
    Predictor,
    Strategy,
    StrategyInapplicableError,
    expected_fault_offset,
)


@dataclass(frozen=True)
class WasteBreakdown:
    """Expected waste and the matching slowdown factor T_final/T_base."""

    waste: float
    t_final_over_t_base: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.waste < 1.0:
            raise ModelValidityError(
                f"waste {self.waste} outside [0, 1)", value=self.waste
            )


@dataclass(frozen=True)
class IntervalWeights:
    """Expected interval counts per unit of final time, by interval type.

    w1: fault-free regular intervals; w2: intervals hit by an unpredicted
    fault; w3: intervals with a false prediction; w4: intervals with a true
    prediction.
    """

    w1: float
    w2: float
    w3: float
    w4: float


class PeriodValue(NamedTuple):
    """An extremal period plus whether it was clamped into its feasible range."""

    seconds: float
    clamped: bool


def _positive(value: float, name: str) -> None:
    if value <= 0:
        raise ConfigError(f"{name} must be positive")


def young_period(mu: float, c: float) -> float:
    """First-order optimal period sqrt(2*mu*C) + C."""
    _positive(mu, "mu")
    _positive(c, "c")
    return math.sqrt(2.0 * mu * c) + c


def daly_period(mu: float, r_rec: float, c: float) -> float:
    """Refinement of the first-order period accounting for recovery time."""
    _positive(mu, "mu")
    _positive(c, "c")
    if r_rec < 0:
        raise ConfigError("r_rec must be non-negative")
    return math.sqrt(2.0 * (mu + r_rec) * c) + c


def rfo_period(mu: float, d: float, r_rec: float, c: float) -> float:
    """Refined first-order period sqrt(2C(mu - (D + R)))."""
    _positive(mu, "mu")
    _positive(c, "c")
    if d < 0 or r_rec < 0:
        raise ConfigError("d and r_rec must be non-negative")
    slack = mu - (d + r_rec)
    if slack <= 0:
        raise ModelValidityError(
            "MTBF does not exceed downtime plus recovery", value=slack
        )
    return math.sqrt(2.0 * c * slack)


def exact_prediction_period(mu: float, c: float, r: float) -> float:
    """Optimal period sqrt(2*mu*C/(1-r)) under exact-date predictions."""
    _positive(mu, "mu")
    _positive(c, "c")
    if not 0.0 <= r < 1.0:
        raise ConfigError("recall must lie in [0, 1) for a finite period")
    return math.sqrt(2.0 * mu * c / (1.0 - r))


def _breakdown(ratio: float) -> WasteBreakdown:
    """Build a WasteBreakdown from the T_base/T_final ratio, checking validity."""
    waste = 1.0 - ratio
    if not 0.0 < waste < 1.0:
        raise ModelValidityError(
            f"waste {waste} outside the model's validity region (0, 1)",
            value=waste,
        )
    return WasteBreakdown(waste=waste, t_final_over_t_base=1.0 / ratio)


def waste_nopred(t_r: float, platform: Platform) -> WasteBreakdown:
    """Expected waste of a periodic policy that ignores all predictions."""
    c = platform.c_regular
    if t_r <= c:
        raise ModelValidityError(
            "t_regular must exceed the checkpoint cost", value=t_r
        )
    mu = platform.mtbf
    ratio = (1.0 - c / t_r) * (
        1.0 - (t_r / 2.0 + platform.downtime + platform.recovery) / mu
    )
    return _breakdown(ratio)


def _prediction_params(
    platform: Platform, predictor: Predictor, e_fault: float | None
) -> tuple[float, float, float, float, float, float, float, float]:
    mu = platform.mtbf
    p = predictor.precision
    r = predictor.recall
    i_win = predictor.window
    e = expected_fault_offset(predictor, e_fault)
    return (
        mu,
        p,
        r,
        i_win,
        e,
        platform.c_proactive,
        platform.downtime,
        platform.recovery,
    )


def _second_factor(
    t_r: float, c: float, mu: float, p: float, r: float, i_win: float, e: float,
    cp: float, d: float, rec: float,
) -> float:
    return (1.0 - c / t_r) * (
        1.0
        - (
            p * (d + rec)
            + r * cp
            + (1.0 - r) * p * t_r / 2.0
            + r * ((1.0 - p) * i_win + p * e)
        )
        / (p * mu)
    )


def waste_withckpt(
    t_r: float,
    t_p: float,
    platform: Platform,
    predictor: Predictor,
    e_fault: float | None = None,
) -> WasteBreakdown:
    """Trusted-prediction waste when checkpointing throughout the window."""
    c = platform.c_regular
    if t_r <= c:
        raise ModelValidityError("t_regular must exceed the checkpoint cost", value=t_r)
    mu, p, r, i_win, e, cp, d, rec = _prediction_params(platform, predictor, e_fault)
    if i_win < cp:
        raise StrategyInapplicableError(
            "window too short for a proactive checkpoint", value=i_win
        )
    if not cp <= t_p <= i_win:
        raise ConfigError("t_proactive must lie in [c_proactive, window]")
    ratio = (
        r / (p * mu) * (1.0 - cp / t_p) * ((1.0 - p) * i_win + p * (e - t_p))
        + _second_factor(t_r, c, mu, p, r, i_win, e, cp, d, rec)
    )
    return _breakdown(ratio)


def waste_nockpt(
    t_r: float,
    platform: Platform,
    predictor: Predictor,
    e_fault: float | None = None,
) -> WasteBreakdown:
    """Trusted-prediction waste when working unprotected through the window."""
    c = platform.c_regular
    if t_r <= c:
        raise ModelValidityError("t_regular must exceed the checkpoint cost", value=t_r)
    mu, p, r, i_win, e, cp, d, rec = _prediction_params(platform, predictor, e_fault)
    ratio = r / (p * mu) * (1.0 - p) * i_win + _second_factor(
        t_r, c, mu, p, r, i_win, e, cp, d, rec
    )
    return _breakdown(ratio)


def waste_instant(
    t_r: float,
    platform: Platform,
    predictor: Predictor,
    e_fault: float | None = None,
) -> WasteBreakdown:
    """Trusted-prediction waste when leaving proactive mode right away."""
    c = platform.c_regular
    if t_r <= c:
        raise ModelValidityError("t_regular must exceed the checkpoint cost", value=t_r)
    mu, p, r, _i_win, e, cp, d, rec = _prediction_params(platform, predictor, e_fault)
    ratio = (1.0 - c / t_r) * (
        1.0
        - (p * (d + rec) + r * cp + (1.0 - r) * p * t_r / 2.0 + p * r * e)
        / (p * mu)
    )
    return _breakdown(ratio)


def tp_extr(
    platform: Platform, predictor: Predictor, e_fault: float | None = None
) -> PeriodValue:
    """Proactive period minimizing the in-window waste, clamped to [Cp, I]."""
    mu, p, r, i_win, e, cp, _d, _rec = _prediction_params(platform, predictor, e_fault)
    del mu, r
    if i_win < cp:
        raise StrategyInapplicableError(
            "window too short for a proactive checkpoint", value=i_win
        )
    value = math.sqrt(((1.0 - p) * i_win + p * e) * cp / p)
    if value < cp:
        return PeriodValue(cp, True)
    if value > i_win:
        return PeriodValue(i_win, True)
    return PeriodValue(value, False)


def _tr_extr(
    platform: Platform, predictor: Predictor, overhead: float
) -> PeriodValue:
    """Shared extremal-period form sqrt(2C(p*mu - overhead)/(p(1-r)))."""
    p = predictor.precision
    r = predictor.recall
    if r >= 1.0:
        raise ModelValidityError(
            "no finite optimal period when every fault is predicted", value=math.inf
        )
    c = platform.c_regular
    radicand = 2.0 * c * (p * platform.mtbf - overhead) / (p * (1.0 - r))
    if radicand < 0.0:
        raise ModelValidityError(
            "prediction overhead exceeds the platform MTBF", value=radicand
        )
    value = math.sqrt(radicand)
    if value < c:
        return PeriodValue(c, True)
    return PeriodValue(value, False)


def tr_extr_window(
    platform: Platform, predictor: Predictor, e_fault: float | None = None
) -> PeriodValue:
    """Regular period minimizing the window strategies' waste, clamped to >= C."""
    _mu, p, r, i_win, e, cp, d, rec = _prediction_params(platform, predictor, e_fault)
    overhead = p * (d + rec) + r * (cp + (1.0 - p) * i_win + p * e)
    return _tr_extr(platform, predictor, overhead)


def tr_extr_instant(
    platform: Platform, predictor: Predictor, e_fault: float | None = None
) -> PeriodValue:
    """Regular period minimizing the instant-return waste, clamped to >= C."""
    _mu, p, r, _i_win, e, cp, d, rec = _prediction_params(platform, predictor, e_fault)
    overhead = p * (d + rec) + r * cp + p * r * e
    return _tr_extr(platform, predictor, overhead)


def _accounting_cells(
    strategy: Strategy,
    t_r: float,
    t_p: float | None,
    q: float,
    i_win: float,
    e: float,
    c: float,
    cp: float,
    d: float,
    rec: float,
) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
    """(time, work) cells for interval types 2-4 of the accounting tables.

    Type 2 is an unpredicted fault, type 3 a false prediction, type 4 a true
    prediction; type 1 (fault-free interval) is (t_r, t_r - c) for every
    strategy.
    """
    t2 = (t_r / 2.0 + d + rec, 0.0)
    t4_time = q * (t_r + e + cp) + (1.0 - q) * t_r / 2.0 + d + rec
    if strategy is Strategy.WITH_CKPT_I:
        assert t_p is not None
        t3 = (
            t_r + q * (i_win + cp),
            t_r - c + q * (i_win - (i_win / t_p) * cp),
        )
        t4 = (t4_time, q * (t_r - c + (e / t_p - 1.0) * (t_p - cp)))
    elif strategy is Strategy.NO_CKPT_I:
        t3 = (t_r + q * (i_win + cp), t_r - c + q * i_win)
        t4 = (t4_time, q * (t_r - c))
    else:
        t3 = (t_r + q * cp, t_r - c)
        t4 = (t4_time, q * (t_r - c))
    return t2, t3, t4


def _solver_ratio(
    strategy: Strategy,
    t_r: float,
    t_p: float | None,
    q: float,
    platform: Platform,
    predictor: Predictor,
    e_fault: float | None,
) -> tuple[float, float, float, float, float]:
    """T_base/T_final from the accounting identities, with the rate terms.

    Eliminates the fault-free interval count between the total-time and
    total-work identities and solves the resulting linear equation. Returns
    (ratio, c2, c3, c4, work3_4) where work3_4 = c3*work3 + c4*work4 is the
    per-unit-final-time work done outside fault-free intervals.
    """
    c = platform.c_regular
    if t_r <= c:
        raise ModelValidityError("t_regular must exceed the checkpoint cost", value=t_r)
    mu, p, r, i_win, e, cp, d, rec = _prediction_params(platform, predictor, e_fault)
    if strategy is Strategy.WITH_CKPT_I:
        if i_win < cp:
            raise StrategyInapplicableError(
                "window too short for a proactive checkpoint", value=i_win
            )
        if t_p is None:
            raise ConfigError("withckpti requires t_proactive")
        if not cp <= t_p <= i_win:
            raise ConfigError("t_proactive must lie in [c_proactive, window]")
    if not 0.0 <= q <= 1.0:
        raise ConfigError("q must lie in [0, 1]")
    if not strategy.uses_predictions:
        if q != 0.0:
            raise ConfigError(f"{strategy.value} requires q = 0")
        strategy = Strategy.INSTANT  # q=0 accounting is shared by all strategies
    c2 = (1.0 - r) / mu
    c3 = (1.0 - p) * r / (p * mu)
    c4 = r / mu
    (time2, _), (time3, work3), (time4, work4) = _accounting_cells(
        strategy, t_r, t_p, q, i_win, e, c, cp, d, rec
    )
    work3_4 = c3 * work3 + c4 * work4
    period_ratio = t_r / (t_r - c)
    denom = 1.0 + period_ratio * work3_4 - (c2 * time2 + c3 * time3 + c4 * time4)
    if denom <= 0.0:
        raise ModelValidityError(
            "singular interval accounting (expected overhead consumes all time)",
            value=denom,
        )
    return denom / period_ratio, c2, c3, c4, work3_4


def general_q_waste(
    strategy: Strategy,
    t_r: float,
    t_p: float | None,
    q: float,
    platform: Platform,
    predictor: Predictor,
    e_fault: float | None = None,
) -> WasteBreakdown:
    """Waste for any trust probability q, solved from the accounting tables."""
    ratio, _, _, _, _ = _solver_ratio(strategy, t_r, t_p, q, platform, predictor, e_fault)
    return _breakdown(ratio)


def interval_weights(
    strategy: Strategy,
    t_r: float,
    t_p: float | None,
    q: float,
    platform: Platform,
    predictor: Predictor,
    e_fault: float | None = None,
) -> IntervalWeights:
    """Expected interval counts per unit of final time for each interval type."""
    ratio, c2, c3, c4, work3_4 = _solver_ratio(
        strategy, t_r, t_p, q, platform, predictor, e_fault
    )
    w1 = (ratio - work3_4) / (t_r - platform.c_regular)
    if w1 < 0.0:
        raise ModelValidityError(
            "negative fault-free interval count (window work exceeds the job)",
            value=w1,
        )
    return IntervalWeights(w1=w1, w2=c2, w3=c3, w4=c4)


def optimal_policy(
    platform: Platform, predictor: Predictor, e_fault: float | None = None
) -> tuple[PolicyConfig, WasteBreakdown]:
    """Best strategy at its analytic optimum; ties break in declaration order.

    Prediction-aware strategies are evaluated at q=1 with their extremal
    periods, the periodic ones at their own optima with q=0. Strategies whose
    evaluation leaves the model's validity region are excluded; RFO at least
    must survive.
    """
    candidates: list[tuple[float, int, PolicyConfig, WasteBreakdown]] = []
    mu = platform.mtbf
    c = platform.c_regular

    def consider(order: int, policy: PolicyConfig, breakdown: WasteBreakdown) -> None:
        candidates.append((breakdown.waste, order, policy, breakdown))

    try:
        t_daly = daly_period(mu, platform.recovery, c)
        consider(
            0,
            PolicyConfig(Strategy.DALY, t_daly, trust_prob=0.0),
            waste_nopred(t_daly, platform),
        )
    except ModelValidityError:
        pass
    try:
        t_rfo = rfo_period(mu, platform.downtime, platform.recovery, c)
        consider(
            1,
            PolicyConfig(Strategy.RFO, t_rfo, trust_prob=0.0),
            waste_nopred(t_rfo, platform),
        )
    except ModelValidityError as exc:
        raise ModelValidityError(
            "no strategy is applicable: the reference periodic policy is invalid",
            value=exc.value,
        ) from exc
    if predictor.recall == 0.0:
        # Every prediction-aware strategy degenerates exactly to the periodic
        # policy at the same period; the tie must resolve to RFO.
        _, order, policy, breakdown = min(candidates)
        del order
        return policy, breakdown
    try:
        t_inst = tr_extr_instant(platform, predictor, e_fault).seconds
        consider(
            2,
            PolicyConfig(Strategy.INSTANT, t_inst, trust_prob=1.0),
            waste_instant(t_inst, platform, predictor, e_fault),
        )
    except ModelValidityError:
        pass
    try:
        t_win = tr_extr_window(platform, predictor, e_fault).seconds
        consider(
            3,
            PolicyConfig(Strategy.NO_CKPT_I, t_win, trust_prob=1.0),
            waste_nockpt(t_win, platform, predictor, e_fault),
        )
    except ModelValidityError:
        pass
    try:
        t_win = tr_extr_window(platform, predictor, e_fault).seconds
        t_pro = tp_extr(platform, predictor, e_fault).seconds
        consider(
            4,
            PolicyConfig(Strategy.WITH_CKPT_I, t_win, t_proactive=t_pro, trust_prob=1.0),
            waste_withckpt(t_win, t_pro, platform, predictor, e_fault),
        )
    except ModelValidityError:
        pass

    waste, _, policy, breakdown = min(candidates, key=lambda item: (item[0], item[1]))
    del waste
    return policy, breakdown
