"""Experiment presets, table and sweep runners, and CSV emission.

The default presets pin the standard study setup: individual processor MTBF of
125 years, platforms of 2^16 to 2^19 processors, checkpoint and recovery costs
of 600 s, 60 s downtime, a total workload of 10000 processor-years, prediction
windows from 300 s to 3000 s, and two predictor quality presets. Table runs
evaluate every strategy at its closed-form optimal period with paired trace
seeds so gains against the plain periodic baseline carry no sampling noise;
sweep runs walk one axis and report analytic and simulated waste side by side.

All CSV output is byte-deterministic for a fixed (config, seed): rows are
sorted by their coordinates, floats are emitted via repr, and the config echo
is canonical JSON.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import typing
from dataclasses import asdict, dataclass, fields

import numpy as np

from .analytic import (
    daly_period,
    rfo_period,
    tp_extr,
    tr_extr_instant,
    tr_extr_window,
    waste_instant,
    waste_nockpt,
    waste_nopred,
    waste_withckpt,
)
from .core import (
    SECONDS_PER_DAY,
    SECONDS_PER_YEAR,
    ConfigError,
    ModelValidityError,
    Platform,
    PolicyConfig,
    Predictor,
    Strategy,
    StrategyInapplicableError,
)
from .engine import ReplicateStats, ReplicationConfig, replicate
from .search import SearchSpec, best_period, make_trace_set
from .tracegen import FaultDistribution

PREDICTOR_PRESETS: dict[str, tuple[float, float]] = {
    "accurate": (0.82, 0.85),
    "weak": (0.4, 0.7),
}

_CP_MODES: dict[str, float] = {"eq": 1.0, "0.1": 0.1, "2": 2.0}

_STRATEGY_INDEX = {s.value: i for i, s in enumerate(Strategy)}


def parse_predictor(label: str) -> tuple[float, float]:
    """Resolve a predictor label: a named preset or 'precision,recall'."""
    if label in PREDICTOR_PRESETS:
        return PREDICTOR_PRESETS[label]
    head, sep, tail = label.partition(",")
    if sep:
        try:
            precision, recall = float(head), float(tail)
        except ValueError:
            pass
        else:
            if 0.0 < precision <= 1.0 and 0.0 <= recall <= 1.0:
                return precision, recall
            raise ConfigError(
                f"predictor {label!r} out of range: precision in (0, 1], recall in [0, 1]"
            )
    raise ConfigError(
        f"unknown predictor {label!r}: use "
        f"{'|'.join(PREDICTOR_PRESETS)} or 'precision,recall'"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: platform family, fault law, predictor, and run sizes.

    Kept JSON-flat (strings for the fault law, predictor, and strategy names)
    so a config file mirrors the field names exactly.
    """

    mu_ind: float = 125.0 * SECONDS_PER_YEAR
    c_regular: float = 600.0
    cp_mode: str = "eq"
    downtime: float = 60.0
    recovery: float = 600.0
    dist: str = "weibull:0.7"
    uniform_false: bool = False
    predictor: str = "accurate"
    i_list: tuple[float, ...] = (300.0, 600.0, 900.0, 1200.0, 3000.0)
    n_list: tuple[int, ...] = (2**16, 2**17, 2**18, 2**19)
    strategies: tuple[str, ...] = tuple(s.value for s in Strategy)
    work_years: float = 10000.0
    n_reps: int = 100
    base_seed: int = 1
    out_path: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "i_list", tuple(float(i) for i in self.i_list))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if not (self.i_list and self.n_list and self.strategies):
            raise ConfigError("i_list, n_list and strategies must be non-empty")
        if self.cp_mode not in _CP_MODES:
            raise ConfigError(f"cp_mode must be one of {'|'.join(_CP_MODES)}")
        for name in self.strategies:
            if name not in _STRATEGY_INDEX:
                raise ConfigError(f"unknown strategy {name!r}")
        if any(i <= 0 for i in self.i_list) or any(n < 1 for n in self.n_list):
            raise ConfigError("window lengths and processor counts must be positive")
        if self.n_reps < 1:
            raise ConfigError("n_reps must be at least 1")
        if self.work_years <= 0:
            raise ConfigError("work_years must be positive")
        parse_predictor(self.predictor)
        FaultDistribution.parse(self.dist, 1.0)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**values)

    @property
    def c_proactive(self) -> float:
        return _CP_MODES[self.cp_mode] * self.c_regular

    @property
    def strategy_objects(self) -> tuple[Strategy, ...]:
        return tuple(Strategy(name) for name in self.strategies)

    def platform_for(self, n_procs: int) -> Platform:
        return Platform(
            n_procs=n_procs,
            mu_ind=self.mu_ind,
            c_regular=self.c_regular,
            c_proactive=self.c_proactive,
            downtime=self.downtime,
            recovery=self.recovery,
        )

    def t_base_for(self, n_procs: int) -> float:
        return self.work_years * SECONDS_PER_YEAR / n_procs

    def fault_dist(self) -> FaultDistribution:
        return FaultDistribution.parse(self.dist, 1.0)

    def predictor_for(self, i_window: float) -> Predictor:
        precision, recall = parse_predictor(self.predictor)
        return Predictor(precision=precision, recall=recall, window=i_window)

    def config_hash(self) -> str:
        payload = asdict(self)
        del payload["out_path"]  # the output location is not part of the experiment
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def preset_defaults() -> ExperimentConfig:
    """The standard study presets (see the module docstring)."""
    return ExperimentConfig()


# External reference values (mean makespans in days) for the default presets,
# used for drift reporting in table output. Keys: (dist, predictor label or ""
# for prediction-ignoring strategies, strategy, n_procs, window or None).
REFERENCE_DAYS: dict[tuple[str, str, str, int, float | None], float] = {
    ("weibull:0.7", "", "daly", 2**16, None): 81.3,
    ("weibull:0.7", "", "daly", 2**19, None): 31.0,
    ("weibull:0.7", "", "rfo", 2**16, None): 80.2,
    ("weibull:0.7", "", "rfo", 2**19, None): 25.5,
    ("weibull:0.7", "accurate", "nockpti", 2**16, 300.0): 66.4,
    ("weibull:0.7", "accurate", "nockpti", 2**19, 300.0): 17.0,
    ("weibull:0.7", "accurate", "nockpti", 2**16, 1200.0): 67.9,
    ("weibull:0.7", "accurate", "nockpti", 2**19, 1200.0): 20.2,
    ("weibull:0.7", "accurate", "nockpti", 2**16, 3000.0): 71.0,
    ("weibull:0.7", "accurate", "nockpti", 2**19, 3000.0): 24.7,
    ("weibull:0.7", "accurate", "withckpti", 2**16, 300.0): 66.4,
    ("weibull:0.7", "accurate", "withckpti", 2**19, 300.0): 17.0,
    ("weibull:0.7", "accurate", "withckpti", 2**16, 1200.0): 68.3,
    ("weibull:0.7", "accurate", "withckpti", 2**19, 1200.0): 20.6,
    ("weibull:0.7", "accurate", "withckpti", 2**16, 3000.0): 70.6,
    ("weibull:0.7", "accurate", "withckpti", 2**19, 3000.0): 23.1,
    ("weibull:0.7", "accurate", "instant", 2**16, 300.0): 66.5,
    ("weibull:0.7", "accurate", "instant", 2**19, 300.0): 17.0,
    ("weibull:0.7", "accurate", "instant", 2**16, 1200.0): 68.0,
    ("weibull:0.7", "accurate", "instant", 2**19, 1200.0): 20.3,
    ("weibull:0.7", "accurate", "instant", 2**16, 3000.0): 70.9,
    ("weibull:0.7", "accurate", "instant", 2**19, 3000.0): 24.1,
    ("weibull:0.5", "", "daly", 2**16, None): 125.7,
    ("weibull:0.5", "", "daly", 2**19, None): 185.0,
    ("weibull:0.5", "", "rfo", 2**16, None): 120.1,
    ("weibull:0.5", "", "rfo", 2**19, None): 114.8,
    ("weibull:0.5", "accurate", "nockpti", 2**16, 300.0): 77.4,
    ("weibull:0.5", "accurate", "nockpti", 2**19, 300.0): 44.9,
    ("weibull:0.5", "accurate", "nockpti", 2**16, 1200.0): 81.8,
    ("weibull:0.5", "accurate", "nockpti", 2**19, 1200.0): 60.7,
    ("weibull:0.5", "accurate", "nockpti", 2**16, 3000.0): 90.0,
    ("weibull:0.5", "accurate", "nockpti", 2**19, 3000.0): 71.5,
    ("weibull:0.5", "accurate", "withckpti", 2**16, 300.0): 77.4,
    ("weibull:0.5", "accurate", "withckpti", 2**19, 300.0): 44.9,
    ("weibull:0.5", "accurate", "withckpti", 2**16, 1200.0): 83.6,
    ("weibull:0.5", "accurate", "withckpti", 2**19, 1200.0): 64.4,
    ("weibull:0.5", "accurate", "withckpti", 2**16, 3000.0): 89.8,
    ("weibull:0.5", "accurate", "withckpti", 2**19, 3000.0): 66.2,
    ("weibull:0.5", "accurate", "instant", 2**16, 300.0): 77.4,
    ("weibull:0.5", "accurate", "instant", 2**19, 300.0): 45.2,
    ("weibull:0.5", "accurate", "instant", 2**16, 1200.0): 82.0,
    ("weibull:0.5", "accurate", "instant", 2**19, 1200.0): 60.8,
    ("weibull:0.5", "accurate", "instant", 2**16, 3000.0): 89.7,
    ("weibull:0.5", "accurate", "instant", 2**19, 3000.0): 70.6,
}


def reference_days(
    config: ExperimentConfig, strategy: Strategy, n_procs: int, i_window: float | None
) -> float | None:
    """Registered reference makespan for one table cell, if any."""
    if strategy.uses_predictions:
        if config.cp_mode != "eq":
            return None
        key = (config.dist, config.predictor, strategy.value, n_procs, i_window)
    else:
        key = (config.dist, "", strategy.value, n_procs, None)
    return REFERENCE_DAYS.get(key)


@dataclass(frozen=True)
class ResultRow:
    """One table cell: coordinates, chosen periods, and replication stats."""

    dist: str
    predictor: str
    cp_mode: str
    strategy: str
    n_procs: int
    i_window: float | None
    t_base_s: float
    t_regular_s: float | None
    t_proactive_s: float | None
    period_clamped: bool | None
    analytic_waste: float | None
    makespan_days: float | None
    makespan_stderr_days: float | None
    waste_mean: float | None
    waste_stderr: float | None
    gain_vs_daly_pct: float | None
    reference_days: float | None
    abs_err_days: float | None
    n_reps: int
    base_seed: int
    status: str
    config_hash: str


@dataclass(frozen=True)
class SweepRow:
    """One sweep cell: the axis coordinate plus analytic and simulated waste."""

    axis: str
    axis_value: float
    dist: str
    predictor: str
    cp_mode: str
    strategy: str
    n_procs: int
    i_window: float | None
    t_base_s: float
    t_regular_s: float | None
    t_proactive_s: float | None
    analytic_waste: float | None
    sim_waste_mean: float | None
    sim_waste_stderr: float | None
    best_period_s: float | None
    best_waste: float | None
    n_reps: int
    base_seed: int
    status: str
    config_hash: str


def analytic_waste_at(
    strategy: Strategy,
    t_r: float,
    t_p: float | None,
    platform: Platform,
    predictor: Predictor | None,
) -> float | None:
    try:
        if not strategy.uses_predictions:
            return waste_nopred(t_r, platform).waste
        assert predictor is not None
        if strategy is Strategy.INSTANT:
            return waste_instant(t_r, platform, predictor).waste
        if strategy is Strategy.NO_CKPT_I:
            return waste_nockpt(t_r, platform, predictor).waste
        assert t_p is not None
        return waste_withckpt(t_r, t_p, platform, predictor).waste
    except ModelValidityError:
        return None


def analytic_policy(
    strategy: Strategy, platform: Platform, predictor: Predictor | None
) -> tuple[PolicyConfig, bool]:
    """The strategy's policy at its closed-form optimal period.

    Returns the policy plus a flag marking whether any period was clamped into
    its feasible range. Raises the underlying model error if the strategy is
    inapplicable under these parameters.
    """
    mu = platform.mtbf
    if strategy is Strategy.DALY:
        return PolicyConfig(strategy, daly_period(mu, platform.recovery, platform.c_regular)), False
    if strategy is Strategy.RFO:
        return (
            PolicyConfig(
                strategy,
                rfo_period(mu, platform.downtime, platform.recovery, platform.c_regular),
            ),
            False,
        )
    if predictor is None:
        raise ConfigError(f"{strategy.value} requires a predictor")
    if strategy is Strategy.INSTANT:
        pv = tr_extr_instant(platform, predictor)
        return PolicyConfig(strategy, pv.seconds), pv.clamped
    if strategy is Strategy.NO_CKPT_I:
        pv = tr_extr_window(platform, predictor)
        return PolicyConfig(strategy, pv.seconds), pv.clamped
    pv = tr_extr_window(platform, predictor)
    tpv = tp_extr(platform, predictor)
    policy = PolicyConfig(strategy, pv.seconds, t_proactive=tpv.seconds)
    policy.check(platform, predictor)
    return policy, pv.clamped or tpv.clamped


def _replication_config(
    config: ExperimentConfig, platform: Platform, t_base: float, predictor: Predictor | None
) -> ReplicationConfig:
    return ReplicationConfig(
        platform=platform,
        dist=config.fault_dist(),
        t_base=t_base,
        predictor=predictor,
        uniform_false=config.uniform_false,
    )


def _table_cell(
    config: ExperimentConfig,
    strategy: Strategy,
    n_procs: int,
    i_window: float | None,
    daly_stats: ReplicateStats,
    chash: str,
) -> ResultRow:
    platform = config.platform_for(n_procs)
    t_base = config.t_base_for(n_procs)
    predictor = config.predictor_for(i_window) if i_window is not None else None
    coords = dict(
        dist=config.dist,
        predictor=config.predictor if strategy.uses_predictions else "",
        cp_mode=config.cp_mode,
        strategy=strategy.value,
        n_procs=n_procs,
        i_window=i_window,
        t_base_s=t_base,
        n_reps=config.n_reps,
        base_seed=config.base_seed,
        config_hash=chash,
    )
    ref = reference_days(config, strategy, n_procs, i_window)
    try:
        policy, clamped = analytic_policy(strategy, platform, predictor)
        policy.check(platform, predictor)
    except (ConfigError, ModelValidityError) as exc:
        return ResultRow(
            **coords,
            t_regular_s=None,
            t_proactive_s=None,
            period_clamped=None,
            analytic_waste=None,
            makespan_days=None,
            makespan_stderr_days=None,
            waste_mean=None,
            waste_stderr=None,
            gain_vs_daly_pct=None,
            reference_days=ref,
            abs_err_days=None,
            status=f"{type(exc).__name__}: {exc}",
        )
    if strategy is Strategy.DALY:
        stats = daly_stats  # same policy and seeds as the baseline by construction
    else:
        stats = replicate(
            policy,
            _replication_config(config, platform, t_base, predictor),
            config.n_reps,
            config.base_seed,
        )
    days = stats.makespan_mean / SECONDS_PER_DAY
    gain = 100.0 * (daly_stats.makespan_mean - stats.makespan_mean) / daly_stats.makespan_mean
    return ResultRow(
        **coords,
        t_regular_s=policy.t_regular,
        t_proactive_s=policy.t_proactive,
        period_clamped=clamped,
        analytic_waste=analytic_waste_at(
            strategy, policy.t_regular, policy.t_proactive, platform, predictor
        ),
        makespan_days=days,
        makespan_stderr_days=stats.makespan_stderr / SECONDS_PER_DAY,
        waste_mean=stats.waste_mean,
        waste_stderr=stats.waste_stderr,
        gain_vs_daly_pct=gain,
        reference_days=ref,
        abs_err_days=abs(days - ref) if ref is not None else None,
        status="ok",
    )


def run_table(config: ExperimentConfig) -> list[ResultRow]:
    """Every (strategy, platform size, window) cell at closed-form periods.

    The plain periodic baseline is replicated once per platform size on the
    same seeds as every other cell, so the reported gains are paired: the
    baseline's gain against itself is exactly zero.
    """
    rows: list[ResultRow] = []
    chash = config.config_hash()
    for n_procs in config.n_list:
        platform = config.platform_for(n_procs)
        t_base = config.t_base_for(n_procs)
        daly_policy, _ = analytic_policy(Strategy.DALY, platform, None)
        daly_stats = replicate(
            daly_policy,
            _replication_config(config, platform, t_base, None),
            config.n_reps,
            config.base_seed,
        )
        for strategy in config.strategy_objects:
            if strategy.uses_predictions:
                for i_window in config.i_list:
                    rows.append(
                        _table_cell(config, strategy, n_procs, i_window, daly_stats, chash)
                    )
            else:
                rows.append(_table_cell(config, strategy, n_procs, None, daly_stats, chash))
    rows.sort(
        key=lambda r: (
            r.n_procs,
            _STRATEGY_INDEX[r.strategy],
            r.i_window if r.i_window is not None else -1.0,
        )
    )
    return rows


def _normalize_axis(axis: str) -> str:
    aliases = {
        "n": "n_procs",
        "n_procs": "n_procs",
        "tr": "t_regular",
        "t_regular": "t_regular",
        "i": "i_window",
        "i_window": "i_window",
    }
    if axis not in aliases:
        raise ConfigError(f"axis must be one of n, tr, i (got {axis!r})")
    return aliases[axis]


def _default_tr_grid(platform: Platform, t_base: float, n_points: int = 25) -> list[float]:
    # Periods beyond a couple of MTBFs waste nearly everything; keep the
    # default axis in the range worth plotting.
    low = 1.1 * platform.c_regular
    high = min(2.0 * platform.mtbf, t_base)
    if high <= low:
        raise ConfigError("degenerate period axis: t_base leaves no room above 1.1 C")
    return [float(x) for x in np.geomspace(low, high, n_points)]


def _sweep_cell(
    config: ExperimentConfig,
    axis: str,
    axis_value: float,
    strategy: Strategy,
    n_procs: int,
    i_window: float | None,
    t_r: float | None,
    include_best_period: bool,
    chash: str,
    best_cache: dict,
) -> SweepRow:
    platform = config.platform_for(n_procs)
    t_base = config.t_base_for(n_procs)
    predictor = (
        config.predictor_for(i_window)
        if strategy.uses_predictions and i_window is not None
        else None
    )
    coords = dict(
        axis=axis,
        axis_value=float(axis_value),
        dist=config.dist,
        predictor=config.predictor if strategy.uses_predictions else "",
        cp_mode=config.cp_mode,
        strategy=strategy.value,
        n_procs=n_procs,
        i_window=i_window if strategy.uses_predictions else None,
        t_base_s=t_base,
        n_reps=config.n_reps,
        base_seed=config.base_seed,
        config_hash=chash,
    )
    try:
        if t_r is None:
            policy, _ = analytic_policy(strategy, platform, predictor)
        else:
            t_p = None
            if strategy is Strategy.WITH_CKPT_I:
                t_p = tp_extr(platform, predictor).seconds
            policy = PolicyConfig(strategy, t_r, t_proactive=t_p)
        policy.check(platform, predictor)
    except (ConfigError, ModelValidityError) as exc:
        return SweepRow(
            **coords,
            t_regular_s=t_r,
            t_proactive_s=None,
            analytic_waste=None,
            sim_waste_mean=None,
            sim_waste_stderr=None,
            best_period_s=None,
            best_waste=None,
            status=f"{type(exc).__name__}: {exc}",
        )
    stats = replicate(
        policy,
        _replication_config(config, platform, t_base, predictor),
        config.n_reps,
        config.base_seed,
    )
    best_t = best_w = None
    if include_best_period:
        cache_key = (strategy.value, n_procs, i_window)
        if cache_key not in best_cache:
            rep_cfg = _replication_config(config, platform, t_base, predictor)
            spec = SearchSpec(
                t_r_range=(1.1 * platform.c_regular, min(20.0 * platform.mtbf, t_base)),
                trace_set=make_trace_set(rep_cfg, 20, config.base_seed),
                t_base=t_base,
                extra_candidates=(policy.t_regular,),
            )
            best_cache[cache_key] = best_period(strategy, platform, predictor, spec)
        best_t, best_w = best_cache[cache_key]
    return SweepRow(
        **coords,
        t_regular_s=policy.t_regular,
        t_proactive_s=policy.t_proactive,
        analytic_waste=analytic_waste_at(
            strategy, policy.t_regular, policy.t_proactive, platform, predictor
        ),
        sim_waste_mean=stats.waste_mean,
        sim_waste_stderr=stats.waste_stderr,
        best_period_s=best_t,
        best_waste=best_w,
        status="ok",
    )


def run_sweep(
    config: ExperimentConfig,
    axis: str,
    axis_values: list[float] | None = None,
    include_best_period: bool = False,
) -> list[SweepRow]:
    """Walk one axis (platform size, regular period, or window length).

    Off-axis coordinates are held at the first entry of their config list.
    Model-validity failures are recorded per cell in the status column and the
    sweep continues.
    """
    axis = _normalize_axis(axis)
    chash = config.config_hash()
    n0 = config.n_list[0]
    i0 = config.i_list[0]
    best_cache: dict = {}
    rows: list[SweepRow] = []
    if axis == "n_procs":
        values = [int(v) for v in (axis_values or config.n_list)]
        for n_procs in values:
            for strategy in config.strategy_objects:
                rows.append(
                    _sweep_cell(
                        config, axis, n_procs, strategy, n_procs, i0, None,
                        include_best_period, chash, best_cache,
                    )
                )
    elif axis == "t_regular":
        platform = config.platform_for(n0)
        values = (
            [float(v) for v in axis_values]
            if axis_values
            else _default_tr_grid(platform, config.t_base_for(n0))
        )
        for t_r in values:
            for strategy in config.strategy_objects:
                rows.append(
                    _sweep_cell(
                        config, axis, t_r, strategy, n0, i0, t_r,
                        include_best_period, chash, best_cache,
                    )
                )
    else:
        values = [float(v) for v in (axis_values or config.i_list)]
        for i_window in values:
            for strategy in config.strategy_objects:
                rows.append(
                    _sweep_cell(
                        config, axis, i_window, strategy, n0, i_window, None,
                        include_best_period, chash, best_cache,
                    )
                )
    rows.sort(key=lambda r: (r.axis_value, _STRATEGY_INDEX[r.strategy]))
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_comments(config: ExperimentConfig) -> list[str]:
    """Config echo emitted atop every CSV, enough to regenerate the file."""
    payload = asdict(config)
    del payload["out_path"]
    return [
        f"# config: {json.dumps(payload, sort_keys=True, separators=(', ', ': '))}",
        f"# config_hash: {config.config_hash()}",
        "# units: seconds unless suffixed _days; 1 day = 86400 s, 1 year = 365.25 days",
    ]


def emit_csv(rows, path: str, config: ExperimentConfig | None = None, row_type=None) -> None:
    """Write rows (one dataclass type) as CSV; header-only when rows is empty."""
    if rows:
        row_type = type(rows[0])
    if row_type is None:
        raise ConfigError("emit_csv needs rows or an explicit row_type")
    names = [f.name for f in fields(row_type)]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if config is not None:
                for line in config_comments(config):
                    fh.write(line + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for row in rows:
                writer.writerow([_format_cell(getattr(row, name)) for name in names])
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc


def parse_csv(path: str, row_type):
    """Read back a CSV written by emit_csv (comments skipped), typed rows out."""
    hints = typing.get_type_hints(row_type)
    names = [f.name for f in fields(row_type)]
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            lines = [line for line in fh if not line.startswith("#")]
    except OSError as exc:
        raise OSError(f"failed reading CSV from {path}: {exc}") from exc
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != names:
        raise ConfigError(f"unexpected CSV header in {path}")
    rows = []
    for record in reader:
        values = {}
        for name, cell in zip(names, record, strict=True):
            hint = hints[name]
            args = typing.get_args(hint)
            if cell == "" and type(None) in args:
                values[name] = None
                continue
            base = args[0] if args else hint
            if base is bool:
                values[name] = cell == "true"
            elif base is int:
                values[name] = int(cell)
            elif base is float:
                values[name] = float(cell)
            else:
                values[name] = cell
        rows.append(row_type(**values))
    return rows
