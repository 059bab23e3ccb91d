"""Discrete-event execution of checkpointing policies against fault traces.

One call to :func:`simulate` runs a single job of a fixed useful-work size
against one trace under one policy and returns the makespan plus an exact
time/ work accounting. Replications over independent traces are provided by
:func:`replicate`; traces are strategy independent so different policies can
be compared on common random numbers.

Execution rules
---------------
Regular mode works ``t_regular - w_reg - c_regular`` seconds and then takes a
regular checkpoint, where ``w_reg`` is the work credit carried over a
proactive interruption. A fault in any mode triggers downtime, then recovery,
then regular mode resumes from the last completed checkpoint. A trusted
prediction revealed during a work segment takes a proactive checkpoint
just before the window opens and carries the segment's work as credit; if
revealed during a checkpoint (or too late to fit the proactive checkpoint)
the credit is dropped and the job works up to the window start instead.
Inside the window the strategy decides: checkpoint periodically, work
unprotected, or return to regular mode immediately.

Deliberate interpretations (the reference analysis is agnostic or assumes at
most one event per period):
- faults during downtime or recovery restart downtime from scratch;
- predictions revealed during downtime, recovery, or another prediction's
  handling are counted but ignored;
- work done between a no-credit reveal and the window start, and unprotected
  window work, count toward the job (the analysis books them as waste, which
  makes it an upper bound);
- work credit is the useful work actually done toward the current period,
  capped at ``t_regular - c_regular``, which coincides with elapsed time in
  the single-event case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    ConfigError,
    ModelValidityError,
    PolicyConfig,
    Platform,
    Predictor,
    Strategy,
)
from .tracegen import (
    STREAM_TRUST,
    EventKind,
    FaultDistribution,
    Trace,
    TraceConfig,
    extend,
    generate,
    make_stream,
)

_INF = float("inf")

# Phases of the single-job state machine. Work accrues in REG_WORK, PRE_WAIT
# (no-credit branch, working up to the window start) and WIN_WORK.
_REG_WORK = 0
_REG_CKPT = 1
_PRE_CKPT = 2
_PRE_WAIT = 3
_WIN_WORK = 4
_WIN_CKPT = 5
_DOWN = 6
_RECOVER = 7

_PHASE_NAMES = (
    "regular-work",
    "regular-ckpt",
    "proactive-ckpt",
    "pre-window-work",
    "window-work",
    "window-ckpt",
    "downtime",
    "recovery",
)


class Mode(Enum):
    """Coarse operating mode: inside a trusted prediction window or not."""

    REGULAR = "regular"
    PROACTIVE = "proactive"


@dataclass(slots=True)
class SimState:
    """Mutable execution state, exposed for event logs and debugging.

    work_done counts committed (checkpointed) work only and never decreases;
    work_since_ckpt is the work that a fault right now would destroy; w_reg
    is the regular-period credit that survives the current interruption.
    """

    clock: float = 0.0
    mode: Mode = Mode.REGULAR
    proactive_entered_at: float | None = None
    work_done: float = 0.0
    work_since_ckpt: float = 0.0
    w_reg: float = 0.0
    fault_idx: int = 0
    reveal_idx: int = 0


@dataclass(frozen=True)
class SimResult:
    """Outcome of one simulated job.

    The four time buckets plus work_time sum to makespan exactly (no idle
    state exists); work_time equals t_base + lost_work.
    """

    makespan: float
    waste: float
    n_unpredicted_faults: int
    n_true_predictions: int
    n_false_predictions: int
    n_predictions_trusted: int
    n_regular_ckpts: int
    n_proactive_ckpts: int
    lost_work: float
    work_time: float
    regular_ckpt_time: float
    proactive_ckpt_time: float
    down_time: float
    recovery_time: float


def waste_of(result: SimResult, t_base: float) -> float:
    """Fraction of the makespan not spent on surviving useful work."""
    if result.makespan < t_base:
        raise ConfigError("makespan below the job size; inconsistent result")
    return (result.makespan - t_base) / result.makespan


def _split_events(trace: Trace):
    """Sorted fault schedule and prediction reveals as flat lists."""
    faults: list[tuple[float, bool]] = []
    rev_times: list[float] = []
    rev_ws: list[float] = []
    rev_true: list[bool] = []
    for event in trace.events:
        if event.kind is EventKind.UNPREDICTED_FAULT:
            faults.append((event.fault_time, True))
        elif event.kind is EventKind.TRUE_PREDICTION:
            faults.append((event.fault_time, False))
            rev_times.append(event.reveal_time)
            rev_ws.append(event.window_start)
            rev_true.append(True)
        else:
            rev_times.append(event.reveal_time)
            rev_ws.append(event.window_start)
            rev_true.append(False)
    faults.sort()
    ft = [f[0] for f in faults]
    fu = [f[1] for f in faults]
    return ft, fu, rev_times, rev_ws, rev_true


def _resolve_trust_rng(rng, trace: Trace):
    if rng is None:
        return make_stream(trace.seed, STREAM_TRUST)
    if isinstance(rng, (int, np.integer)):
        return make_stream(int(rng), STREAM_TRUST)
    return rng


def simulate(
    policy: PolicyConfig,
    trace: Trace,
    t_base: float,
    platform: Platform,
    rng: int | np.random.Generator | None = None,
    log: list[str] | None = None,
    makespan_cap: float | None = None,
) -> SimResult:
    """Run one job of ``t_base`` seconds of useful work against ``trace``.

    ``rng`` seeds the trust rolls for 0 < trust_prob < 1; by default it is
    derived from the trace seed so reruns are reproducible. If the job
    outlives the trace horizon the trace is regenerated longer (needs the
    trace's generation config) and the run starts over. ``makespan_cap``
    abandons the run (model-validity error) once the clock passes the cap
    without the job having completed; searchers use it to bound the work
    spent on hopeless policies whose expected makespan is astronomical.
    """
    if t_base <= 0:
        raise ConfigError("t_base must be positive")
    if makespan_cap is not None and makespan_cap <= 0:
        raise ConfigError("makespan_cap must be positive")
    cap = makespan_cap if makespan_cap is not None else _INF
    strategy = policy.strategy
    cfg = trace.config
    predictor = None
    if cfg is not None and cfg.recall > 0.0:
        predictor = Predictor(cfg.precision, cfg.recall, cfg.i_window)
    if strategy in (Strategy.NO_CKPT_I, Strategy.WITH_CKPT_I) and cfg is None:
        raise ConfigError(
            f"{strategy.value} needs the window length; trace carries no generation config"
        )
    policy.check(platform, predictor)

    i_window = cfg.i_window if cfg is not None else 0.0
    margin = i_window + platform.c_proactive if strategy.uses_predictions else 0.0
    current = trace
    for _ in range(200):
        trust_rng = _resolve_trust_rng(rng, current)
        state, result = _run(
            policy, current, t_base, platform, trust_rng, i_window, log, cap
        )
        if result.makespan + margin <= current.horizon or math.isinf(current.horizon):
            return result
        if current.config is None:
            raise ConfigError(
                "job outlived the trace horizon and the trace carries no config to extend"
            )
        current = extend(current, max(2.0 * current.horizon, result.makespan + margin))
        if log is not None:
            log.append(f"{result.makespan:.6f} horizon-extended {current.horizon:.6f}")
    raise ConfigError("job failed to finish after 200 trace extensions")


def _run(
    policy: PolicyConfig,
    trace: Trace,
    t_base: float,
    platform: Platform,
    trust_rng,
    i_window: float,
    log: list[str] | None,
    cap: float = _INF,
) -> tuple[SimState, SimResult]:
    c = platform.c_regular
    cp = platform.c_proactive
    d = platform.downtime
    rec = platform.recovery
    trc = policy.t_regular - c
    t_p = policy.t_proactive if policy.t_proactive is not None else 0.0
    strategy = policy.strategy
    q = policy.trust_prob

    ft, fu, rt, rws, rtrue = _split_events(trace)
    n_f = len(ft)
    n_r = len(rt)

    s = SimState()
    t = 0.0
    committed = 0.0
    unprot = 0.0
    credit = 0.0  # w_reg: protected period credit
    period_done = 0.0  # useful work toward the current period
    snap_credit = 0.0  # period credit captured by the last completed checkpoint
    pending: float | None = None  # window start awaiting the current regular ckpt
    w_pending = 0.0
    phase = _REG_WORK
    phase_end = trc
    phase_ws = 0.0
    win_end = 0.0
    win_tail = False

    lost_work = 0.0
    work_time = 0.0
    reg_ckpt_time = 0.0
    pro_ckpt_time = 0.0
    down_time = 0.0
    recovery_time = 0.0
    n_unpred = 0
    n_true = 0
    n_false = 0
    n_trusted = 0
    n_reg_ckpts = 0
    n_pro_ckpts = 0
    fi = 0
    ri = 0

    def enter_regular(now: float) -> tuple[int, float]:
        return _REG_WORK, now + max(0.0, trc - period_done)

    def enter_window(now: float, ws: float) -> tuple[int, float, bool, float]:
        wend = ws + i_window
        if strategy is Strategy.INSTANT:
            ph, pe = enter_regular(now)
            return ph, pe, False, wend
        if strategy is Strategy.NO_CKPT_I:
            if now >= wend:
                ph, pe = enter_regular(now)
                return ph, pe, False, wend
            return _WIN_WORK, wend, True, wend
        return cycle(now, wend)

    def cycle(now: float, wend: float) -> tuple[int, float, bool, float]:
        remaining = wend - now
        if remaining <= 0.0:
            ph, pe = enter_regular(now)
            return ph, pe, False, wend
        if remaining >= t_p:
            return _WIN_WORK, now + (t_p - cp), False, wend
        return _WIN_WORK, wend, True, wend

    while True:
        nf = ft[fi] if fi < n_f else _INF
        nr = rt[ri] if ri < n_r else _INF
        t_next = phase_end
        if nf < t_next:
            t_next = nf
        if nr < t_next:
            t_next = nr

        dt = t_next - t
        if phase == _REG_WORK or phase == _PRE_WAIT or phase == _WIN_WORK:
            remaining_job = t_base - committed - unprot
            if remaining_job <= dt:
                t += remaining_job
                unprot += remaining_job
                work_time += remaining_job
                if phase == _REG_WORK:
                    period_done += remaining_job
                if log is not None:
                    log.append(f"{t:.6f} job-done {committed + unprot:.6f}")
                break
            unprot += dt
            work_time += dt
            if phase == _REG_WORK:
                period_done += dt
        elif phase == _REG_CKPT:
            reg_ckpt_time += dt
        elif phase == _DOWN:
            down_time += dt
        elif phase == _RECOVER:
            recovery_time += dt
        else:
            pro_ckpt_time += dt
        t = t_next
        if t > cap:
            raise ModelValidityError(
                f"simulated time exceeded the makespan cap {cap}", value=t
            )

        if t == phase_end:
            if phase == _REG_WORK:
                phase = _REG_CKPT
                phase_end = t + c
            elif phase == _REG_CKPT:
                committed += unprot
                unprot = 0.0
                credit = 0.0
                period_done = 0.0
                snap_credit = 0.0
                n_reg_ckpts += 1
                if pending is not None:
                    ws = pending
                    pending = None
                    if t < ws:
                        phase = _PRE_WAIT
                        phase_end = ws
                        phase_ws = ws
                    else:
                        phase, phase_end, win_tail, win_end = enter_window(t, ws)
                else:
                    phase, phase_end = enter_regular(t)
            elif phase == _PRE_CKPT:
                committed += unprot
                unprot = 0.0
                credit = w_pending
                period_done = w_pending
                snap_credit = w_pending
                n_pro_ckpts += 1
                phase, phase_end, win_tail, win_end = enter_window(t, phase_ws)
            elif phase == _PRE_WAIT:
                phase, phase_end, win_tail, win_end = enter_window(t, phase_ws)
            elif phase == _WIN_WORK:
                if win_tail:
                    phase, phase_end = enter_regular(t)
                else:
                    phase = _WIN_CKPT
                    phase_end = t + cp
            elif phase == _WIN_CKPT:
                committed += unprot
                unprot = 0.0
                snap_credit = credit
                n_pro_ckpts += 1
                phase, phase_end, win_tail, win_end = cycle(t, win_end)
            elif phase == _DOWN:
                phase = _RECOVER
                phase_end = t + rec
            else:
                credit = snap_credit
                period_done = snap_credit
                phase, phase_end = enter_regular(t)
            if log is not None:
                log.append(f"{t:.6f} {_PHASE_NAMES[phase]} {committed:.6f}")
        elif t == nf:
            unpredicted = bool(fu[fi])
            fi += 1
            lost_work += unprot
            unprot = 0.0
            pending = None
            if unpredicted:
                n_unpred += 1
            phase = _DOWN
            phase_end = t + d
            if log is not None:
                log.append(f"{t:.6f} fault {committed:.6f}")
        else:
            ws = float(rws[ri])
            if rtrue[ri]:
                n_true += 1
            else:
                n_false += 1
            ri += 1
            actionable = (phase == _REG_WORK or phase == _REG_CKPT) and pending is None
            if actionable:
                if q >= 1.0:
                    trusted = True
                elif q <= 0.0:
                    trusted = False
                else:
                    trusted = trust_rng.random() < q
                if trusted:
                    n_trusted += 1
                    if phase == _REG_WORK and t + cp <= ws:
                        w_pending = period_done if period_done < trc else trc
                        phase = _PRE_CKPT
                        phase_end = t + cp
                        phase_ws = ws
                    else:
                        credit = 0.0
                        period_done = 0.0
                        if phase == _REG_WORK:
                            phase = _PRE_WAIT
                            phase_end = ws
                            phase_ws = ws
                        else:
                            pending = ws
                    if log is not None:
                        log.append(f"{t:.6f} reveal-trusted {committed:.6f}")
                elif log is not None:
                    log.append(f"{t:.6f} reveal-untrusted {committed:.6f}")
            elif log is not None:
                log.append(f"{t:.6f} reveal-ignored {committed:.6f}")

    makespan = t
    s.clock = t
    s.mode = Mode.PROACTIVE if phase in (_WIN_WORK, _WIN_CKPT) else Mode.REGULAR
    s.work_done = committed
    s.work_since_ckpt = unprot
    s.w_reg = credit
    s.fault_idx = fi
    s.reveal_idx = ri
    result = SimResult(
        makespan=makespan,
        waste=(makespan - t_base) / makespan,
        n_unpredicted_faults=n_unpred,
        n_true_predictions=n_true,
        n_false_predictions=n_false,
        n_predictions_trusted=n_trusted,
        n_regular_ckpts=n_reg_ckpts,
        n_proactive_ckpts=n_pro_ckpts,
        lost_work=lost_work,
        work_time=work_time,
        regular_ckpt_time=reg_ckpt_time,
        proactive_ckpt_time=pro_ckpt_time,
        down_time=down_time,
        recovery_time=recovery_time,
    )
    return s, result


@dataclass(frozen=True)
class ReplicationConfig:
    """Everything needed to draw independent traces for one experiment."""

    platform: Platform
    dist: FaultDistribution
    t_base: float
    predictor: Predictor | None = None
    uniform_false: bool = False
    horizon_hint: float | None = None

    def trace_config(self) -> TraceConfig:
        predictor = self.predictor
        return TraceConfig(
            dist=self.dist.with_mean(self.platform.mtbf),
            precision=predictor.precision if predictor is not None else 1.0,
            recall=predictor.recall if predictor is not None else 0.0,
            i_window=predictor.window if predictor is not None else self.platform.c_proactive,
            c_proactive=self.platform.c_proactive,
            uniform_false=self.uniform_false,
        )


@dataclass(frozen=True)
class ReplicateStats:
    """Sample statistics over independent replications."""

    n_reps: int
    makespan_mean: float
    makespan_stderr: float
    waste_mean: float
    waste_stderr: float
    makespans: tuple[float, ...] = field(repr=False)
    wastes: tuple[float, ...] = field(repr=False)


def _stats(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    if len(values) < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(len(values)))


def replicate(
    policy: PolicyConfig,
    config: ReplicationConfig,
    n_reps: int,
    base_seed: int,
) -> ReplicateStats:
    """Simulate ``n_reps`` independent traces with seeds base_seed..+n-1.

    Traces depend only on (config, seed), never on the policy, so two
    policies replicated with the same base seed run on paired traces.
    """
    if n_reps < 1:
        raise ConfigError("n_reps must be at least 1")
    trace_cfg = config.trace_config()
    horizon = config.horizon_hint
    if horizon is None:
        horizon = 2.5 * config.t_base
    makespans = np.empty(n_reps, dtype=float)
    wastes = np.empty(n_reps, dtype=float)
    for k in range(n_reps):
        trace = generate(trace_cfg, horizon, base_seed + k)
        result = simulate(policy, trace, config.t_base, config.platform)
        makespans[k] = result.makespan
        wastes[k] = result.waste
    mk_mean, mk_err = _stats(makespans)
    w_mean, w_err = _stats(wastes)
    return ReplicateStats(
        n_reps=n_reps,
        makespan_mean=mk_mean,
        makespan_stderr=mk_err,
        waste_mean=w_mean,
        waste_stderr=w_err,
        makespans=tuple(float(x) for x in makespans),
        wastes=tuple(float(x) for x in wastes),
    )
