"""Random event traces: renewal faults, recall labeling, and prediction windows.

Fault dates come from a renewal process (Exponential or Weibull interarrivals
scaled to the platform MTBF). Each fault is independently labeled predicted
with probability equal to the predictor recall; predicted faults receive a
window of length I placed uniformly around them. An independent renewal
stream of false predictions, scaled so the empirical precision matches the
predictor, is merged in. Every prediction is revealed c_proactive seconds
before its window starts; unpredicted faults are revealed when they strike.

All randomness flows through named sub-streams of a counter-based generator
(Philox), one per purpose, so extending a trace or adding a stream never
perturbs the draws of another.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import ConfigError

# Sub-stream indices. The trust stream is reserved for the simulator's
# per-prediction trust rolls so they never disturb trace generation.
STREAM_FAULTS = 0
STREAM_LABELS = 1
STREAM_WINDOWS = 2
STREAM_FALSE_PREDICTIONS = 3
STREAM_TRUST = 4


def make_stream(seed: int, stream: int) -> np.random.Generator:
    """Independent, reproducible generator for (seed, sub-stream index)."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(sequence))


class DistKind(enum.Enum):
    EXPONENTIAL = "exp"
    WEIBULL = "weibull"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class FaultDistribution:
    """An interarrival law scaled so its expectation equals ``mean``."""

    kind: DistKind
    mean: float
    shape: float | None = None

    def __post_init__(self) -> None:
        if self.mean <= 0:
            raise ConfigError("distribution mean must be positive")
        if self.kind is DistKind.WEIBULL:
            if self.shape is None or self.shape <= 0:
                raise ConfigError("weibull requires a positive shape parameter")
        elif self.shape is not None:
            raise ConfigError(f"{self.kind.value} takes no shape parameter")

    @classmethod
    def parse(cls, text: str, mean: float) -> "FaultDistribution":
        """Parse 'exp', 'weibull:<shape>' or 'uniform'."""
        name, _, arg = text.partition(":")
        name = name.strip().lower()
        if name == "exp" and not arg:
            return cls(DistKind.EXPONENTIAL, mean)
        if name == "weibull" and arg:
            try:
                shape = float(arg)
            except ValueError:
                raise ConfigError(f"bad weibull shape {arg!r}") from None
            return cls(DistKind.WEIBULL, mean, shape)
        if name == "uniform" and not arg:
            return cls(DistKind.UNIFORM, mean)
        raise ConfigError(f"unknown distribution {text!r}")

    @property
    def label(self) -> str:
        if self.kind is DistKind.WEIBULL:
            return f"weibull:{self.shape:g}"
        return self.kind.value

    def with_mean(self, mean: float) -> "FaultDistribution":
        return replace(self, mean=mean)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n interarrivals by inverse transform."""
        u = rng.random(n)
        if self.kind is DistKind.EXPONENTIAL:
            return -self.mean * np.log1p(-u)
        if self.kind is DistKind.WEIBULL:
            scale = self.mean / math.gamma(1.0 + 1.0 / self.shape)
            return scale * (-np.log1p(-u)) ** (1.0 / self.shape)
        return 2.0 * self.mean * u


def sample_interarrival(dist: FaultDistribution, rng: np.random.Generator) -> float:
    """One interarrival time from the scaled distribution."""
    return float(dist.sample(rng, 1)[0])


class EventKind(enum.IntEnum):
    """Trace event taxonomy; numeric order breaks reveal-time ties."""

    UNPREDICTED_FAULT = 0
    TRUE_PREDICTION = 1
    FALSE_PREDICTION = 2

    @property
    def token(self) -> str:
        return _KIND_TOKENS[self]


_KIND_TOKENS = {
    EventKind.UNPREDICTED_FAULT: "fault",
    EventKind.TRUE_PREDICTION: "truepred",
    EventKind.FALSE_PREDICTION: "falsepred",
}
_TOKEN_KINDS = {token: kind for kind, token in _KIND_TOKENS.items()}


@dataclass(frozen=True)
class Event:
    """One trace event as the scheduler learns about it.

    Unpredicted faults are revealed at the instant they strike
    (reveal_time == fault_time, no window). Predictions are revealed
    c_proactive seconds before the window opens; true predictions carry the
    hidden fault date inside their window, false ones carry no fault.
    """

    reveal_time: float
    kind: EventKind
    window_start: float | None = None
    fault_time: float | None = None

    def sort_key(self) -> tuple[float, int]:
        return (self.reveal_time, int(self.kind))


@dataclass(frozen=True)
class TraceConfig:
    """Everything needed to regenerate a trace except horizon and seed."""

    dist: FaultDistribution
    precision: float
    recall: float
    i_window: float
    c_proactive: float
    uniform_false: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.precision <= 1.0:
            raise ConfigError("precision must lie in (0, 1]")
        if not 0.0 <= self.recall <= 1.0:
            raise ConfigError("recall must lie in [0, 1]")
        if self.i_window <= 0:
            raise ConfigError("i_window must be positive")
        if self.c_proactive <= 0:
            raise ConfigError("c_proactive must be positive")

    def digest(self) -> str:
        payload = {
            "dist": self.dist.label,
            "mean": self.dist.mean,
            "precision": self.precision,
            "recall": self.recall,
            "i_window": self.i_window,
            "c_proactive": self.c_proactive,
            "uniform_false": self.uniform_false,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class Trace:
    """Reveal-ordered events up to a horizon, regenerable from (config, seed)."""

    events: tuple[Event, ...]
    horizon: float
    seed: int
    config: TraceConfig | None = None
    n_clipped: int = 0


def gen_fault_times(
    dist: FaultDistribution, horizon: float, rng: np.random.Generator
) -> np.ndarray:
    """Renewal arrival dates truncated at the horizon.

    Interarrivals are consumed strictly sequentially from the stream, so a
    longer horizon with the same seed extends the same arrival sequence.
    """
    if horizon <= 0:
        raise ConfigError("horizon must be positive")
    chunks: list[np.ndarray] = []
    total = 0.0
    block = max(64, int(1.2 * horizon / dist.mean) + 16)
    while total <= horizon:
        gaps = dist.sample(rng, block)
        chunks.append(gaps)
        total += float(gaps.sum())
        block = max(64, block // 2)
    times = np.concatenate(chunks).cumsum()
    return times[times <= horizon]


def label_predicted(
    faults: np.ndarray, r: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Split fault dates into (predicted, unpredicted) with recall r."""
    if not 0.0 <= r <= 1.0:
        raise ConfigError("recall must lie in [0, 1]")
    mask = rng.random(len(faults)) < r
    return faults[mask], faults[~mask]


def _window_events(
    window_starts: np.ndarray,
    kind: EventKind,
    fault_times: np.ndarray | None,
    c_proactive: float,
) -> tuple[list[Event], int]:
    reveals = window_starts - c_proactive
    clipped = int((reveals < 0.0).sum())
    reveals = np.maximum(reveals, 0.0)
    events = []
    for idx in range(len(window_starts)):
        events.append(
            Event(
                reveal_time=float(reveals[idx]),
                kind=kind,
                window_start=float(window_starts[idx]),
                fault_time=float(fault_times[idx]) if fault_times is not None else None,
            )
        )
    return events, clipped


def attach_windows(
    predicted_faults: np.ndarray,
    i_window: float,
    c_proactive: float,
    rng: np.random.Generator,
) -> list[Event]:
    """Wrap each predicted fault in a uniformly placed window of length I.

    The fault date is uniform within its window, so the mean offset matches
    the I/2 used by the analytic model. Windows whose reveal date would be
    negative are revealed at time 0 instead (clipped).
    """
    if i_window <= 0:
        raise ConfigError("i_window must be positive")
    faults = np.asarray(predicted_faults, dtype=float)
    offsets = rng.random(len(faults)) * i_window
    events, _ = _window_events(
        faults - offsets, EventKind.TRUE_PREDICTION, faults, c_proactive
    )
    return events


def false_prediction_mean(p: float, r: float, mu: float) -> float:
    """Mean interarrival of false predictions: p*mu / (r*(1-p))."""
    if not 0.0 < p < 1.0 or r <= 0.0:
        raise ConfigError("false predictions require 0 < p < 1 and r > 0")
    return p * mu / (r * (1.0 - p))


def gen_false_predictions(
    dist: FaultDistribution,
    p: float,
    r: float,
    mu: float,
    i_window: float,
    c_proactive: float,
    horizon: float,
    rng: np.random.Generator,
    uniform: bool = False,
) -> list[Event]:
    """Independent renewal stream of predictions that announce no fault.

    Same distribution family as the fault trace (or uniform when requested),
    scaled so that combining it with the true predictions reproduces the
    predictor precision. A perfect-precision or zero-recall predictor emits
    none.
    """
    if p >= 1.0 or r <= 0.0:
        return []
    mean = false_prediction_mean(p, r, mu)
    family = (
        FaultDistribution(DistKind.UNIFORM, mean)
        if uniform
        else dist.with_mean(mean)
    )
    starts = gen_fault_times(family, horizon, rng)
    events, _ = _window_events(starts, EventKind.FALSE_PREDICTION, None, c_proactive)
    return events


def merge(
    true_events: list[Event],
    false_events: list[Event],
    unpredicted: list[Event],
    horizon: float | None = None,
    seed: int = 0,
    config: TraceConfig | None = None,
) -> Trace:
    """Combine the three streams into one reveal-ordered trace.

    Ties resolve by kind: unpredicted fault, then true prediction, then false
    prediction.
    """
    events = sorted(
        list(unpredicted) + list(true_events) + list(false_events),
        key=Event.sort_key,
    )
    if horizon is None:
        horizon = events[-1].reveal_time if events else 0.0
    return Trace(events=tuple(events), horizon=horizon, seed=seed, config=config)


def generate(config: TraceConfig, horizon: float, seed: int) -> Trace:
    """Generate the full merged trace for (config, seed) up to horizon."""
    fault_rng = make_stream(seed, STREAM_FAULTS)
    label_rng = make_stream(seed, STREAM_LABELS)
    window_rng = make_stream(seed, STREAM_WINDOWS)
    false_rng = make_stream(seed, STREAM_FALSE_PREDICTIONS)

    faults = gen_fault_times(config.dist, horizon, fault_rng)
    if config.recall > 0.0:
        predicted, unpredicted = label_predicted(faults, config.recall, label_rng)
    else:
        predicted, unpredicted = faults[:0], faults
    offsets = window_rng.random(len(predicted)) * config.i_window
    true_events, clipped_true = _window_events(
        predicted - offsets,
        EventKind.TRUE_PREDICTION,
        predicted,
        config.c_proactive,
    )
    false_events: list[Event] = []
    clipped_false = 0
    if 0.0 < config.precision < 1.0 and config.recall > 0.0:
        mean = false_prediction_mean(
            config.precision, config.recall, config.dist.mean
        )
        family = (
            FaultDistribution(DistKind.UNIFORM, mean)
            if config.uniform_false
            else config.dist.with_mean(mean)
        )
        starts = gen_fault_times(family, horizon, false_rng)
        false_events, clipped_false = _window_events(
            starts, EventKind.FALSE_PREDICTION, None, config.c_proactive
        )
    unpredicted_events = [
        Event(reveal_time=float(t), kind=EventKind.UNPREDICTED_FAULT, fault_time=float(t))
        for t in unpredicted
    ]
    trace = merge(
        true_events,
        false_events,
        unpredicted_events,
        horizon=horizon,
        seed=seed,
        config=config,
    )
    return replace(trace, n_clipped=clipped_true + clipped_false)


def extend(trace: Trace, new_horizon: float) -> Trace:
    """Same trace, longer horizon; the existing prefix is preserved exactly."""
    if trace.config is None:
        raise ConfigError("trace carries no generation config; cannot extend")
    if new_horizon <= trace.horizon:
        return trace
    return generate(trace.config, new_horizon, trace.seed)


def dump_trace(trace: Trace, path: str) -> None:
    """Write the line-oriented text form: reveal_time kind window_start fault_time."""
    digest = trace.config.digest() if trace.config is not None else "-"
    lines = [f"# seed={trace.seed} config={digest} horizon={trace.horizon!r}"]
    for event in trace.events:
        fields = [
            repr(event.reveal_time),
            event.kind.token,
            "-" if event.window_start is None else repr(event.window_start),
            "-" if event.fault_time is None else repr(event.fault_time),
        ]
        lines.append(" ".join(fields))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def load_trace(path: str) -> Trace:
    """Read a dumped trace back; the generation config is not reconstructed."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        if not header.startswith("#"):
            raise ConfigError(f"{path}: missing trace header")
        meta = dict(
            part.split("=", 1) for part in header.lstrip("# ").split() if "=" in part
        )
        events = []
        for line in handle:
            line = line.strip()
            if not line:
                continue
            reveal, token, window_start, fault_time = line.split()
            events.append(
                Event(
                    reveal_time=float(reveal),
                    kind=_TOKEN_KINDS[token],
                    window_start=None if window_start == "-" else float(window_start),
                    fault_time=None if fault_time == "-" else float(fault_time),
                )
            )
    return Trace(
        events=tuple(events),
        horizon=float(meta.get("horizon", 0.0)),
        seed=int(meta.get("seed", 0)),
    )
