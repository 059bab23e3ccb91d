"""Shared value objects: platform, predictor, failure rates, and policy configuration.

All public APIs take and return seconds (double precision). Conversions to
minutes or days happen only at the reporting layer. Year-based inputs use
365.25 days per year.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

SECONDS_PER_DAY = 86400.0
SECONDS_PER_YEAR = 365.25 * SECONDS_PER_DAY


class ConfigError(ValueError):
    """Invalid parameter or parameter combination."""


class ModelValidityError(ValueError):
    """The analytic model left its validity region.

    Carries the offending raw value (waste, radicand, denominator) so callers
    can report where the model breaks instead of silently clamping.
    """

    def __init__(self, message: str, value: float | None = None):
        super().__init__(message)
        self.value = value


class StrategyInapplicableError(ModelValidityError):
    """The strategy cannot run under this configuration at all."""


class Strategy(enum.Enum):
    """The five scheduling heuristics.

    Declaration order is the deterministic tie-break order used when two
    strategies achieve the same analytic waste.
    """

    DALY = "daly"
    RFO = "rfo"
    INSTANT = "instant"
    NO_CKPT_I = "nockpti"
    WITH_CKPT_I = "withckpti"

    @property
    def uses_predictions(self) -> bool:
        return self in (Strategy.INSTANT, Strategy.NO_CKPT_I, Strategy.WITH_CKPT_I)


STRATEGY_ORDER: tuple[Strategy, ...] = tuple(Strategy)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


@dataclass(frozen=True)
class Platform:
    """An aggregated platform of n_procs identical processors.

    mu_ind is the individual processor MTBF; the platform MTBF is
    mu_ind / n_procs and must exceed the regular checkpoint cost for any
    checkpointing policy to make sense.
    """

    n_procs: int
    mu_ind: float
    c_regular: float
    c_proactive: float
    downtime: float
    recovery: float

    def __post_init__(self) -> None:
        _require(self.n_procs >= 1, "n_procs must be a positive integer")
        _require(self.mu_ind > 0, "mu_ind must be positive")
        _require(self.c_regular > 0, "c_regular must be positive")
        _require(self.c_proactive > 0, "c_proactive must be positive")
        _require(self.downtime >= 0, "downtime must be non-negative")
        _require(self.recovery >= 0, "recovery must be non-negative")
        _require(
            self.mtbf > self.c_regular,
            "platform MTBF must exceed the regular checkpoint cost",
        )

    @property
    def mtbf(self) -> float:
        return self.mu_ind / self.n_procs


def platform_mtbf(mu_ind: float, n_procs: int) -> float:
    """Platform MTBF of n_procs processors with individual MTBF mu_ind."""
    _require(mu_ind > 0, "mu_ind must be positive")
    _require(n_procs >= 1, "n_procs must be a positive integer")
    return mu_ind / n_procs


@dataclass(frozen=True)
class Predictor:
    """Fault predictor characterized by precision, recall and window length.

    precision: fraction of predictions that are true (p, in (0, 1]).
    recall: fraction of faults that are predicted (r, in [0, 1]).
    window: length I of the prediction window in seconds. Predictions are
    revealed c_proactive seconds before their window starts.
    """

    precision: float
    recall: float
    window: float

    def __post_init__(self) -> None:
        _require(0 < self.precision <= 1, "precision must lie in (0, 1]")
        _require(0 <= self.recall <= 1, "recall must lie in [0, 1]")
        _require(self.window > 0, "window length must be positive")


@dataclass(frozen=True)
class Rates:
    """Fault rates split by predictability, stored per second.

    Rates rather than mean times keep recall 0 and 1 representable without
    infinities: unpredicted = (1-r)/mu, predicted = r/(p*mu). The predicted
    rate counts predicted events (true faults plus the false predictions
    implied by precision p).
    """

    unpredicted: float
    predicted: float

    @property
    def total(self) -> float:
        return self.unpredicted + self.predicted


def derived_rates(mu: float, predictor: Predictor) -> Rates:
    """Split the platform fault rate 1/mu by predictor recall and precision."""
    _require(mu > 0, "mu must be positive")
    return Rates(
        unpredicted=(1.0 - predictor.recall) / mu,
        predicted=predictor.recall / (predictor.precision * mu),
    )


def expected_fault_offset(predictor: Predictor, override: float | None = None) -> float:
    """Expected position of the fault inside its prediction window.

    Defaults to the window midpoint I/2 (uniform placement); an override may
    supply any value in [0, I].
    """
    if override is None:
        return predictor.window / 2.0
    _require(
        0.0 <= override <= predictor.window,
        "expected fault offset must lie within the window",
    )
    return override


@dataclass(frozen=True)
class PolicyConfig:
    """A strategy plus its scheduling periods and trust probability.

    t_proactive is carried even for strategies that ignore it; it is
    validated only where meaningful (WITH_CKPT_I). trust_prob defaults to 0
    for the no-prediction strategies (which must not trust predictions) and
    to 1 for prediction-aware ones.
    """

    strategy: Strategy
    t_regular: float
    t_proactive: float | None = None
    trust_prob: float | None = None

    def __post_init__(self) -> None:
        _require(self.t_regular > 0, "t_regular must be positive")
        q = self.trust_prob
        if q is None:
            q = 0.0 if not self.strategy.uses_predictions else 1.0
            object.__setattr__(self, "trust_prob", q)
        _require(0.0 <= q <= 1.0, "trust_prob must lie in [0, 1]")
        if not self.strategy.uses_predictions:
            _require(q == 0.0, f"{self.strategy.value} must not trust predictions (trust_prob 0)")
        if self.t_proactive is not None:
            _require(self.t_proactive > 0, "t_proactive must be positive")

    def check(self, platform: Platform, predictor: Predictor | None = None) -> None:
        """Validate the policy against a platform (and predictor, if used)."""
        _require(
            self.t_regular > platform.c_regular,
            "t_regular must exceed the regular checkpoint cost",
        )
        if self.strategy is Strategy.WITH_CKPT_I:
            if predictor is None:
                raise ConfigError("withckpti requires a predictor")
            if predictor.window < platform.c_proactive:
                raise StrategyInapplicableError(
                    "withckpti requires the window to fit at least one proactive "
                    f"checkpoint (I={predictor.window} < Cp={platform.c_proactive})",
                    value=predictor.window,
                )
            if self.t_proactive is None:
                raise ConfigError("withckpti requires t_proactive")
            _require(
                platform.c_proactive <= self.t_proactive <= predictor.window,
                "t_proactive must lie in [c_proactive, window]",
            )
