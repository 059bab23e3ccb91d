"""Checkpoint scheduling under fault-prediction windows.

Analytic waste model and discrete-event simulator for periodic checkpointing
with a fault predictor that announces prediction windows, plus the experiment
harness that reproduces the reference tables and sweeps.
"""

from .core import (
    ConfigError,
    ModelValidityError,
    Platform,
    PolicyConfig,
    Predictor,
    Rates,
    Strategy,
    StrategyInapplicableError,
    derived_rates,
    expected_fault_offset,
    platform_mtbf,
)

__all__ = [
    "ConfigError",
    "ModelValidityError",
    "Platform",
    "PolicyConfig",
    "Predictor",
    "Rates",
    "Strategy",
    "StrategyInapplicableError",
    "derived_rates",
    "expected_fault_offset",
    "platform_mtbf",
]

__version__ = "0.1.0"
