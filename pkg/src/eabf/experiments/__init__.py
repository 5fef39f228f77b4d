"""Experiment runners and their configurations."""

from .config import (
    DeconvConfig,
    Heat1dConfig,
    Heat2dConfig,
    RatesConfig,
    WaveConfig,
    config_class,
    default_config,
    load_config,
)
from .deconv import run_deconv
from .heat1d import run_heat1d
from .heat2d import run_heat2d
from .rates import run_rates
from .wave import run_wave

RUNNERS = {
    "wave": run_wave,
    "deconv": run_deconv,
    "heat1d": run_heat1d,
    "heat2d": run_heat2d,
    "rates": run_rates,
}

__all__ = [
    "DeconvConfig",
    "Heat1dConfig",
    "Heat2dConfig",
    "RatesConfig",
    "WaveConfig",
    "config_class",
    "default_config",
    "load_config",
    "run_wave",
    "run_deconv",
    "run_heat1d",
    "run_heat2d",
    "run_rates",
    "RUNNERS",
]
