"""Experiment configurations: defaults, validation, JSON round-trip."""

from __future__ import annotations

import dataclasses
import json
import math

from ..errors import ConfigError

_REGISTRY = {}


def _register(name):
    def wrap(cls):
        _REGISTRY[name] = cls
        cls.experiment = name
        return cls

    return wrap


class _BaseConfig:
    def validate(self) -> None:
        if not isinstance(self.seed, int):
            raise ConfigError("seed is mandatory and must be an integer")

    def _require_positive(self, *names):
        for name in names:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        out = {"experiment": self.experiment}
        out.update(dataclasses.asdict(self))
        return out

    @classmethod
    def from_dict(cls, data: dict):
        data = dict(data)
        exp = data.pop("experiment", cls.experiment)
        if exp != cls.experiment:
            raise ConfigError(f"config is for experiment {exp!r}, expected {cls.experiment!r}")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        lists = {f.name for f in dataclasses.fields(cls) if f.type.startswith("tuple")}
        for name in lists & set(data):
            data[name] = tuple(data[name])
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


@_register("wave")
@dataclasses.dataclass
class WaveConfig(_BaseConfig):
    seed: int = 42
    sigma: float = 0.025
    m: int = 15
    true_coefficients: tuple = (1.5, 0.8, 0.7, 0.3)
    noise_multiplier: float = 1.0
    dim_mean: float = 10.0
    k_cut_small: int = 15
    k_cut_big: int = 20
    prior_coeff_std: float = 1.0
    b: float = 0.05

    def validate(self):
        super().validate()
        self._require_positive("sigma", "m", "dim_mean", "prior_coeff_std", "b")
        if self.noise_multiplier < 0:
            raise ConfigError("noise_multiplier must be nonnegative")
        if not 0 < self.k_cut_small <= self.k_cut_big:
            raise ConfigError("need 0 < k_cut_small <= k_cut_big")


@_register("deconv")
@dataclasses.dataclass
class DeconvConfig(_BaseConfig):
    seed: int = 42
    sigma: float = 0.02
    m: int = 10
    kernel_halfwidth: float = 0.1
    true_coefficients: tuple = (0.9, -0.4, -0.4, -0.3, -0.3, -0.2, -0.2)
    coeff_bound: float = 1.0
    coeff_std: float = 0.3
    coeff_decay: float = math.log(10.0) / 10.0
    dim_mean: float = 8.0
    k_max: int = 12
    b: float = 0.05
    tail_target: float = 0.01
    simpson_start: int = 4
    simpson_max_refinements: int = 8
    n_iterations: int = 400_000
    burn_in: int = 4_000
    thin: int = 4
    p_jump: float = 0.3
    rw_scale_factor: float = 2.4
    marginal_pairs: int = 4

    def validate(self):
        super().validate()
        self._require_positive(
            "sigma", "m", "kernel_halfwidth", "coeff_bound", "coeff_std",
            "dim_mean", "k_max", "b", "tail_target", "simpson_start",
            "n_iterations", "thin", "rw_scale_factor",
        )
        if not 0 < self.kernel_halfwidth < 1:
            raise ConfigError("kernel_halfwidth must be in (0, 1)")
        if self.simpson_start % 2 != 0:
            raise ConfigError("simpson_start must be even")
        if not 0 < self.p_jump < 1:
            raise ConfigError("p_jump must be in (0, 1)")
        if self.burn_in < 0 or self.burn_in >= self.n_iterations:
            raise ConfigError("burn_in must be in [0, n_iterations)")
        if self.tail_target >= self.b:
            raise ConfigError("tail_target must stay below b")


@_register("heat1d")
@dataclasses.dataclass
class Heat1dConfig(_BaseConfig):
    seed: int = 42
    sigma: float = 0.0005
    m: int = 30
    n_knots: int = 21
    gmrf_tau: float = 120.0
    gmrf_upper: float = math.log(10.0)
    gmrf_gibbs_sweeps: int = 60
    conductivity_floor: float = 0.5
    true_k0: float = 5.0
    true_r: float = 0.9
    true_steepness: float = 20.0
    true_midpoint_scale: float = 2.0
    b: float = 0.05
    fem_start: int = 50
    fem_step: int = 50
    fem_max_refinements: int = 12
    control_elements: int = 500
    reference_elements: int = 4_000
    laplace_elements: int = 200
    prior_validation_draws: int = 100
    n_iterations: int = 20_000
    burn_in: int = 2_000
    thin: int = 5
    p_walk: float = 0.3
    rw_scale_factor: float = 1.0

    def validate(self):
        super().validate()
        self._require_positive(
            "sigma", "m", "n_knots", "gmrf_tau", "gmrf_upper", "conductivity_floor",
            "true_k0", "b",
            "fem_start", "fem_step", "control_elements", "reference_elements",
            "laplace_elements", "n_iterations", "thin", "rw_scale_factor",
        )
        if self.prior_validation_draws < 0:
            raise ConfigError("prior_validation_draws must be nonnegative")
        if self.n_knots < 4:
            raise ConfigError("need at least 4 spline knots")
        if not 0 < self.p_walk <= 1:
            raise ConfigError("p_walk must be in (0, 1]")
        if self.burn_in < 0 or self.burn_in >= self.n_iterations:
            raise ConfigError("burn_in must be in [0, n_iterations)")


@_register("heat2d")
@dataclasses.dataclass
class Heat2dConfig(_BaseConfig):
    seed: int = 42
    sigma: float = 0.3
    design_side: int = 5
    alpha_diff: float = 0.01
    t1: float = 0.3
    true_b: float = 3.0
    true_c: float = 5.0
    prior_b_shape: float = 2.0
    prior_b_rate: float = 0.7
    prior_c_shape: float = 2.0
    prior_c_rate: float = 0.4
    prior_upper: float = 8.0
    b: float = 0.05
    grid_start_dx: float = 0.1
    grid_start_dt: float = 0.268
    max_refinements: int = 4
    n_iterations: int = 100_000
    burn_in: int = 2_000
    thin: int = 1
    p_walk: float = 0.3
    rw_scale: float = 0.15

    def validate(self):
        super().validate()
        self._require_positive(
            "sigma", "design_side", "alpha_diff", "t1", "prior_b_shape",
            "prior_b_rate", "prior_c_shape", "prior_c_rate", "prior_upper",
            "b", "grid_start_dx", "grid_start_dt", "n_iterations", "thin", "rw_scale",
        )
        if self.burn_in < 0 or self.burn_in >= self.n_iterations:
            raise ConfigError("burn_in must be in [0, n_iterations)")
        if not 0 < self.p_walk <= 1:
            raise ConfigError("p_walk must be in (0, 1]")


@_register("rates")
@dataclasses.dataclass
class RatesConfig(_BaseConfig):
    seed: int = 42
    which: tuple = ("n", "k", "lemma")
    fm_error_constant: float = 0.5
    n_list_p2: tuple = (4, 8, 16, 32, 64)
    n_list_p4: tuple = (2, 4, 8, 16)
    k_list: tuple = (2, 4, 8)
    lemma_constant: float = 0.5
    lemma_oscillatory_constant: float = 0.05
    lemma_order: float = 2.0
    lemma_n_list: tuple = (4, 8, 16, 32)

    def validate(self):
        super().validate()
        bad = set(self.which) - {"n", "k", "lemma"}
        if bad:
            raise ConfigError(f"unknown rate experiments: {sorted(bad)}")
        self._require_positive("fm_error_constant", "lemma_constant", "lemma_order")


def config_class(experiment: str):
    try:
        return _REGISTRY[experiment]
    except KeyError:
        raise ConfigError(f"unknown experiment {experiment!r}; known: {sorted(_REGISTRY)}")


def default_config(experiment: str):
    cfg = config_class(experiment)()
    cfg.validate()
    return cfg


def load_config(path, experiment: str | None = None):
    with open(path) as fh:
        data = json.load(fh)
    exp = experiment or data.get("experiment")
    if exp is None:
        raise ConfigError("config file does not name an experiment and none was given")
    return config_class(exp).from_dict(data)
