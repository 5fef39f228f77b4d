"""Location-scale observation models and likelihood evaluation.

The data model is m independent observations with a shared scale:

    f(y | eta) = prod_j  sigma^-1 rho((y_j - eta_j) / sigma)

where ``rho`` is a symmetric unit-variance density on R.  Only the Gaussian
ships built in; other symmetric densities can be registered (they are needed
to exercise the location-scale generality of the EABF bound).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable

import numpy as np

from .errors import ContractError, NumericInputError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclasses.dataclass(frozen=True)
class RhoDensity:
    """A symmetric, unit-variance standardized density."""

    name: str
    log_pdf: Callable[[np.ndarray], np.ndarray]
    at_zero: float


def _gaussian_log_pdf(x):
    return -0.5 * np.asarray(x) ** 2 - _LOG_SQRT_2PI


_RHO_REGISTRY: dict[str, RhoDensity] = {}


def register_rho(name: str, log_pdf, at_zero: float) -> RhoDensity:
    """Register a symmetric unit-variance density under ``name``.

    Symmetry and positivity at zero are checked on a probe grid; violations
    raise ContractError so a bad registration fails fast rather than
    corrupting every downstream likelihood.
    """
    probe = np.linspace(0.0, 4.0, 9)
    fwd = np.asarray(log_pdf(probe), dtype=float)
    bwd = np.asarray(log_pdf(-probe), dtype=float)
    if not np.allclose(fwd, bwd, atol=1e-12):
        raise ContractError(f"density {name!r} is not symmetric on the probe grid")
    if not (np.isfinite(at_zero) and at_zero > 0):
        raise ContractError(f"density {name!r} must have finite positive value at 0")
    if not np.isclose(math.exp(float(log_pdf(np.array(0.0)))), at_zero, rtol=1e-10):
        raise ContractError(f"density {name!r}: at_zero does not match log_pdf(0)")
    rho = RhoDensity(name=name, log_pdf=log_pdf, at_zero=at_zero)
    _RHO_REGISTRY[name] = rho
    return rho


register_rho("gaussian", _gaussian_log_pdf, 1.0 / math.sqrt(2.0 * math.pi))


def get_rho(name: str) -> RhoDensity:
    try:
        return _RHO_REGISTRY[name]
    except KeyError:
        raise ContractError(f"unknown rho density {name!r}; registered: {sorted(_RHO_REGISTRY)}")


@dataclasses.dataclass(frozen=True)
class LocationScaleModel:
    """Independent location-scale observation model.

    sigma : noise standard deviation, in data units (known and fixed).
    m     : number of observations.
    rho   : name of a registered symmetric unit-variance density.
    """

    sigma: float
    m: int
    rho: str = "gaussian"

    def __post_init__(self):
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise ContractError(f"sigma must be positive and finite, got {self.sigma}")
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ContractError(f"m must be an integer >= 1, got {self.m}")
        get_rho(self.rho)  # fail early on unknown density

    @property
    def rho_density(self) -> RhoDensity:
        return get_rho(self.rho)


@dataclasses.dataclass(frozen=True)
class DataSet:
    """Observations paired with their design locations."""

    y: np.ndarray
    design: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        design = np.asarray(self.design, dtype=float)
        if y.ndim != 1 or design.ndim != 1 or len(y) != len(design):
            raise ContractError(
                f"y and design must be 1-d with equal length, got {y.shape} vs {design.shape}"
            )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "design", design)

    @property
    def m(self) -> int:
        return len(self.y)


def log_likelihood(model: LocationScaleModel, y, eta) -> float:
    """Log-likelihood sum_j [-log sigma + log rho((y_j - eta_j)/sigma)].

    ``y`` may be a DataSet or a plain vector; ``eta`` must have length m.
    """
    yv = y.y if isinstance(y, DataSet) else np.asarray(y, dtype=float)
    ev = np.asarray(eta, dtype=float)
    if yv.shape != (model.m,) or ev.shape != (model.m,):
        raise ContractError(
            f"expected y and eta of shape ({model.m},), got {yv.shape} and {ev.shape}"
        )
    if not np.all(np.isfinite(ev)):
        raise NumericInputError("eta contains non-finite entries")
    if not np.all(np.isfinite(yv)):
        raise NumericInputError("y contains non-finite entries")
    z = (yv - ev) / model.sigma
    return float(np.sum(model.rho_density.log_pdf(z)) - model.m * math.log(model.sigma))


def rho_at_zero(model: LocationScaleModel) -> float:
    """rho(0) of the standardized density; 1/sqrt(2 pi) for the Gaussian."""
    return model.rho_density.at_zero


def m_integral_gaussian(sigma: float, m: int) -> float:
    """Closed form sqrt(2/pi) * m / sigma of the likelihood-sensitivity integral.

    This is the Gaussian value of the integral M(eta) that converts a
    forward-map error into an expected absolute Bayes-factor contribution;
    it does not depend on eta.
    """
    if not sigma > 0:
        raise ContractError("sigma must be positive")
    if not m >= 1:
        raise ContractError("m must be >= 1")
    return math.sqrt(2.0 / math.pi) * m / sigma
