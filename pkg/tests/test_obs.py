"""Observation-model tests: likelihood arithmetic and the sensitivity integral."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from eabf.errors import ContractError, NumericInputError
from eabf.obs import (
    DataSet,
    LocationScaleModel,
    log_likelihood,
    m_integral_gaussian,
    register_rho,
    rho_at_zero,
)


def test_zero_residuals_value():
    # sigma = 1 and y = eta: each term is log(1/sqrt(2 pi))
    m = 7
    model = LocationScaleModel(sigma=1.0, m=m)
    y = np.linspace(-1, 1, m)
    assert log_likelihood(model, y, y) == pytest.approx(m * math.log(1.0 / math.sqrt(2 * math.pi)), abs=1e-12)


def test_single_standardized_residual():
    # sigma = 2, one observation, residual 2 -> standardized residual 1
    model = LocationScaleModel(sigma=2.0, m=1)
    expected = -math.log(2.0) - 0.5 * math.log(2 * math.pi) - 0.5
    assert log_likelihood(model, [2.0], [0.0]) == pytest.approx(expected, abs=1e-12)


def test_wave_synthetic_against_scalar_summation_oracle():
    # cross-check the vectorized sum against scalar-by-scalar accumulation
    rng = np.random.default_rng(1)
    m, sigma = 15, 0.025
    design = np.arange(1, m + 1) / (m + 1)
    amps = np.array([1.5, 0.8, 0.7, 0.3])
    n = np.arange(1, 5)
    eta = np.array([np.sum(amps * (-1.0) ** n * np.sin(n * np.pi * z)) for z in design])
    y = eta + sigma * rng.standard_normal(m)
    model = LocationScaleModel(sigma=sigma, m=m)

    oracle = math.fsum(
        -math.log(sigma) - 0.5 * ((yj - ej) / sigma) ** 2 - 0.5 * math.log(2 * math.pi)
        for yj, ej in zip(y, eta)
    )
    assert log_likelihood(model, y, eta) == pytest.approx(oracle, rel=1e-13)


def test_rho_at_zero_gaussian():
    model = LocationScaleModel(sigma=1.0, m=1)
    assert rho_at_zero(model) == pytest.approx(0.3989422804014327, abs=1e-12)


def test_rho_at_zero_independent_of_sigma():
    assert rho_at_zero(LocationScaleModel(0.1, 3)) == rho_at_zero(LocationScaleModel(10.0, 3))


def test_registered_kind_matches_its_density_at_zero():
    # unit-variance uniform on [-sqrt(3), sqrt(3)]
    half = math.sqrt(3.0)

    def log_pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= half, -math.log(2 * half), -np.inf)

    register_rho("uniform-unit", log_pdf, 1.0 / (2 * half))
    model = LocationScaleModel(sigma=1.0, m=1, rho="uniform-unit")
    assert rho_at_zero(model) == pytest.approx(math.exp(float(log_pdf(np.array(0.0)))), rel=1e-12)


def test_register_rejects_asymmetric_density():
    def skewed(x):
        x = np.asarray(x, dtype=float)
        return -0.5 * (x - 0.3) ** 2

    with pytest.raises(ContractError):
        register_rho("skewed", skewed, 1.0)


def test_m_integral_closed_form_values():
    assert m_integral_gaussian(1.0, 1) == pytest.approx(0.7978845608028654, abs=1e-12)
    # linear scaling in m / sigma
    assert m_integral_gaussian(2.0, 10) == pytest.approx(math.sqrt(2 / math.pi) * 10 / 2, abs=1e-12)


@pytest.mark.parametrize("sigma", [0.1, 0.5, 1.0, 10.0])
def test_m_integral_matches_quadrature(sigma):
    # oracle: per-coordinate integral of |d/d eta (-log f)| f dy, summed over m
    m = 3
    eta = 0.37

    def integrand(y):
        return abs((y - eta) / sigma**2) * math.exp(-0.5 * ((y - eta) / sigma) ** 2) / (
            sigma * math.sqrt(2 * math.pi)
        )

    one_coord, _ = quad(integrand, -np.inf, np.inf, limit=200)
    assert m_integral_gaussian(sigma, m) == pytest.approx(m * one_coord, abs=1e-8)


def test_likelihood_peaks_at_eta_equal_y():
    model = LocationScaleModel(sigma=0.7, m=4)
    y = np.array([0.1, -0.4, 2.0, 0.9])
    at_peak = log_likelihood(model, y, y)
    for j in range(4):
        for eps in (1e-3, -1e-3):
            eta = y.copy()
            eta[j] += eps
            assert log_likelihood(model, y, eta) < at_peak


def test_density_integrates_to_one_per_coordinate():
    model = LocationScaleModel(sigma=0.3, m=1)
    eta = 0.8

    def density(y):
        return math.exp(log_likelihood(model, np.array([y]), np.array([eta])))

    total, _ = quad(density, -np.inf, np.inf, limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_dimension_mismatch_raises():
    model = LocationScaleModel(sigma=1.0, m=3)
    with pytest.raises(ContractError):
        log_likelihood(model, np.zeros(3), np.zeros(2))


def test_non_finite_eta_raises():
    model = LocationScaleModel(sigma=1.0, m=2)
    with pytest.raises(NumericInputError):
        log_likelihood(model, np.zeros(2), np.array([0.0, np.inf]))


def test_dataset_validates_lengths():
    with pytest.raises(ContractError):
        DataSet(y=np.zeros(3), design=np.zeros(4))
    ds = DataSet(y=np.zeros(3), design=np.linspace(0, 1, 3))
    assert ds.m == 3


def test_model_validation():
    with pytest.raises(ContractError):
        LocationScaleModel(sigma=0.0, m=1)
    with pytest.raises(ContractError):
        LocationScaleModel(sigma=1.0, m=0)
    with pytest.raises(ContractError):
        LocationScaleModel(sigma=1.0, m=1, rho="no-such-density")
