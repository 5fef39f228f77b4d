"""Conjugate wave machinery: posterior, evidence, dimension marginal, ABF."""

import math

import numpy as np
import pytest

from eabf.conjugate import (
    LinearModel,
    conjugate_posterior,
    kappa_marginal,
    log_evidence,
    wave_abf,
)
from eabf.errors import ContractError, DegeneratePosteriorError
from eabf.forward import wave_design_matrix, wave_fm
from eabf.priors import DimensionPrior, FixedDim, PoissonDim
from eabf.samplers import FixedDimSampler, iat

SIGMA = 0.025
M = 15
DESIGN = np.arange(1, M + 1) / (M + 1)
TRUE_AMPS = np.array([1.5, 0.8, 0.7, 0.3])


class UniformDim(DimensionPrior):
    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi

    def pmf(self, k):
        return 1.0 / (self.hi - self.lo + 1) if self.lo <= k <= self.hi else 0.0

    def atoms_upto(self, k_max):
        return np.arange(self.lo, min(self.hi, k_max) + 1)


def synthetic_wave_data(seed):
    rng = np.random.default_rng(seed)
    eta = wave_fm(TRUE_AMPS, DESIGN).eta
    return eta + SIGMA * rng.standard_normal(M)


def wave_model(kappa, tau=SIGMA**2):
    # A0 = sigma^2 I gives prior std 1 per coefficient
    return LinearModel.isotropic(wave_design_matrix(DESIGN, kappa), tau)


class TestConjugatePosterior:
    def test_zero_design_returns_prior(self):
        X = np.zeros((6, 3))
        model = LinearModel.isotropic(X, tau=0.5)
        mean, cov = conjugate_posterior(model, np.ones(6), sigma=2.0)
        np.testing.assert_allclose(mean, np.zeros(3), atol=1e-14)
        np.testing.assert_allclose(cov, (4.0 / 0.5) * np.eye(3), rtol=1e-12)

    def test_flat_prior_limit_recovers_least_squares(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((4, 4)) + np.eye(4) * 2
        y = rng.standard_normal(4)
        model = LinearModel.isotropic(X, tau=1e-10)
        mean, _ = conjugate_posterior(model, y, sigma=1.0)
        np.testing.assert_allclose(mean, np.linalg.solve(X, y), rtol=1e-6)

    def test_posterior_coverage_of_truth(self):
        y = synthetic_wave_data(seed=123)
        mean, cov = conjugate_posterior(wave_model(4), y, SIGMA)
        sd = np.sqrt(np.diag(cov))
        assert np.all(np.abs(mean - TRUE_AMPS) < 3 * sd)

    def test_agrees_with_mcmc(self):
        y = synthetic_wave_data(seed=3)
        model = wave_model(4)
        mean, cov = conjugate_posterior(model, y, SIGMA)

        X, A0 = model.X, model.A0

        def log_target(beta):
            resid = y - X @ beta
            return float(-0.5 * (resid @ resid) / SIGMA**2 - 0.5 * beta @ A0 @ beta / SIGMA**2)

        sampler = FixedDimSampler(log_target, rw_scales=np.sqrt(np.diag(cov)), p_walk=0.3)
        chain = sampler.run(mean.copy(), 40_000, np.random.default_rng(4), burn_in=1_000)
        for j in range(4):
            xs = chain.coords[:, j]
            stderr = xs.std() * math.sqrt(iat(xs) / len(xs))
            assert abs(xs.mean() - mean[j]) < 3 * stderr


class TestLogEvidence:
    def test_empty_model_is_noise_only(self):
        y = np.array([0.3, -0.2])
        model = LinearModel.isotropic(np.zeros((2, 0)), tau=1.0)
        expected = -math.log(2 * math.pi * 0.5**2) - float(y @ y) / (2 * 0.5**2)
        assert log_evidence(model, y, 0.5) == pytest.approx(expected, rel=1e-12)

    def test_invariant_to_column_reordering(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((8, 3))
        y = rng.standard_normal(8)
        a = log_evidence(LinearModel.isotropic(X, 0.7), y, 1.3)
        b = log_evidence(LinearModel.isotropic(X[:, [2, 0, 1]], 0.7), y, 1.3)
        assert a == pytest.approx(b, rel=1e-12)

    def test_two_by_two_against_grid_quadrature(self):
        # orthogonal design, A0 = I: integrate f(y|b) N(b; 0, s^2 I) over a grid
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        y = np.array([0.4, -0.7])
        sigma = 0.8
        model = LinearModel(X=X, mu0=np.zeros(2), A0=np.eye(2))

        g = np.linspace(-8, 8, 2001)
        B0, B1 = np.meshgrid(g, g, indexing="ij")
        resid_sq = (y[0] - B0) ** 2 + (y[1] - B1) ** 2
        log_lik = -resid_sq / (2 * sigma**2) - math.log(2 * math.pi * sigma**2)
        log_prior = -(B0**2 + B1**2) / (2 * sigma**2) - math.log(2 * math.pi * sigma**2)
        integrand = np.exp(log_lik + log_prior)
        z = np.trapezoid(np.trapezoid(integrand, g, axis=1), g)
        assert log_evidence(model, y, sigma) == pytest.approx(math.log(z), abs=1e-8)

    def test_against_monte_carlo_prior_sampling(self):
        # friendly noise level so the MC estimator has usable variance
        rng = np.random.default_rng(2)
        m, sigma, kappa = 4, 0.7, 2
        design = np.arange(1, m + 1) / (m + 1)
        X = wave_design_matrix(design, kappa)
        y = X @ np.array([0.5, -0.3]) + sigma * rng.standard_normal(m)
        model = LinearModel.isotropic(X, tau=sigma**2)  # prior std 1

        n_draws = 1_000_000
        betas = rng.standard_normal((n_draws, kappa))
        resid = y[None, :] - betas @ X.T
        log_lik = -0.5 * (resid**2).sum(axis=1) / sigma**2 - m / 2 * math.log(2 * math.pi * sigma**2)
        lik = np.exp(log_lik)
        z_hat = lik.mean()
        stderr = lik.std() / math.sqrt(n_draws)
        assert abs(math.exp(log_evidence(model, y, sigma)) - z_hat) < 3 * stderr


class TestKappaMarginal:
    def test_uniform_prior_equal_evidences(self):
        pmf = kappa_marginal(np.zeros(6), UniformDim(0, 5), k_cut=5)
        np.testing.assert_allclose(pmf, np.full(6, 1 / 6), rtol=1e-12)

    def test_sums_to_one(self):
        y = synthetic_wave_data(seed=9)
        evid = [log_evidence(wave_model(k), y, SIGMA) for k in range(16)]
        pmf = kappa_marginal(evid, PoissonDim(10.0), k_cut=15)
        assert pmf.sum() == pytest.approx(1.0, abs=1e-12)

    def test_mode_at_true_dimension(self):
        y = synthetic_wave_data(seed=42)
        evid = [log_evidence(wave_model(k), y, SIGMA) for k in range(21)]
        pmf = kappa_marginal(evid, PoissonDim(10.0), k_cut=15)
        assert int(pmf.argmax()) == 4

    def test_truncation_stability(self):
        # renormalizing at 15 vs 20 changes atoms by less than 1e-6
        y = synthetic_wave_data(seed=42)
        evid = [log_evidence(wave_model(k), y, SIGMA) for k in range(21)]
        pmf15 = kappa_marginal(evid, PoissonDim(10.0), k_cut=15)
        pmf20 = kappa_marginal(evid, PoissonDim(10.0), k_cut=20)
        assert np.max(np.abs(pmf15 - pmf20[:16])) < 1e-6

    def test_degenerate_weights_raise(self):
        with pytest.raises(DegeneratePosteriorError):
            kappa_marginal(np.zeros(11), FixedDim(30), k_cut=10)


class TestWaveAbf:
    def test_equal_cutoffs_is_zero(self):
        y = synthetic_wave_data(seed=1)
        evid = [log_evidence(wave_model(k), y, SIGMA) for k in range(21)]
        assert wave_abf(evid, PoissonDim(10.0), 15, 15) == 0.0

    def test_prior_with_no_tail_mass_gives_zero(self):
        y = synthetic_wave_data(seed=1)
        evid = [log_evidence(wave_model(k), y, SIGMA) for k in range(21)]
        assert wave_abf(evid, UniformDim(0, 15), 15, 20) == 0.0

    def test_paper_configuration_abf_tiny(self):
        y = synthetic_wave_data(seed=42)
        evid = [log_evidence(wave_model(k), y, SIGMA) for k in range(21)]
        val = wave_abf(evid, PoissonDim(10.0), 15, 20)
        assert val < 1e-6
        assert val < 1.0 / 20.0

    def test_needs_enough_evidences(self):
        with pytest.raises(ContractError):
            wave_abf(np.zeros(10), PoissonDim(10.0), 5, 20)
