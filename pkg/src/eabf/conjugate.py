"""Exact Gaussian linear-model machinery for the wave example.

With y = X_k beta + eps, eps ~ N(0, sigma^2 I) and beta ~ N(mu0,
sigma^2 A0^{-1}), the posterior and the per-dimension evidence are available
in closed form; weighting evidences by the dimension prior gives the
marginal posterior of the series dimension and, summed to two cutoffs, an
analytic absolute-Bayes-factor estimate for the truncation.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import logsumexp

from .errors import ContractError, DegeneratePosteriorError, NumericalError
from .priors import DimensionPrior

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class LinearModel:
    """Design matrix with a Gaussian prior N(mu0, sigma^2 A0^{-1}) on the weights."""

    X: np.ndarray
    mu0: np.ndarray
    A0: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        k = X.shape[1]
        mu0 = np.asarray(self.mu0, dtype=float).reshape(k) if k else np.zeros(0)
        A0 = np.asarray(self.A0, dtype=float).reshape(k, k)
        if not np.allclose(A0, A0.T, atol=1e-12):
            raise ContractError("prior precision factor A0 must be symmetric")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "A0", A0)

    @classmethod
    def isotropic(cls, X, tau: float) -> "LinearModel":
        """Zero prior mean, A0 = tau I (prior std per weight = sigma / sqrt(tau))."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        k = X.shape[1]
        return cls(X=X, mu0=np.zeros(k), A0=tau * np.eye(k))


def _posterior_precision_factor(model: LinearModel):
    """Cholesky of X^T X + A0 with a condition estimate on failure."""
    G = model.X.T @ model.X + model.A0
    try:
        chol = cho_factor(G, lower=True)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(G)
        raise NumericalError(f"X^T X + A0 is not positive definite: {exc}", condition=cond)
    diag = np.abs(np.diag(chol[0]))
    cond_est = (diag.max() / diag.min()) ** 2 if len(diag) else 1.0
    logger.debug("posterior precision condition estimate: %.3e", cond_est)
    return G, chol, cond_est


def conjugate_posterior(model: LinearModel, y, sigma: float):
    """Posterior mean (X^T X + A0)^{-1}(A0 mu0 + X^T y) and covariance sigma^2 (X^T X + A0)^{-1}."""
    y = np.asarray(y, dtype=float)
    if model.X.shape[1] == 0:
        return np.zeros(0), np.zeros((0, 0))
    _, chol, _ = _posterior_precision_factor(model)
    mean = cho_solve(chol, model.A0 @ model.mu0 + model.X.T @ y)
    cov = sigma**2 * cho_solve(chol, np.eye(model.X.shape[1]))
    return mean, cov


def log_evidence(model: LinearModel, y, sigma: float) -> float:
    """Log marginal likelihood of y under the linear model (mu0 = 0 form).

    Includes the shared constant -(m/2) log(2 pi sigma^2) - y^T y / (2 sigma^2)
    so evidences are comparable and summable across dimensions.
    """
    y = np.asarray(y, dtype=float)
    m = len(y)
    const = -0.5 * m * math.log(2.0 * math.pi * sigma**2) - float(y @ y) / (2.0 * sigma**2)
    if model.X.shape[1] == 0:
        return const
    if np.any(model.mu0 != 0.0):
        raise ContractError("log_evidence is implemented for the zero-prior-mean form")
    G, chol, _ = _posterior_precision_factor(model)
    logdet_G = 2.0 * float(np.sum(np.log(np.abs(np.diag(chol[0])))))
    sign0, logdet_A0 = np.linalg.slogdet(model.A0)
    if sign0 <= 0:
        raise NumericalError("prior precision factor A0 must be positive definite")
    Xty = model.X.T @ y
    quad = float(Xty @ cho_solve(chol, Xty)) / (2.0 * sigma**2)
    return const + 0.5 * logdet_A0 - 0.5 * logdet_G + quad


def kappa_marginal(log_evidences, dim_prior: DimensionPrior, k_cut: int) -> np.ndarray:
    """Normalized pmf over kappa = 0..k_cut, proportional to h(i) * evidence_i."""
    log_evidences = np.asarray(log_evidences, dtype=float)
    if len(log_evidences) < k_cut + 1:
        raise ContractError(f"need evidences up to k_cut={k_cut}, got {len(log_evidences)}")
    if not np.all(np.isfinite(log_evidences[: k_cut + 1])):
        raise ContractError("evidences must be finite")
    with np.errstate(divide="ignore"):
        log_h = np.log([dim_prior.pmf(i) for i in range(k_cut + 1)])
    log_w = log_h + log_evidences[: k_cut + 1]
    if np.all(np.isinf(log_w)):
        raise DegeneratePosteriorError("all dimension weights are zero")
    return np.exp(log_w - logsumexp(log_w))


def wave_abf(log_evidences, dim_prior: DimensionPrior, k_cut_small: int = 15,
             k_cut_big: int = 20) -> float:
    """Analytic |Z_k / Z - 1| / 2 with Z_k, Z the h-weighted evidence sums.

    The dimension-prior weights are not renormalized, so the two sums are
    genuine (truncated) evidences of the data.
    """
    log_evidences = np.asarray(log_evidences, dtype=float)
    if len(log_evidences) < k_cut_big + 1:
        raise ContractError(f"need evidences up to k_cut_big={k_cut_big}")
    if k_cut_small > k_cut_big:
        raise ContractError("k_cut_small must not exceed k_cut_big")
    with np.errstate(divide="ignore"):
        log_h = np.log([dim_prior.pmf(i) for i in range(k_cut_big + 1)])
    log_w = log_h + log_evidences[: k_cut_big + 1]
    finite = np.isfinite(log_w)
    if not np.any(finite):
        raise ContractError("evidence sum is zero: no dimension carries prior mass")
    log_z_big = logsumexp(log_w[finite])
    tail = finite & (np.arange(k_cut_big + 1) > k_cut_small)
    if not np.any(tail):
        return 0.0
    # |Z_small/Z_big - 1| = (tail weight)/Z_big; the direct ratio of the two
    # logsumexp values would cancel below ~1e-16, this form does not
    return 0.5 * math.exp(logsumexp(log_w[tail]) - log_z_big)
