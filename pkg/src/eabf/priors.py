"""Series priors on function space: truncation, tail bounds, coefficient laws.

A random function is represented as

    theta(t) = theta0(t) + sum_{i=1..kappa} beta_i phi_i(t)

with a random dimension kappa ~ h(.) and scalar coefficient priors for the
beta_i.  Truncating kappa at k induces the truncated prior whose total
variation distance to the full prior is bounded by the dimension-prior tail
mass P(kappa > k); that tail is what feeds the error budget.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammainc, gammaincinv, gammaln, ndtr, ndtri

from .errors import ConfigError, ContractError

# ---------------------------------------------------------------------------
# scalar coefficient priors
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class TruncatedNormal:
    """Mean-zero normal with scale ``s`` truncated to [-a, a].

    The truncation normalizer is 1 - 2 Phi(-a/s); the density is zero outside
    the interval and log_density returns -inf there (rejection semantics).
    """

    a: float
    s: float

    def __post_init__(self):
        if not (self.a > 0 and self.s > 0):
            raise ContractError(f"TruncatedNormal needs a > 0 and s > 0, got a={self.a}, s={self.s}")

    @property
    def support(self):
        return (-self.a, self.a)

    @functools.cached_property
    def _log_norm_value(self) -> float:
        # log of P(|X| <= a) for X ~ N(0, s^2)
        return math.log1p(-2.0 * ndtr(-self.a / self.s))

    def _log_norm(self) -> float:
        return self._log_norm_value

    def log_density(self, x) -> float:
        x = np.asarray(x, dtype=float)
        out = (
            -0.5 * (x / self.s) ** 2
            - math.log(self.s)
            - 0.5 * math.log(2.0 * math.pi)
            - self._log_norm()
        )
        out = np.where(np.abs(x) <= self.a, out, -np.inf)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size=None):
        lo = ndtr(-self.a / self.s)
        u = rng.uniform(size=size)
        return self.s * ndtri(lo + u * (1.0 - 2.0 * lo))

    def mean_abs(self) -> float:
        """E|X| in closed form: 2 s (phi(0) - phi(a/s)) / (1 - 2 Phi(-a/s))."""
        phi0 = 1.0 / math.sqrt(2.0 * math.pi)
        phia = phi0 * math.exp(-0.5 * (self.a / self.s) ** 2)
        return 2.0 * self.s * (phi0 - phia) / (1.0 - 2.0 * ndtr(-self.a / self.s))


@dataclasses.dataclass(frozen=True)
class TruncatedGamma:
    """Gamma(shape, rate) truncated to [0, upper]."""

    shape: float
    rate: float
    upper: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0 and self.upper > 0):
            raise ContractError("TruncatedGamma needs positive shape, rate, upper")

    @property
    def support(self):
        return (0.0, self.upper)

    @functools.cached_property
    def _cdf_upper_value(self) -> float:
        return float(gammainc(self.shape, self.rate * self.upper))

    def _cdf_upper(self) -> float:
        return self._cdf_upper_value

    def log_density(self, x) -> float:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            core = (
                self.shape * math.log(self.rate)
                - gammaln(self.shape)
                + (self.shape - 1.0) * np.log(x)
                - self.rate * x
                - math.log(self._cdf_upper())
            )
        out = np.where((x > 0) & (x <= self.upper), core, -np.inf)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size=None):
        u = rng.uniform(size=size) * self._cdf_upper()
        return gammaincinv(self.shape, u) / self.rate

    def mean_abs(self) -> float:
        """E[X] on [0, upper]; uses the Gamma identity x f_k(x) = (k/r) f_{k+1}(x)."""
        top = gammainc(self.shape + 1.0, self.rate * self.upper)
        return float(self.shape / self.rate * top / self._cdf_upper())


# ---------------------------------------------------------------------------
# dimension priors
# ---------------------------------------------------------------------------


def _poisson_log_pmf(k, lam):
    k = np.asarray(k, dtype=float)
    return k * math.log(lam) - lam - gammaln(k + 1.0)


class DimensionPrior:
    """Pmf over the random series dimension kappa."""

    def pmf(self, k: int) -> float:
        raise NotImplementedError

    def atoms_upto(self, k_max: int) -> np.ndarray:
        """Support atoms <= k_max, ascending."""
        raise NotImplementedError

    def tail_mass(self, k: int) -> float:
        """P(kappa > k), by complementing a partial sum of the pmf.

        The pmf terms are summed with compensated summation so the complement
        is accurate to machine precision; for Poisson-type tails the remainder
        of the partial sum is guaranteed to be the returned value up to
        floating-point error.
        """
        if k < -1:
            raise ContractError(f"tail_mass needs k >= -1, got {k}")
        if k == -1:
            return 1.0
        atoms = self.atoms_upto(int(k))
        head = math.fsum(self.pmf(int(i)) for i in atoms)
        return max(0.0, 1.0 - head)

    def sample_truncated(self, k_max: int, rng) -> int:
        atoms = self.atoms_upto(k_max)
        if len(atoms) == 0:
            raise ConfigError(f"dimension prior has no support at or below k_max={k_max}")
        w = np.array([self.pmf(int(i)) for i in atoms])
        total = w.sum()
        if total <= 0:
            raise ConfigError(f"dimension prior has zero mass at or below k_max={k_max}")
        return int(rng.choice(atoms, p=w / total))


@dataclasses.dataclass(frozen=True)
class PoissonDim(DimensionPrior):
    """kappa ~ Poisson(lam) on {0, 1, 2, ...}."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ContractError("Poisson mean must be positive")

    def pmf(self, k):
        if k < 0:
            return 0.0
        return float(np.exp(_poisson_log_pmf(k, self.lam)))

    def atoms_upto(self, k_max):
        return np.arange(0, k_max + 1)


@dataclasses.dataclass(frozen=True)
class ShiftedOddPoissonDim(DimensionPrior):
    """Poisson(mean) shifted to start at 1, then renormalized to odd atoms.

    h(k) is proportional to Poisson(k - 1; mean) for odd k >= 1.  The
    normalizer over odd k is the even-index Poisson mass (1 + e^{-2 mean})/2,
    available in closed form.
    """

    mean: float

    def __post_init__(self):
        if not self.mean > 0:
            raise ContractError("Poisson mean must be positive")

    def _log_norm(self) -> float:
        return math.log1p(math.exp(-2.0 * self.mean)) - math.log(2.0)

    def pmf(self, k):
        if k < 1 or k % 2 == 0:
            return 0.0
        return float(np.exp(_poisson_log_pmf(k - 1, self.mean) - self._log_norm()))

    def atoms_upto(self, k_max):
        return np.arange(1, k_max + 1, 2)


@dataclasses.dataclass(frozen=True)
class FixedDim(DimensionPrior):
    """Point mass at a single dimension."""

    k: int

    def pmf(self, k):
        return 1.0 if k == self.k else 0.0

    def atoms_upto(self, k_max):
        return np.array([self.k]) if self.k <= k_max else np.array([], dtype=int)


def dim_tail_mass(dim_prior: DimensionPrior, k: int) -> float:
    """Tail mass P(kappa > k); equals the TV bound for truncating the prior at k."""
    return dim_prior.tail_mass(k)


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------


class WaveSineBasis:
    """phi_n(x) = (-1)^n sin(n pi x); flat coefficient i maps to n = i + 1."""

    dim_step = 1
    min_dim = 0

    def design_matrix(self, t, n_flat: int) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = np.arange(1, n_flat + 1)
        return ((-1.0) ** n)[None, :] * np.sin(np.pi * np.outer(t, n))


class FourierPairBasis:
    """Constant plus cos/sin pairs: [1, cos(2 pi t), sin(2 pi t), cos(4 pi t), ...].

    Flat coefficients are ordered [beta0, beta1, alpha1, beta2, alpha2, ...];
    a model with j pairs has flat dimension 1 + 2 j (odd by construction).
    The raw functions are used without the sqrt(2) L2 renormalization.
    """

    dim_step = 2
    min_dim = 1

    def design_matrix(self, t, n_flat: int) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cols = [np.ones_like(t)]
        j = 1
        while len(cols) < n_flat:
            cols.append(np.cos(2.0 * math.pi * j * t))
            if len(cols) < n_flat:
                cols.append(np.sin(2.0 * math.pi * j * t))
            j += 1
        return np.column_stack(cols[:n_flat])


# ---------------------------------------------------------------------------
# series prior
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SeriesPrior:
    """Prior over (kappa, coefficients) for a truncated series expansion.

    theta0        : base function t -> R
    basis         : object with design_matrix(t, n_flat) and dim_step/min_dim
    coeff_priors  : scalar prior per flat coefficient index (length >= k_max)
    dim_prior     : pmf over the flat dimension kappa
    k_max         : hard truncation level for sampling and inference
    """

    theta0: Callable
    basis: object
    coeff_priors: Sequence
    dim_prior: DimensionPrior
    k_max: int

    def __post_init__(self):
        if self.k_max < 1:
            raise ContractError("k_max must be >= 1")
        if len(self.coeff_priors) < self.k_max:
            raise ConfigError(
                f"need a coefficient prior per index up to k_max={self.k_max}, "
                f"got {len(self.coeff_priors)}"
            )
        for i, cp in enumerate(self.coeff_priors):
            if not np.isfinite(cp.mean_abs()):
                raise ConfigError(f"coefficient prior {i} has non-finite E|beta|")
        if len(self.dim_prior.atoms_upto(self.k_max)) == 0:
            raise ConfigError("dimension prior has no support at or below k_max")

    def tail_mass(self) -> float:
        return self.dim_prior.tail_mass(self.k_max)

    def log_coeff_density(self, coeffs) -> float:
        coeffs = np.asarray(coeffs, dtype=float)
        return float(sum(self.coeff_priors[i].log_density(c) for i, c in enumerate(coeffs)))


def sample_truncated_prior(prior: SeriesPrior, rng):
    """Draw (kappa, coefficients) with kappa ~ h restricted to kappa <= k_max."""
    kappa = prior.dim_prior.sample_truncated(prior.k_max, rng)
    coeffs = np.array([prior.coeff_priors[i].sample(rng) for i in range(kappa)])
    return kappa, coeffs


def evaluate_series(prior: SeriesPrior, coefficients, t):
    """theta0(t) + sum_i beta_i phi_i(t) over the provided flat coefficients."""
    coefficients = np.asarray(coefficients, dtype=float)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    base = np.asarray(prior.theta0(t_arr), dtype=float)
    if len(coefficients) > 0:
        base = base + prior.basis.design_matrix(t_arr, len(coefficients)) @ coefficients
    return float(base[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else base


def log_prior_density(coeff_priors: Sequence, values) -> float:
    """Sum of per-coordinate log densities; -inf if any value is out of support."""
    values = np.asarray(values, dtype=float)
    if len(values) > len(coeff_priors):
        raise ContractError("more values than configured coefficient priors")
    return float(sum(coeff_priors[i].log_density(v) for i, v in enumerate(values)))


# ---------------------------------------------------------------------------
# Gaussian Markov random field prior (1D heat example)
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class GmrfPrior:
    """Intrinsic first-order-neighbor GMRF on n_points values, box-constrained.

    The precision is tau * L with L the second-difference stencil (free
    boundary), so the unnormalized log density is the neighbor-difference
    penalty -tau/2 * sum (b_{i+1} - b_i)^2 on the box [0, upper]^n and -inf
    outside.  The box makes the law proper despite L being singular.
    """

    n_points: int
    tau: float
    upper: float

    def __post_init__(self):
        if self.n_points < 2:
            raise ContractError("GMRF needs at least 2 points")
        if not (self.tau > 0 and self.upper > 0):
            raise ContractError("GMRF needs tau > 0 and upper > 0")

    def precision(self) -> np.ndarray:
        n = self.n_points
        L = np.zeros((n, n))
        idx = np.arange(n)
        L[idx, idx] = 2.0
        L[0, 0] = L[-1, -1] = 1.0
        L[idx[:-1], idx[:-1] + 1] = -1.0
        L[idx[:-1] + 1, idx[:-1]] = -1.0
        return self.tau * L

    def log_density(self, b) -> float:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.n_points,):
            raise ContractError(f"expected {self.n_points} values, got shape {b.shape}")
        if np.any(b < 0) or np.any(b > self.upper):
            return -np.inf
        return -0.5 * self.tau * float(np.sum(np.diff(b) ** 2))

    def sample(self, rng, sweeps: int = 100) -> np.ndarray:
        """Draw from the box-truncated GMRF by single-site Gibbs sweeps.

        Each full conditional is a 1D truncated normal, sampled exactly by
        inverse CDF, so the draw is deterministic given the rng state.
        """
        n = self.n_points
        b = rng.uniform(0.0, self.upper, size=n)
        for _ in range(sweeps):
            for i in range(n):
                if i == 0:
                    mean, prec = b[1], self.tau
                elif i == n - 1:
                    mean, prec = b[n - 2], self.tau
                else:
                    mean, prec = 0.5 * (b[i - 1] + b[i + 1]), 2.0 * self.tau
                sd = 1.0 / math.sqrt(prec)
                lo = ndtr((0.0 - mean) / sd)
                hi = ndtr((self.upper - mean) / sd)
                b[i] = mean + sd * ndtri(lo + rng.uniform() * (hi - lo))
        return b
