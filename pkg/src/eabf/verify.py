"""Brute-force grid posteriors and empirical checks of the TV rate bounds.

The oracle is deliberately dumb: densities are tabulated on a uniform grid,
normalized by trapezoid quadrature, and compared in total variation by
integrating |p - q| / 2.  The rate experiments inject a forward-map
perturbation of known order (or a prior truncation of known tail mass) into
a one-parameter Gaussian toy problem and verify the posterior TV gap decays
at the same order and below the theorem's constant.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ContractError, GridTooSmallError, SamplerError

_PHI_AT_1 = math.exp(-0.5) / math.sqrt(2.0 * math.pi)  # max |d/dx standard normal pdf|


@dataclasses.dataclass(frozen=True)
class GridPosterior:
    """Density tabulated on a uniform 1D or 2D grid, with its normalizer."""

    grid: tuple
    density: np.ndarray
    z: float

    @property
    def ndim(self) -> int:
        return len(self.grid)


def _integrate(values: np.ndarray, grid: tuple) -> float:
    out = values
    for axis_points in reversed(grid):
        out = np.trapezoid(out, axis_points, axis=-1)
    return float(out)


def grid_posterior(log_likelihood: Callable, log_prior: Callable, grid) -> GridPosterior:
    """Normalized posterior on a grid; the normalizer is the evidence Z.

    ``grid`` is a 1D array or a tuple of axis arrays for 2D.  Fails if the
    density has not decayed to < 1e-12 of its max at the grid boundary.
    """
    if isinstance(grid, tuple):
        axes = tuple(np.asarray(g, dtype=float) for g in grid)
    else:
        axes = (np.asarray(grid, dtype=float),)
    if len(axes) == 1:
        pts = axes[0]
        logv = np.asarray(log_likelihood(pts), dtype=float) + np.asarray(log_prior(pts), dtype=float)
    elif len(axes) == 2:
        X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
        logv = np.asarray(log_likelihood(X, Y), dtype=float) + np.asarray(log_prior(X, Y), dtype=float)
    else:
        raise ContractError("grid oracle supports 1 or 2 parameter dimensions only")

    top = logv.max()
    if not np.isfinite(top):
        raise ContractError("log density is not finite anywhere on the grid")
    unnorm = np.exp(logv - top)
    boundary = np.concatenate([np.atleast_1d(unnorm[0]).ravel(), np.atleast_1d(unnorm[-1]).ravel()])
    if len(axes) == 2:
        boundary = np.concatenate([boundary, unnorm[:, 0].ravel(), unnorm[:, -1].ravel()])
    if boundary.max() >= 1e-12:
        raise GridTooSmallError(
            f"density at the grid boundary is {boundary.max():.2e} of the max; enlarge the grid"
        )
    scale = _integrate(unnorm, axes)
    z = scale * math.exp(top)
    return GridPosterior(grid=axes, density=unnorm / scale, z=z)


def grid_tv(p: GridPosterior, q: GridPosterior) -> float:
    """Total variation 0.5 * integral |p - q| between same-grid densities."""
    if p.ndim != q.ndim or any(
        len(a) != len(b) or not np.allclose(a, b) for a, b in zip(p.grid, q.grid)
    ):
        raise ContractError("grid_tv requires both posteriors on the identical grid")
    return 0.5 * _integrate(np.abs(p.density - q.density), p.grid)


# ---------------------------------------------------------------------------
# shared toy problem: scalar parameter, identity forward map, Gaussian noise
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ToyProblem:
    """One observation y of G(theta) = theta with N(0, sigma^2) noise, N(0,1) prior."""

    y: float = 0.3
    sigma: float = 1.0
    grid: np.ndarray = dataclasses.field(
        default_factory=lambda: np.linspace(-8.0, 8.0, 4001)
    )

    def log_likelihood(self, eta_of_theta: Callable) -> Callable:
        def ll(theta):
            z = (self.y - eta_of_theta(theta)) / self.sigma
            return -0.5 * z**2 - math.log(self.sigma) - 0.5 * math.log(2.0 * math.pi)

        return ll

    @staticmethod
    def log_prior(theta):
        return -0.5 * theta**2 - 0.5 * math.log(2.0 * math.pi)

    def lipschitz_likelihood(self) -> float:
        # sup over eta, y of |d f_o / d eta| for the scalar Gaussian model
        return _PHI_AT_1 / self.sigma**2

    def max_likelihood_value(self) -> float:
        # f(y | theta_hat) at the maximizer eta = y
        return 1.0 / (self.sigma * math.sqrt(2.0 * math.pi))


# ---------------------------------------------------------------------------
# discretization-rate experiment (forward-map error of known order)
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class RateNReport:
    n_list: tuple
    tvs: tuple
    bounds: tuple
    slope: float
    threshold_n: int | None

    def rows(self):
        for n, tv, bound in zip(self.n_list, self.tvs, self.bounds):
            ratio = tv / bound if bound > 0 else math.nan
            yield {"n": n, "tv": tv, "bound": bound, "ratio": ratio}


def rate_experiment_n(c: float, p: float, n_list: Sequence[int],
                      problem: ToyProblem | None = None) -> RateNReport:
    """Inject eta -> eta + c n^{-p} sin(3 theta) and measure the posterior TV gap.

    Returns the fitted log-log slope and, per n, the measured TV together
    with the theorem bound (K1 / Z) n^{-p} where K1 is the likelihood
    Lipschitz constant times the forward-map error constant c.
    """
    if c < 0:
        raise ContractError("perturbation constant c must be nonnegative")
    prob = problem if problem is not None else ToyProblem()
    exact = grid_posterior(prob.log_likelihood(lambda th: th), prob.log_prior, prob.grid)
    tvs, bounds = [], []
    k1 = prob.lipschitz_likelihood() * c
    for n in n_list:
        delta = c * float(n) ** (-p)
        perturbed = grid_posterior(
            prob.log_likelihood(lambda th, d=delta: th + d * np.sin(3.0 * th)),
            prob.log_prior, prob.grid,
        )
        tvs.append(grid_tv(perturbed, exact))
        bounds.append(k1 / exact.z * float(n) ** (-p))

    if c == 0.0:
        return RateNReport(tuple(n_list), tuple(tvs), tuple(bounds), math.nan, n_list[0])
    if any(tv <= 0.0 for tv in tvs):
        raise SamplerError("degenerate rate experiment: a measured TV is not positive")
    slope = float(np.polyfit(np.log(np.asarray(n_list, float)), np.log(tvs), 1)[0])
    threshold = None
    for i in range(len(n_list)):
        if all(tv <= b for tv, b in zip(tvs[i:], bounds[i:])):
            threshold = int(n_list[i])
            break
    return RateNReport(tuple(n_list), tuple(tvs), tuple(bounds), slope, threshold)


# ---------------------------------------------------------------------------
# prior-truncation rate experiment
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class RateKReport:
    k_list: tuple
    prior_tvs: tuple
    tvs: tuple
    bounds: tuple
    holds: tuple
    combined_rows: tuple

    def rows(self):
        for k, q, tv, bound, ok in zip(self.k_list, self.prior_tvs, self.tvs,
                                       self.bounds, self.holds):
            yield {"k": k, "prior_tv": q, "tv": tv, "bound": bound, "holds": ok}


def rate_experiment_k(k_list: Sequence[int], tail_fn: Callable[[int], float] | None = None,
                      problem: ToyProblem | None = None,
                      combined: Sequence[tuple] = ()) -> RateKReport:
    """Truncate the prior to tail mass q(k) and verify the posterior TV bound.

    The truncated prior restricts N(0,1) to |theta| <= T_k with
    P(|theta| > T_k) = q(k), so ||pi_k - pi||_TV = q(k) exactly.  The check is

        TV(posterior_k, posterior)  <=  f(y | theta_hat) / Z * q(k).

    ``combined`` optionally lists (n, c, p, k) tuples for which the combined
    discretization-plus-truncation bound is verified as well.
    """
    prob = problem if problem is not None else ToyProblem()
    tail = tail_fn if tail_fn is not None else (lambda k: 2.0 ** (-k))
    ll_exact = prob.log_likelihood(lambda th: th)
    exact = grid_posterior(ll_exact, prob.log_prior, prob.grid)
    fhat = prob.max_likelihood_value()

    def log_prior_k(q):
        T = ndtri(1.0 - q / 2.0)
        log_renorm = math.log1p(-q)

        def lp(theta):
            body = prob.log_prior(theta) - log_renorm
            return np.where(np.abs(theta) <= T, body, -np.inf)

        return lp

    prior_tvs, tvs, bounds, holds = [], [], [], []
    for k in k_list:
        q = tail(k)
        if not 0.0 <= q < 1.0:
            raise ContractError(f"tail mass must be in [0, 1), got {q} at k={k}")
        post_k = grid_posterior(ll_exact, log_prior_k(q), prob.grid)
        tv = grid_tv(post_k, exact)
        bound = fhat / exact.z * q
        prior_tvs.append(q)
        tvs.append(tv)
        bounds.append(bound)
        holds.append(bool(tv <= bound + 1e-12))

    combined_rows = []
    for n, c, p, k in combined:
        q = tail(k)
        delta = c * float(n) ** (-p)
        post_nk = grid_posterior(
            prob.log_likelihood(lambda th, d=delta: th + d * np.sin(3.0 * th)),
            log_prior_k(q), prob.grid,
        )
        post_k_only = grid_posterior(ll_exact, log_prior_k(q), prob.grid)
        tv = grid_tv(post_nk, exact)
        bound = (prob.lipschitz_likelihood() * c / post_k_only.z * float(n) ** (-p)
                 + fhat / exact.z * q)
        combined_rows.append({"n": n, "k": k, "tv": tv, "bound": bound,
                              "holds": bool(tv <= bound + 1e-12)})
    return RateKReport(tuple(k_list), tuple(prior_tvs), tuple(tvs), tuple(bounds),
                       tuple(holds), tuple(combined_rows))


# ---------------------------------------------------------------------------
# auxiliary-lemma checks: |z_n - z| and TV(p_n, p) under a uniform density gap
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class LemmaReport:
    construction: str
    n_list: tuple
    z_gaps: tuple
    z_bounds: tuple
    tvs: tuple
    tv_bounds: tuple

    @property
    def holds(self) -> bool:
        slack = 1e-9
        return all(g <= b * (1.0 + slack) + 1e-15 for g, b in zip(self.z_gaps, self.z_bounds)) and all(
            t <= b * (1.0 + slack) + 1e-15 for t, b in zip(self.tvs, self.tv_bounds)
        )

    def rows(self):
        for n, g, gb, t, tb in zip(self.n_list, self.z_gaps, self.z_bounds,
                                   self.tvs, self.tv_bounds):
            yield {"n": n, "z_gap": g, "z_bound": gb, "tv": t, "tv_bound": tb}


def lemma_a2_check(construction: str, k: float, p: float, n_list: Sequence[int],
                   grid: np.ndarray | None = None) -> LemmaReport:
    """Check |z_n - z| <= k n^{-p} and TV(p_n, p) <= (k/z) n^{-p} numerically.

    b is a fixed positive bounded function, pi is N(0,1), and b_n = b + a
    perturbation with |b_n - b| <= k n^{-p} enforced by construction:

      "zero"        b_n = b
      "constant"    b_n = b + k n^{-p}         (z gap is exactly k n^{-p})
      "oscillatory" b_n = b + k n^{-p} sign(sin(10 theta))
    """
    if construction not in ("zero", "constant", "oscillatory"):
        raise ContractError(f"unknown construction {construction!r}")
    theta = grid if grid is not None else np.linspace(-8.0, 8.0, 4001)
    pi_density = np.exp(-0.5 * theta**2) / math.sqrt(2.0 * math.pi)
    b = np.exp(-((theta - 0.4) ** 2)) + 0.1

    def z_of(values):
        return float(np.trapezoid(values * pi_density, theta))

    z = z_of(b)
    z_gaps, z_bounds, tvs, tv_bounds = [], [], [], []
    for n in n_list:
        eps = k * float(n) ** (-p)
        if construction == "zero":
            bn = b
        elif construction == "constant":
            bn = b + eps
        else:
            bn = b + eps * np.sign(np.sin(10.0 * theta))
            if np.any(bn <= 0.0):
                raise SamplerError("perturbation made b_n non-positive; shrink k")
        zn = z_of(bn)
        tv = 0.5 * float(np.trapezoid(np.abs(bn / zn - b / z) * pi_density, theta))
        z_gaps.append(abs(zn - z))
        z_bounds.append(eps)
        tvs.append(tv)
        tv_bounds.append(k / z * float(n) ** (-p))
    return LemmaReport(construction, tuple(n_list), tuple(z_gaps), tuple(z_bounds),
                       tuple(tvs), tuple(tv_bounds))


def gaussian_tv_exact(delta: float) -> float:
    """TV between N(0,1) and N(delta,1): 2 Phi(|delta|/2) - 1."""
    return 2.0 * float(ndtr(abs(delta) / 2.0)) - 1.0
