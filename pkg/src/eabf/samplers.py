"""MCMC engines: fixed-dimension Metropolis kernels, a reversible-jump
transdimensional sampler, and chain diagnostics (IAT, ESS, histogram TV).

Kernels are deterministic given the numpy Generator handed in, so a run is
reproducible bit-for-bit from (seed, config).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import ContractError, SamplerError
from .priors import DimensionPrior

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Metropolis-Hastings core
# ---------------------------------------------------------------------------


def mh_step(state, log_target, propose, rng, current_lp=None):
    """One Metropolis-Hastings step.

    ``propose(state, rng)`` returns (proposal, log_hastings) where
    log_hastings is log q(state | proposal) - log q(proposal | state)
    (zero for symmetric proposals).  Returns (state', lp', accepted).
    """
    if current_lp is None:
        current_lp = log_target(state)
    if math.isnan(current_lp):
        raise SamplerError(f"log target is NaN at the current state {state!r}")
    proposal, log_hastings = propose(state, rng)
    prop_lp = log_target(proposal)
    if math.isnan(prop_lp):
        raise SamplerError(f"log target returned NaN at proposed state {proposal!r}")
    log_acc = prop_lp - current_lp + log_hastings
    if log_acc >= 0.0 or math.log(rng.uniform()) < log_acc:
        return proposal, prop_lp, True
    return state, current_lp, False


@dataclasses.dataclass(frozen=True)
class RandomWalkKernel:
    """Symmetric Gaussian random walk with per-coordinate scales."""

    scales: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scales", np.atleast_1d(np.asarray(self.scales, dtype=float)))
        if np.any(self.scales < 0):
            raise ContractError("proposal scales must be nonnegative")

    def propose(self, state, rng):
        state = np.asarray(state, dtype=float)
        scales = np.broadcast_to(self.scales, state.shape) if self.scales.size > 1 else self.scales
        return state + scales * rng.standard_normal(state.shape), 0.0


def stretch_propose(state, partner, rng, a: float = 2.0):
    """Affine-invariant pair move: y = partner + z (state - partner).

    z is drawn from g(z) proportional to 1/sqrt(z) on [1/a, a]; the Hastings
    correction is (d - 1) log z.
    """
    state = np.asarray(state, dtype=float)
    partner = np.asarray(partner, dtype=float)
    z = ((a - 1.0) * rng.uniform() + 1.0) ** 2 / a
    proposal = partner + z * (state - partner)
    return proposal, (state.size - 1) * math.log(z)


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class Chain:
    """Kept MCMC samples: dimension labels, padded coordinates, log posteriors."""

    labels: np.ndarray
    coords: np.ndarray
    log_posts: np.ndarray
    accept_counts: dict
    proposal_counts: dict
    seed: int

    def __post_init__(self):
        if not (len(self.labels) == len(self.coords) == len(self.log_posts)):
            raise ContractError("chain arrays must have consistent lengths")
        if not np.all(np.isfinite(self.log_posts)):
            raise ContractError("every stored state must have a finite log posterior")

    def __len__(self):
        return len(self.labels)

    def coefficient(self, index: int, require_present: bool = True) -> np.ndarray:
        """Samples of one coordinate; by default only iterations where it exists."""
        col = self.coords[:, index]
        if require_present:
            return col[self.labels > index]
        return col

    def dimension_pmf(self, k_max: int) -> np.ndarray:
        counts = np.bincount(self.labels, minlength=k_max + 1)[: k_max + 1]
        return counts / len(self.labels)

    def acceptance_rate(self, move: str) -> float:
        n = self.proposal_counts.get(move, 0)
        return self.accept_counts.get(move, 0) / n if n else float("nan")

    def save_csv(self, path) -> None:
        width = self.coords.shape[1]
        header = "iteration,dim," + ",".join(f"c{i}" for i in range(width)) + ",log_post"
        data = np.column_stack([
            np.arange(len(self.labels), dtype=float),
            self.labels.astype(float),
            self.coords,
            self.log_posts,
        ])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")

    @classmethod
    def load_csv(cls, path, seed: int = -1) -> "Chain":
        data = np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))
        return cls(
            labels=data[:, 1].astype(int),
            coords=data[:, 2:-1],
            log_posts=data[:, -1],
            accept_counts={}, proposal_counts={}, seed=seed,
        )


class _ChainBuilder:
    def __init__(self, width, seed):
        self.rows = []
        self.width = width
        self.seed = seed
        self.accept = {}
        self.proposed = {}

    def count(self, move, accepted):
        self.proposed[move] = self.proposed.get(move, 0) + 1
        if accepted:
            self.accept[move] = self.accept.get(move, 0) + 1

    def keep(self, label, coords, lp):
        row = np.full(self.width, np.nan)
        row[: len(coords)] = coords
        self.rows.append((label, row, lp))

    def build(self):
        labels = np.array([r[0] for r in self.rows], dtype=int)
        coords = np.array([r[1] for r in self.rows]) if self.rows else np.empty((0, self.width))
        lps = np.array([r[2] for r in self.rows])
        return Chain(labels=labels, coords=coords, log_posts=lps,
                     accept_counts=self.accept, proposal_counts=self.proposed, seed=self.seed)


# ---------------------------------------------------------------------------
# fixed-dimension sampler: two walkers, pair moves with random-walk fallback
# ---------------------------------------------------------------------------


class FixedDimSampler:
    """Two coupled walkers updated by affine-invariant pair moves mixed with
    single-coordinate random-walk steps.

    The pair move is scale-free and handles correlation; the coordinate walk
    uses the per-coordinate scales and breaks the two-point affine
    degeneracy.  The kept chain is walker 0; both walkers target the same
    distribution.
    """

    def __init__(self, log_target, rw_scales, p_walk: float = 0.3, stretch_a: float = 2.0):
        if not 0.0 < p_walk <= 1.0:
            raise ContractError("p_walk must be in (0, 1]")
        self.log_target = log_target
        self.rw_scales = np.atleast_1d(np.asarray(rw_scales, dtype=float))
        if np.any(self.rw_scales < 0):
            raise ContractError("proposal scales must be nonnegative")
        self.p_walk = p_walk
        self.stretch_a = stretch_a

    def run(self, x0, n_iters: int, rng, burn_in: int = 0, thin: int = 1, seed: int = -1) -> Chain:
        x0 = np.asarray(x0, dtype=float)
        d = len(x0)
        scales = np.broadcast_to(self.rw_scales, x0.shape)
        walkers = [x0.copy(), x0 + 1e-4 * scales * rng.standard_normal(d)]
        lps = [self.log_target(w) for w in walkers]
        for lp, w in zip(lps, walkers):
            if not np.isfinite(lp):
                raise SamplerError(f"initial state has non-finite log target: {w!r}")
        builder = _ChainBuilder(d, seed)
        for it in range(n_iters):
            for w in (0, 1):
                if rng.uniform() < self.p_walk:
                    move = "walk"
                    coord = int(rng.integers(d))

                    def propose(state, rng_, _i=coord):
                        prop = state.copy()
                        prop[_i] += scales[_i] * rng_.standard_normal()
                        return prop, 0.0

                else:
                    move = "stretch"
                    partner = walkers[1 - w]

                    def propose(state, rng_, _p=partner):
                        return stretch_propose(state, _p, rng_, a=self.stretch_a)

                walkers[w], lps[w], acc = mh_step(
                    walkers[w], self.log_target, propose, rng, current_lp=lps[w]
                )
                builder.count(move, acc)
            if it >= burn_in and (it - burn_in) % thin == 0:
                builder.keep(d, walkers[0], lps[0])
        return builder.build()


# ---------------------------------------------------------------------------
# reversible jump
# ---------------------------------------------------------------------------


def _birth_scales(beta, dim_step: int, floor: float) -> np.ndarray:
    """Proposal std for newly born coordinates, |last coefficient|/4, floored.

    For paired streams (dim_step 2) the new cos coefficient keys off the last
    cos coefficient and the new sin off the last sin; with only the intercept
    present both key off it.
    """
    if dim_step == 2:
        if len(beta) >= 3:
            ref = np.array([abs(beta[-2]), abs(beta[-1])])
        else:
            ref = np.array([abs(beta[0]), abs(beta[0])])
    else:
        ref = np.array([abs(beta[-1]) if len(beta) else 0.0])
    return np.maximum(ref / 4.0, floor)


def _normal_logpdf_sum(u, scales) -> float:
    return float(np.sum(-0.5 * (u / scales) ** 2 - np.log(scales) - _LOG_SQRT_2PI))


def rj_step(state, k_max: int, log_target, dim_prior: DimensionPrior, rng,
            dim_step: int = 1, min_dim: int = 1, scale_floor: float = 1e-3,
            current_lt=None):
    """One reversible-jump move: birth or death with probability 1/2 each.

    ``log_target(ell, beta)`` is the within-model log density (likelihood
    plus coefficient priors); the dimension prior enters the acceptance ratio
    here.  The dimension mapping is the identity on retained coordinates, so
    the Jacobian is 1.  Moves past k_max or below min_dim are rejected
    outright.  Returns (state', lt', move, accepted).
    """
    ell, beta = state
    if ell > k_max:
        raise ContractError(f"state dimension {ell} exceeds k_max={k_max}")
    if current_lt is None:
        current_lt = log_target(ell, beta)
    if math.isnan(current_lt):
        raise SamplerError(f"log target is NaN at dimension {ell}")

    birth = rng.uniform() < 0.5
    move = "birth" if birth else "death"
    if birth:
        new_ell = ell + dim_step
        if new_ell > k_max:
            return state, current_lt, move, False
        scales = _birth_scales(beta, dim_step, scale_floor)
        u = scales * rng.standard_normal(dim_step)
        new_beta = np.concatenate([beta, u])
        log_q = _normal_logpdf_sum(u, scales)
        prop_lt = log_target(new_ell, new_beta)
        log_h = math.log(dim_prior.pmf(new_ell)) - math.log(dim_prior.pmf(ell))
        log_acc = prop_lt - current_lt + log_h - log_q
    else:
        new_ell = ell - dim_step
        if new_ell < min_dim:
            return state, current_lt, move, False
        new_beta = beta[:new_ell]
        removed = beta[new_ell:]
        scales = _birth_scales(new_beta, dim_step, scale_floor)
        log_q = _normal_logpdf_sum(removed, scales)
        prop_lt = log_target(new_ell, new_beta)
        log_h = math.log(dim_prior.pmf(new_ell)) - math.log(dim_prior.pmf(ell))
        log_acc = prop_lt - current_lt + log_h + log_q
    if math.isnan(prop_lt):
        raise SamplerError(f"log target returned NaN at proposed dimension {new_ell}")
    if log_acc >= 0.0 or math.log(rng.uniform()) < log_acc:
        return (new_ell, new_beta), prop_lt, move, True
    return state, current_lt, move, False


class RJSampler:
    """Transdimensional sampler: jump moves mixed with within-model random walks.

    rw_scales gives the walk scale per flat coefficient index (length k_max).
    """

    def __init__(self, log_target, dim_prior: DimensionPrior, k_max: int,
                 dim_step: int = 1, min_dim: int = 1, rw_scales=None,
                 p_jump: float = 0.2, scale_floor: float = 1e-3):
        if not 0.0 < p_jump < 1.0:
            raise ContractError("p_jump must be in (0, 1)")
        self.log_target = log_target
        self.dim_prior = dim_prior
        self.k_max = int(k_max)
        self.dim_step = dim_step
        self.min_dim = min_dim
        self.rw_scales = (np.full(self.k_max, 0.1) if rw_scales is None
                          else np.asarray(rw_scales, dtype=float))
        self.p_jump = p_jump
        self.scale_floor = scale_floor

    def run(self, state0, n_iters: int, rng, burn_in: int = 0, thin: int = 1,
            seed: int = -1) -> Chain:
        ell, beta = state0
        beta = np.asarray(beta, dtype=float).copy()
        lt = self.log_target(ell, beta)
        if not np.isfinite(lt):
            raise SamplerError("initial state has non-finite log target")
        builder = _ChainBuilder(self.k_max, seed)
        for it in range(n_iters):
            if rng.uniform() < self.p_jump:
                (ell, beta), lt, move, acc = rj_step(
                    (ell, beta), self.k_max, self.log_target, self.dim_prior, rng,
                    dim_step=self.dim_step, min_dim=self.min_dim,
                    scale_floor=self.scale_floor, current_lt=lt,
                )
                builder.count(move, acc)
            else:
                prop = beta + self.rw_scales[:ell] * rng.standard_normal(ell)
                prop_lt = self.log_target(ell, prop)
                if math.isnan(prop_lt):
                    raise SamplerError(f"log target returned NaN at dimension {ell}")
                if prop_lt - lt >= 0.0 or math.log(rng.uniform()) < prop_lt - lt:
                    beta, lt, acc = prop, prop_lt, True
                else:
                    acc = False
                builder.count("walk", acc)
            if it >= burn_in and (it - burn_in) % thin == 0:
                lp_full = lt + math.log(self.dim_prior.pmf(ell))
                builder.keep(ell, beta, lp_full)
        return builder.build()


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


def _autocorrelation(x: np.ndarray) -> np.ndarray:
    n = len(x)
    x = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, n=nfft)
    acf = np.fft.irfft(f * np.conjugate(f), n=nfft)[:n].real
    return acf / acf[0]


def iat(series) -> float:
    """Integrated autocorrelation time by Geyer's initial-positive-sequence rule.

    Pair sums Gamma_m = rho_{2m} + rho_{2m+1} are accumulated while positive;
    the IAT is 2 * sum(Gamma) - 1.  Anticorrelated series can push the raw
    value to zero or below; the result is floored at 1/len(series), the
    resolution limit of the estimator.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 100:
        raise ContractError(f"need a 1-d series of length >= 100, got shape {x.shape}")
    if np.ptp(x) == 0.0:
        raise SamplerError("IAT is undefined for a constant series")
    rho = _autocorrelation(x)
    total = 0.0
    m = 0
    while 2 * m + 1 < len(rho):
        gamma = rho[2 * m] + rho[2 * m + 1]
        if gamma <= 0.0:
            break
        total += gamma
        m += 1
    return max(2.0 * total - 1.0, 1.0 / len(x))


def ess(series) -> float:
    """Effective sample size: length / IAT."""
    return len(series) / iat(series)


def hist_tv(samples_a, samples_b, bins: int = 50, value_range=None) -> float:
    """Total variation between histogram estimates on a common binning."""
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ContractError("both sample sets must be non-empty")
    if value_range is None:
        lo = min(a.min(), b.min())
        hi = max(a.max(), b.max())
        if lo == hi:
            hi = lo + 1.0
        value_range = (lo, hi)
    pa, _ = np.histogram(a, bins=bins, range=value_range)
    pb, _ = np.histogram(b, bins=bins, range=value_range)
    return 0.5 * float(np.abs(pa / a.size - pb / b.size).sum())
