"""Error-budgeted Bayesian inverse problems.

Controls the numerical error a forward-map solver is allowed to commit by
keeping the expected absolute Bayes factor between the numerical and the
theoretical model below a threshold, accounting for prior truncation, with
adaptive solver refinement, transdimensional MCMC, and a grid-based
verification harness for the TV convergence rates.
"""

from .budget import BudgetAudit, ErrorBudget, abf, eabf_bound, fm_tolerance
from .conjugate import LinearModel, conjugate_posterior, kappa_marginal, log_evidence, wave_abf
from .forward import (
    BudgetedForwardMap,
    Conductivity,
    ForwardSolve,
    Heat2dSolver,
    RefinementPolicy,
    convolve_analytic,
    convolve_simpson,
    fem1d_forward,
    fem1d_heat_solve,
    heat2d_exact,
    heat2d_numeric,
    solve_to_budget,
    wave_fm,
)
from .obs import DataSet, LocationScaleModel, log_likelihood, m_integral_gaussian, rho_at_zero
from .priors import (
    FourierPairBasis,
    GmrfPrior,
    PoissonDim,
    SeriesPrior,
    ShiftedOddPoissonDim,
    TruncatedGamma,
    TruncatedNormal,
    WaveSineBasis,
    dim_tail_mass,
    evaluate_series,
    sample_truncated_prior,
)
from .samplers import Chain, FixedDimSampler, RJSampler, ess, hist_tv, iat, mh_step, rj_step
from .verify import grid_posterior, grid_tv, lemma_a2_check, rate_experiment_k, rate_experiment_n

__version__ = "0.1.0"

__all__ = [
    "BudgetAudit",
    "ErrorBudget",
    "abf",
    "eabf_bound",
    "fm_tolerance",
    "LinearModel",
    "conjugate_posterior",
    "kappa_marginal",
    "log_evidence",
    "wave_abf",
    "BudgetedForwardMap",
    "Conductivity",
    "ForwardSolve",
    "Heat2dSolver",
    "RefinementPolicy",
    "convolve_analytic",
    "convolve_simpson",
    "fem1d_forward",
    "fem1d_heat_solve",
    "heat2d_exact",
    "heat2d_numeric",
    "solve_to_budget",
    "wave_fm",
    "DataSet",
    "LocationScaleModel",
    "log_likelihood",
    "m_integral_gaussian",
    "rho_at_zero",
    "FourierPairBasis",
    "GmrfPrior",
    "PoissonDim",
    "SeriesPrior",
    "ShiftedOddPoissonDim",
    "TruncatedGamma",
    "TruncatedNormal",
    "WaveSineBasis",
    "dim_tail_mass",
    "evaluate_series",
    "sample_truncated_prior",
    "Chain",
    "FixedDimSampler",
    "RJSampler",
    "ess",
    "hist_tv",
    "iat",
    "mh_step",
    "rj_step",
    "grid_posterior",
    "grid_tv",
    "lemma_a2_check",
    "rate_experiment_k",
    "rate_experiment_n",
    "__version__",
]
