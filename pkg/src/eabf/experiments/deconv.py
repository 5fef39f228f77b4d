"""Deconvolution experiment: transdimensional MCMC with an error-budgeted
Simpson forward map against the analytic forward map.

Both chains consume identical random streams, so any gap between their
posteriors is attributable to the forward-map error, which the budget keeps
below the EABF tolerance.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from ..budget import BudgetAudit, fm_tolerance
from ..forward import (
    BudgetedForwardMap,
    RefinementPolicy,
    convolve_analytic,
    deconv_forward_exact,
    deconv_forward_simpson,
)
from ..obs import LocationScaleModel, log_likelihood, rho_at_zero
from ..priors import FourierPairBasis, ShiftedOddPoissonDim, dim_tail_mass
from ..samplers import RJSampler, hist_tv
from .. import plots
from .report import RunReport

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def coefficient_scales(config) -> np.ndarray:
    """Per-flat-index prior scale: intercept at coeff_std, pair j decayed."""
    scales = [config.coeff_std]
    j = 1
    while len(scales) < config.k_max:
        s = config.coeff_std * math.exp(-(j - 1) * config.coeff_decay)
        scales.append(s)
        if len(scales) < config.k_max:
            scales.append(s)
        j += 1
    return np.array(scales)


def _tn_ladder_logpdf(scales: np.ndarray, bound: float):
    """Vectorized sum of truncated-normal log densities along the ladder."""
    log_norms = np.log1p(-2.0 * ndtr(-bound / scales))
    consts = -np.log(scales) - _LOG_SQRT_2PI - log_norms

    def logpdf(beta):
        k = len(beta)
        if np.any(np.abs(beta) > bound):
            return -np.inf
        return float(np.sum(-0.5 * (beta / scales[:k]) ** 2) + consts[:k].sum())

    return logpdf


def synthesize(config, rng):
    design = np.linspace(0.0, 1.0, config.m)
    truth = np.asarray(config.true_coefficients, dtype=float)
    eta = deconv_forward_exact(truth, config.kernel_halfwidth, design).eta
    return design, eta + config.sigma * rng.standard_normal(config.m)


def walk_scales(config, design) -> np.ndarray:
    """Per-coordinate walk scales near the posterior spread.

    The convolution is linear in the coefficients, so sigma over the column
    norm of the linearized map approximates the posterior sd; the kernel
    wipes out high-frequency pairs (zero column norm), where the prior scale
    takes over.
    """
    prior = coefficient_scales(config)
    scales = np.empty(config.k_max)
    for idx in range(config.k_max):
        unit = np.zeros(idx + 1)
        unit[idx] = 1.0
        col = np.array([
            convolve_analytic(unit, config.kernel_halfwidth, t) for t in design
        ])
        norm = float(np.linalg.norm(col))
        sd = config.sigma / norm if norm > 1e-12 else np.inf
        scales[idx] = min(sd, prior[idx])
    return config.rw_scale_factor * scales / math.sqrt(config.k_max)


def _run_chain(config, fm, design, y, rw_scales):
    model = LocationScaleModel(sigma=config.sigma, m=config.m)
    scales = coefficient_scales(config)
    coeff_logpdf = _tn_ladder_logpdf(scales, config.coeff_bound)

    def log_target(ell, beta):
        lp = coeff_logpdf(beta)
        if lp == -np.inf:
            return -np.inf
        return lp + log_likelihood(model, y, fm(beta).eta)

    sampler = RJSampler(
        log_target,
        ShiftedOddPoissonDim(config.dim_mean),
        k_max=config.k_max,
        dim_step=2,
        min_dim=1,
        rw_scales=rw_scales,
        p_jump=config.p_jump,
    )
    rng = np.random.default_rng([config.seed, 1])  # matched across both runs
    chain = sampler.run((1, np.array([0.0])), config.n_iterations, rng,
                        burn_in=config.burn_in, thin=config.thin, seed=config.seed)
    return chain


def run_deconv(config, out_dir) -> dict:
    config.validate()
    report = RunReport(out_dir)
    config.save(report.path("config.json"))

    data_rng = np.random.default_rng([config.seed, 0])
    design, y = synthesize(config, data_rng)

    h = ShiftedOddPoissonDim(config.dim_mean)
    computed_tail = dim_tail_mass(h, config.k_max)
    rho0 = rho_at_zero(LocationScaleModel(sigma=config.sigma, m=config.m))
    K = fm_tolerance(config.sigma, config.m, config.b, config.tail_target, rho0)

    audit = BudgetAudit(report.path("budget_audit.jsonl"))
    audit.record("budget", sigma=config.sigma, m=config.m, b=config.b,
                 tail_target=config.tail_target, tail_computed_at_k_max=computed_tail,
                 K=K)

    ladder = tuple(config.simpson_start * 2**i
                   for i in range(config.simpson_max_refinements + 1))
    budgeted = BudgetedForwardMap(
        lambda beta, n_grid: deconv_forward_simpson(
            beta, config.kernel_halfwidth, design, n_grid
        ),
        K=K, policy=RefinementPolicy(ladder), audit=audit,
    )
    exact_fm = lambda beta: deconv_forward_exact(beta, config.kernel_halfwidth, design)

    rw = walk_scales(config, design)
    chain_numeric = _run_chain(config, budgeted, design, y, rw)
    audit.close()
    chain_exact = _run_chain(config, exact_fm, design, y, rw)

    chain_numeric.save_csv(report.chain_path("numeric.csv"))
    chain_exact.save_csv(report.chain_path("exact.csv"))

    # dimension posterior against the truncated, renormalized prior
    atoms = h.atoms_upto(config.k_max)
    prior_w = np.array([h.pmf(int(i)) for i in atoms])
    prior_w /= prior_w.sum()
    pmf_numeric = chain_numeric.dimension_pmf(config.k_max)[atoms]
    pmf_exact = chain_exact.dimension_pmf(config.k_max)[atoms]
    report.write_csv(
        "dimension_pmf.csv",
        ["dim", "prior_truncated", "posterior_numeric", "posterior_exact"],
        [(int(d), float(pw), float(pn), float(pe))
         for d, pw, pn, pe in zip(atoms, prior_w, pmf_numeric, pmf_exact)],
    )

    # per-parameter marginal comparison, conditional on the parameter existing
    truth = list(config.true_coefficients)
    names, tv_rows, marg_panels = [], [], []
    n_params = 1 + 2 * config.marginal_pairs
    for idx in range(n_params):
        if idx == 0:
            name = "beta0"
        else:
            j = (idx + 1) // 2
            name = f"beta{j}" if idx % 2 == 1 else f"alpha{j}"
        sa = chain_numeric.coefficient(idx)
        sb = chain_exact.coefficient(idx)
        tv = hist_tv(sa, sb, bins=50) if len(sa) and len(sb) else float("nan")
        names.append(name)
        tv_rows.append((name, tv, len(sa), len(sb)))
        true_val = truth[idx] if idx < len(truth) else 0.0
        marg_panels.append((name, sa, sb, true_val))
    report.write_csv("marginal_tv.csv",
                     ["parameter", "hist_tv", "n_numeric", "n_exact"], tv_rows)

    xs = np.linspace(0.0, 1.0, 201)
    basis = FourierPairBasis()
    truth_arr = np.asarray(config.true_coefficients, dtype=float)
    theta_curve = basis.design_matrix(xs, len(truth_arr)) @ truth_arr
    conv_curve = np.array([
        convolve_analytic(truth_arr, config.kernel_halfwidth, x) for x in xs
    ])
    report.write_csv("true_function.csv", ["t", "theta", "convolution"],
                     list(zip(xs, theta_curve, conv_curve)))
    report.write_csv("data.csv", ["t", "y"], list(zip(design, y)))

    plots.curve_fit_figure(report.figure_path("data_fit.png"), xs,
                           {"true function": theta_curve, "convolution": conv_curve},
                           data_x=design, data_y=y, xlabel="t")
    plots.dimension_pmf_figure(
        report.figure_path("dimension_pmf.png"), atoms, prior_w,
        {"numeric FM": pmf_numeric, "exact FM": pmf_exact},
        true_dim=len(config.true_coefficients),
    )
    plots.marginal_grid_figure(report.figure_path("marginals.png"), marg_panels)

    tvs = [row[1] for row in tv_rows if not math.isnan(row[1])]
    summary = {
        "experiment": "deconv",
        "seed": config.seed,
        "fm_tolerance": K,
        "tail_target": config.tail_target,
        "tail_computed_at_k_max": computed_tail,
        "tail_note": (
            "the shifted-to-odd Poisson(mean 8) tail at k_max=12 is ~0.14, an "
            "order of magnitude above the 0.01 target; the budget uses the "
            "configured target" if computed_tail > config.tail_target else ""
        ),
        "dimension_label_note": (
            "true model: intercept plus 3 cos/sin pairs = 7 flat parameters; "
            "a pair-count label would read 3 (or 4 counting the intercept group)"
        ),
        "worst_fm_error": budgeted.worst_accepted,
        "final_simpson_grid": budgeted.level,
        "margin_below_10pct": budgeted.margin_flagged(),
        "max_marginal_tv": max(tvs),
        "marginal_tv": {name: row[1] for name, row in zip(names, tv_rows)},
        "dim_mode_numeric": int(atoms[np.argmax(pmf_numeric)]),
        "dim_mode_exact": int(atoms[np.argmax(pmf_exact)]),
        "max_sampled_dim": int(max(chain_numeric.labels.max(), chain_exact.labels.max())),
        "jump_acceptance_numeric": {
            "birth": chain_numeric.acceptance_rate("birth"),
            "death": chain_numeric.acceptance_rate("death"),
            "walk": chain_numeric.acceptance_rate("walk"),
        },
    }
    report.write_json("summary.json", summary)
    return summary
