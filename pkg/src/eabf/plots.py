"""Figure rendering for experiment reports (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def _save(fig, path):
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def dimension_pmf_figure(path, atoms, prior_pmf, posteriors: dict, true_dim=None):
    """Bar chart of the dimension prior against one or more posteriors."""
    atoms = np.asarray(atoms)
    n_series = 1 + len(posteriors)
    width = 0.8 / n_series
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(atoms - 0.4 + width / 2, prior_pmf, width=width, color="seagreen",
           label="prior", alpha=0.8)
    for i, (label, pmf) in enumerate(posteriors.items(), start=1):
        ax.bar(atoms - 0.4 + width * i + width / 2, pmf, width=width, label=label, alpha=0.8)
    if true_dim is not None:
        ax.axvline(true_dim, color="red", linestyle="--", linewidth=1, label="true dimension")
    ax.set_xlabel("dimension")
    ax.set_ylabel("probability")
    ax.legend()
    _save(fig, path)


def curve_fit_figure(path, x, curves: dict, data_x=None, data_y=None,
                     band=None, xlabel="x", ylabel="value"):
    """Line plot of named curves, optional scatter data and shaded band."""
    fig, ax = plt.subplots(figsize=(7, 4))
    if band is not None:
        lo, hi = band
        ax.fill_between(x, lo, hi, color="steelblue", alpha=0.25, linewidth=0)
    for label, ys in curves.items():
        ax.plot(x, ys, label=label)
    if data_x is not None:
        ax.plot(data_x, data_y, "k.", markersize=5, label="data")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    _save(fig, path)


def marginal_grid_figure(path, marginals: list, bins: int = 50):
    """Grid of per-parameter posterior histograms for two matched runs.

    Each entry of ``marginals`` is (name, samples_a, samples_b, true_value).
    """
    n = len(marginals)
    ncols = 3
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows))
    axes = np.atleast_1d(axes).ravel()
    for ax in axes[n:]:
        ax.set_visible(False)
    for ax, (name, sa, sb, truth) in zip(axes, marginals):
        lo = min(np.min(sa), np.min(sb))
        hi = max(np.max(sa), np.max(sb))
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        ax.hist(sa, bins=bins, range=(lo, hi), density=True, alpha=0.55,
                color="tab:blue", label="numeric FM")
        ax.hist(sb, bins=bins, range=(lo, hi), density=True, alpha=0.55,
                color="magenta", label="exact FM")
        if truth is not None:
            ax.axvline(truth, color="red", linewidth=1)
        ax.set_title(name, fontsize=9)
        ax.tick_params(labelsize=7)
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    _save(fig, path)


def rate_loglog_figure(path, series: dict, xlabel="n", ylabel="TV"):
    """Log-log decay plot; each entry is label -> (n_list, tvs, bounds or None)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (ns, tvs, bounds) in series.items():
        ax.loglog(ns, tvs, "o-", label=label)
        if bounds is not None:
            ax.loglog(ns, bounds, "--", alpha=0.6, label=f"{label} bound")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, path)


def field_figure(path, xs, ys, values, data_xy=None, title=""):
    """Filled-contour view of a 2D field with optional observation points."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.contourf(xs, ys, values.T, levels=30, cmap="viridis")
    fig.colorbar(im, ax=ax)
    if data_xy is not None:
        ax.plot(data_xy[:, 0], data_xy[:, 1], "r.", markersize=6)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    _save(fig, path)
