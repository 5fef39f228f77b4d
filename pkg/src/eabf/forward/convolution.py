"""Box-kernel convolution forward map for the deconvolution example.

F[theta](x) = integral over [max(x - alpha, 0), min(x + alpha, 1)] of
theta(z) / (2 alpha) dz, with theta a constant-plus-Fourier-pairs series.
The integral has closed-form antiderivatives per basis function; Simpson's
rule provides the numerical variant whose error is reported exactly against
the closed form.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractError
from ..priors import FourierPairBasis
from .controller import ForwardSolve

_BASIS = FourierPairBasis()


def _window(x: float, alpha: float):
    return max(x - alpha, 0.0), min(x + alpha, 1.0)


def _series_antiderivative(coeffs: np.ndarray, z: float) -> float:
    """Antiderivative of theta at z: beta0 z + sum_j [b_j sin/(2 pi j) - a_j cos/(2 pi j)]."""
    total = coeffs[0] * z
    j = 1
    idx = 1
    while idx < len(coeffs):
        w = 2.0 * math.pi * j
        total += coeffs[idx] * math.sin(w * z) / w
        idx += 1
        if idx < len(coeffs):
            total -= coeffs[idx] * math.cos(w * z) / w
            idx += 1
        j += 1
    return total


def convolve_analytic(theta_coeffs, alpha: float, x: float) -> float:
    """Closed-form value of the box-kernel convolution at x."""
    if not 0.0 < alpha < 1.0:
        raise ContractError(f"alpha must be in (0, 1), got {alpha}")
    if not 0.0 <= x <= 1.0:
        raise ContractError(f"x must be in [0, 1], got {x}")
    coeffs = np.asarray(theta_coeffs, dtype=float)
    lo, hi = _window(x, alpha)
    return (_series_antiderivative(coeffs, hi) - _series_antiderivative(coeffs, lo)) / (2.0 * alpha)


def convolve_simpson(theta_coeffs, alpha: float, x: float, n_grid: int) -> float:
    """Composite Simpson approximation on a uniform grid over the same window."""
    if n_grid < 2 or n_grid % 2 != 0:
        raise ContractError(f"n_grid must be even and >= 2, got {n_grid}")
    if not 0.0 < alpha < 1.0:
        raise ContractError(f"alpha must be in (0, 1), got {alpha}")
    coeffs = np.asarray(theta_coeffs, dtype=float)
    lo, hi = _window(x, alpha)
    z = np.linspace(lo, hi, n_grid + 1)
    vals = _BASIS.design_matrix(z, len(coeffs)) @ coeffs
    h = (hi - lo) / n_grid
    w = np.ones(n_grid + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(h / 3.0 * np.dot(w, vals)) / (2.0 * alpha)


def deconv_forward_exact(theta_coeffs, alpha: float, design) -> ForwardSolve:
    """Analytic forward map at the observation points (zero error)."""
    eta = np.array([convolve_analytic(theta_coeffs, alpha, x) for x in np.asarray(design, float)])
    return ForwardSolve(eta=eta, error_estimate=0.0, discretization={"kind": "analytic"})


def deconv_forward_simpson(theta_coeffs, alpha: float, design, n_grid: int) -> ForwardSolve:
    """Simpson forward map; error estimate is the max pointwise gap to the closed form."""
    design = np.asarray(design, dtype=float)
    eta = np.array([convolve_simpson(theta_coeffs, alpha, x, n_grid) for x in design])
    exact = np.array([convolve_analytic(theta_coeffs, alpha, x) for x in design])
    err = float(np.max(np.abs(eta - exact)))
    return ForwardSolve(eta=eta, error_estimate=err, discretization={"kind": "simpson", "n_grid": n_grid})
