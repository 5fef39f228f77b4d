"""Exact forward map for the 1D wave example: u(x, 1) from sine coefficients."""

from __future__ import annotations

import numpy as np

from ..errors import ContractError
from .controller import ForwardSolve


def wave_design_matrix(design, kappa: int) -> np.ndarray:
    """m x kappa matrix with entries (-1)^n sin(n pi z_j), n = 1..kappa."""
    design = np.asarray(design, dtype=float)
    if kappa < 0:
        raise ContractError(f"kappa must be >= 0, got {kappa}")
    n = np.arange(1, kappa + 1)
    return ((-1.0) ** n)[None, :] * np.sin(np.pi * np.outer(design, n))


def wave_fm(coefficients, design) -> ForwardSolve:
    """Evaluate sum_n A_n (-1)^n sin(n pi z_j); exact, so error_estimate is 0."""
    design = np.asarray(design, dtype=float)
    if np.any(design <= 0) or np.any(design >= 1):
        raise ContractError("design points must lie strictly inside (0, 1)")
    coefficients = np.asarray(coefficients, dtype=float)
    eta = wave_design_matrix(design, len(coefficients)) @ coefficients
    return ForwardSolve(eta=eta, error_estimate=0.0, discretization={"kind": "exact-series"})
