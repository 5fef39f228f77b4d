"""Forward maps with after-the-fact error estimates and refinement control."""

from .controller import (
    BudgetedForwardMap,
    ForwardSolve,
    RefinementPolicy,
    solve_to_budget,
)
from .convolution import (
    convolve_analytic,
    convolve_simpson,
    deconv_forward_exact,
    deconv_forward_simpson,
)
from .fem1d import Conductivity, Fem1dSolve, fem1d_forward, fem1d_heat_solve
from .heat2d import Heat2dSolver, heat2d_exact, heat2d_numeric
from .wave import wave_design_matrix, wave_fm

__all__ = [
    "BudgetedForwardMap",
    "ForwardSolve",
    "RefinementPolicy",
    "solve_to_budget",
    "convolve_analytic",
    "convolve_simpson",
    "deconv_forward_exact",
    "deconv_forward_simpson",
    "Conductivity",
    "Fem1dSolve",
    "fem1d_forward",
    "fem1d_heat_solve",
    "Heat2dSolver",
    "heat2d_exact",
    "heat2d_numeric",
    "wave_design_matrix",
    "wave_fm",
]
