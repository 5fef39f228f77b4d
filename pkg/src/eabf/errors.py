"""Exception hierarchy shared across the library."""


class EabfError(Exception):
    """Base class for all library errors."""


class ContractError(EabfError):
    """An argument violated a documented precondition (shape, range, type)."""


class NumericInputError(EabfError):
    """A numeric input contained NaN or infinity where finite values are required."""


class InfeasibleBudgetError(EabfError):
    """The prior-truncation TV mass consumes the whole error budget (tail >= b)."""


class RefinementExhaustedError(EabfError):
    """The refinement ladder ran out before the error estimate met the tolerance.

    Carries the best estimate achieved so callers can report how far off it was.
    """

    def __init__(self, message, best_estimate=None, level=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.level = level


class SolverError(EabfError):
    """A forward solve failed (non-positive conductivity, instability, ...)."""


class NumericalError(EabfError):
    """A linear-algebra step failed (singular or ill-conditioned system)."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class GridTooSmallError(EabfError):
    """A quadrature grid does not cover the effective posterior support."""


class SamplerError(EabfError):
    """An MCMC step hit an invalid state (NaN log-target, undefined diagnostic)."""


class DegeneratePosteriorError(EabfError):
    """All posterior weights vanished; nothing to normalize."""


class ConfigError(EabfError):
    """An experiment configuration failed validation."""
