"""Refinement control: run a solver ladder until the error estimate meets K."""

from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

import numpy as np

from ..budget import BudgetAudit, theta_fingerprint
from ..errors import ContractError, RefinementExhaustedError, SolverError


@dataclasses.dataclass(frozen=True)
class ForwardSolve:
    """One forward-map evaluation with its after-the-fact error estimate."""

    eta: np.ndarray
    error_estimate: float
    discretization: dict

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        object.__setattr__(self, "eta", eta)
        if not (np.isfinite(self.error_estimate) and self.error_estimate >= 0):
            raise ContractError(
                f"error_estimate must be finite and >= 0, got {self.error_estimate}"
            )


@dataclasses.dataclass(frozen=True)
class RefinementPolicy:
    """An explicit, finite ladder of discretization levels, coarse to fine."""

    levels: tuple

    def __post_init__(self):
        if len(self.levels) < 1:
            raise ContractError("refinement policy needs at least one level")

    @classmethod
    def additive(cls, start: int, step: int, max_refinements: int) -> "RefinementPolicy":
        """Integer sizes start, start+step, ... (e.g. elements +50 per refinement)."""
        if step <= 0 or max_refinements < 0:
            raise ContractError("additive policy needs step > 0 and max_refinements >= 0")
        return cls(tuple(start + i * step for i in range(max_refinements + 1)))

    @classmethod
    def halving(cls, start: Sequence[float], max_refinements: int) -> "RefinementPolicy":
        """Tuple-valued levels with every component halved per refinement."""
        if max_refinements < 0:
            raise ContractError("max_refinements must be >= 0")
        start = tuple(float(v) for v in start)
        return cls(tuple(tuple(v / 2.0**i for v in start) for i in range(max_refinements + 1)))


class BudgetedForwardMap:
    """Wraps a level-indexed solver; refines per call until the estimate meets K.

    The current level index only ratchets upward (a chain never coarsens its
    discretization mid-run), and every call is audited.  An error estimate
    that grows under refinement aborts with a diagnostic instead of walking
    the rest of the ladder.
    """

    def __init__(self, solve_at_level: Callable, K: float, policy: RefinementPolicy,
                 audit: BudgetAudit | None = None):
        if not K > 0:
            raise ContractError(f"tolerance K must be positive, got {K}")
        self.solve_at_level = solve_at_level
        self.K = K
        self.policy = policy
        self.audit = audit if audit is not None else BudgetAudit()
        self.level_index = 0
        self.worst_accepted = 0.0
        self.n_calls = 0

    @property
    def level(self):
        return self.policy.levels[self.level_index]

    def __call__(self, theta) -> ForwardSolve:
        fp = theta_fingerprint(theta)
        previous = None
        for idx in range(self.level_index, len(self.policy.levels)):
            level = self.policy.levels[idx]
            solve = self.solve_at_level(theta, level)
            self.audit.record(
                "solve", theta=fp, level=list(np.atleast_1d(level)),
                error_estimate=solve.error_estimate, tolerance=self.K,
                accepted=bool(solve.error_estimate <= self.K),
            )
            if previous is not None and solve.error_estimate > previous:
                raise SolverError(
                    "error estimate increased under refinement "
                    f"({previous:.3e} -> {solve.error_estimate:.3e} at level {level}); "
                    "aborting instead of refining further"
                )
            if solve.error_estimate <= self.K:
                self.level_index = idx
                self.worst_accepted = max(self.worst_accepted, solve.error_estimate)
                self.n_calls += 1
                return solve
            previous = solve.error_estimate
        raise RefinementExhaustedError(
            f"budget K={self.K:.3e} unmet after exhausting the refinement ladder; "
            f"best achieved error estimate {previous:.3e}",
            best_estimate=previous, level=self.policy.levels[-1],
        )

    def margin_flagged(self, threshold: float = 0.10) -> bool:
        """True when the worst accepted estimate is within threshold of K."""
        return (self.K - self.worst_accepted) < threshold * self.K

    def summary(self) -> dict:
        return {
            "tolerance": self.K,
            "final_level": list(np.atleast_1d(self.level)),
            "worst_error_estimate": self.worst_accepted,
            "n_calls": self.n_calls,
            "margin_below_10pct": self.margin_flagged(),
        }


def solve_to_budget(fm: Callable, theta, K: float, policy: RefinementPolicy,
                    audit: BudgetAudit | None = None) -> ForwardSolve:
    """One-shot refinement: fresh controller, single theta."""
    return BudgetedForwardMap(fm, K, policy, audit=audit)(theta)
