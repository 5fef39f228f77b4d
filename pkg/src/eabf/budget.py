"""Forward-map error budgets derived from the expected absolute Bayes factor.

The pre-data criterion bounds the expected absolute Bayes factor between the
numerical and the theoretical model by

    rho(0) * K * m / sigma + tail

where K is the sup error of the numerical forward map at the observation
points and ``tail`` is the TV mass lost to prior truncation.  Requiring the
bound to stay below a threshold b gives the solver tolerance

    K < (sigma / m) * (b - tail) / rho(0).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json

import numpy as np

from .errors import ContractError, InfeasibleBudgetError
from .obs import LocationScaleModel, rho_at_zero

DEFAULT_B = 1.0 / 20.0
DEFAULT_TAIL_TARGET = 1.0 / 100.0


def _jsonable(value):
    """json.dumps default hook: unwrap numpy scalars and arrays."""
    if hasattr(value, "item") and np.ndim(value) == 0:
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def fm_tolerance(sigma: float, m: int, b: float, tail: float, rho0: float,
                 safety: float = 1.0) -> float:
    """Forward-map sup-error tolerance K = (sigma/m) (b - tail) / rho0.

    A solver whose global error stays below K keeps the expected absolute
    Bayes factor under b.  ``safety`` optionally shrinks the tolerance
    multiplicatively (default 1.0: the theorem bound is used as-is).
    """
    if not (sigma > 0 and np.isfinite(sigma)):
        raise ContractError(f"sigma must be positive, got {sigma}")
    if not m >= 1:
        raise ContractError(f"m must be >= 1, got {m}")
    if not (0.0 < b <= 1.0):
        raise ContractError(f"b must be in (0, 1], got {b}")
    if not (rho0 > 0 and np.isfinite(rho0)):
        raise ContractError(f"rho0 must be positive, got {rho0}")
    if not 0.0 <= tail:
        raise ContractError(f"tail must be nonnegative, got {tail}")
    if not 0.0 < safety <= 1.0:
        raise ContractError(f"safety must be in (0, 1], got {safety}")
    if tail >= b:
        raise InfeasibleBudgetError(
            f"prior truncation tail {tail} consumes the whole budget b={b}; raise k"
        )
    return safety * (sigma / m) * (b - tail) / rho0


def eabf_bound(fm_error: float, sigma: float, m: int, rho0: float, tail: float) -> float:
    """Upper bound rho0 * fm_error * m / sigma + tail on the expected |BF - 1|/2."""
    if not sigma > 0:
        raise ContractError("sigma must be positive")
    if fm_error < 0 or tail < 0 or rho0 < 0:
        raise ContractError("fm_error, tail and rho0 must be nonnegative")
    return rho0 * fm_error * m / sigma + tail


def abf(z_num: float, z_ref: float) -> float:
    """Absolute Bayes factor distance |z_num / z_ref - 1| / 2."""
    if not z_ref > 0:
        raise ContractError(f"reference evidence must be positive, got {z_ref}")
    if z_num < 0:
        raise ContractError(f"evidence must be nonnegative, got {z_num}")
    return 0.5 * abs(z_num / z_ref - 1.0)


@dataclasses.dataclass(frozen=True)
class ErrorBudget:
    """Resolved error budget for one experiment.

    Invariant: K == (sigma/m) * (b - tail) / rho0 (times the safety factor).
    """

    sigma: float
    m: int
    b: float = DEFAULT_B
    tail: float = 0.0
    rho0: float = 1.0 / np.sqrt(2.0 * np.pi)
    safety: float = 1.0

    def __post_init__(self):
        fm_tolerance(self.sigma, self.m, self.b, self.tail, self.rho0, self.safety)

    @property
    def K(self) -> float:
        return fm_tolerance(self.sigma, self.m, self.b, self.tail, self.rho0, self.safety)

    @classmethod
    def for_model(cls, model: LocationScaleModel, b: float = DEFAULT_B,
                  tail: float = 0.0, safety: float = 1.0) -> "ErrorBudget":
        return cls(sigma=model.sigma, m=model.m, b=b, tail=tail,
                   rho0=rho_at_zero(model), safety=safety)

    def bound_for(self, fm_error: float) -> float:
        return eabf_bound(fm_error, self.sigma, self.m, self.rho0, self.tail)

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma, "m": self.m, "b": self.b, "tail": self.tail,
            "rho0": self.rho0, "safety": self.safety, "K": self.K,
        }


def theta_fingerprint(theta) -> str:
    """Short stable hash of a parameter vector, for audit records."""
    arr = np.ascontiguousarray(np.asarray(theta, dtype=float))
    return hashlib.sha1(arr.tobytes()).hexdigest()[:12]


class BudgetAudit:
    """Line-delimited audit trail of budget inputs and per-solve error estimates.

    Each record is one JSON object per line with sorted keys, so identical
    runs produce byte-identical logs.  With a ``path`` the records stream to
    the file and are not retained (a long chain audits every solver call);
    without one they accumulate in memory for inspection.
    """

    def __init__(self, path=None):
        self.records = []
        self.n_records = 0
        self._worst = 0.0
        self._fh = open(path, "w") if path is not None else None

    def record(self, kind: str, **fields) -> None:
        rec = {"kind": kind}
        rec.update(fields)
        self.n_records += 1
        if "error_estimate" in rec:
            self._worst = max(self._worst, rec["error_estimate"])
        if self._fh is not None:
            self._fh.write(json.dumps(rec, sort_keys=True, default=_jsonable) + "\n")
        else:
            self.records.append(rec)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec, sort_keys=True, default=_jsonable) + "\n")

    def worst_error(self) -> float:
        return self._worst
