"""Precision-modulated action selection."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .planning import EFEBreakdown

DENOM_FLOOR = 0.2
MAX_FIXED_POINT_ITERS = 16
FIXED_POINT_TOL = 1e-6


class PrecisionError(RuntimeError):
    """Raised when the precision update produces a non-finite value."""


@dataclass(frozen=True)
class PrecisionState:
    beta0: float
    beta1: float
    gamma: float

    def __post_init__(self):
        if self.beta0 <= 0 or self.beta1 <= 0:
            raise ValueError("beta0 and beta1 must be positive")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise PrecisionError(f"invalid precision {self.gamma}")

    @classmethod
    def initial(cls, beta0: float, beta1: float) -> "PrecisionState":
        return cls(beta0=beta0, beta1=beta1, gamma=beta1 / beta0)


def policy_distribution(
    efe: EFEBreakdown, habits: np.ndarray, gamma: float
) -> np.ndarray:
    """Softmax of log habits minus the precision-scaled EFE."""
    logits = np.log(habits) - gamma * efe.total
    logits -= logits.max()
    ex = np.exp(logits)
    return ex / ex.sum()


def update_precision(
    state: PrecisionState, efe: EFEBreakdown, habits: np.ndarray
) -> PrecisionState:
    """Damped fixed-point iteration of the precision/expected-EFE circularity."""
    gamma = state.gamma
    for _ in range(MAX_FIXED_POINT_ITERS):
        q = policy_distribution(efe, habits, gamma)
        expected_g = float(np.dot(q, efe.total))
        new_gamma = state.beta1 / max(state.beta0 - expected_g, DENOM_FLOOR)
        if not np.isfinite(new_gamma):
            raise PrecisionError(f"non-finite precision from <G>={expected_g}")
        if abs(new_gamma - gamma) < FIXED_POINT_TOL:
            gamma = new_gamma
            break
        gamma = new_gamma
    return replace(state, gamma=gamma)


def sample_action(policy: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from the policy; deterministic given the rng state."""
    if abs(policy.sum() - 1.0) > 1e-9:
        raise ValueError("policy must sum to 1")
    r = rng.random()
    return int(np.searchsorted(np.cumsum(policy), r, side="right").clip(0, len(policy) - 1))
