"""Expected free energy of counterfactual actions.

Per candidate action the planner evaluates pragmatic value (expected
log-preference of the predicted joint outcome), salience (entropy of the
predictive observation distributions), and novelty (expected information gain
about the transition counts). The planning horizon is a single step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .beliefs import FactorBelief, dirichlet_kl, dirichlet_mean, predict_state
from .genmodel import GenerativeModel, normalized_matrix, predict_counts

EGO_FACTOR = 0


@dataclass(frozen=True)
class PredictiveProfile:
    """Per-factor predicted observation distributions; ego's row is one-hot."""

    marginals: np.ndarray  # shape (n_factors, n_actions)

    def __post_init__(self):
        m = np.asarray(self.marginals, dtype=float)
        object.__setattr__(self, "marginals", m)
        if np.any(np.abs(m.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("predictive marginals must each sum to 1")


@dataclass(frozen=True)
class EFEBreakdown:
    """Per-action EFE components; total = -pragmatic - salience - novelty."""

    pragmatic: np.ndarray
    salience: np.ndarray
    novelty: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return -self.pragmatic - self.salience - self.novelty


def predictive_profile(
    beliefs: list, model: GenerativeModel, action: int
) -> PredictiveProfile:
    """Predict each factor's next observation under a counterfactual ego action.

    The delta likelihood makes the observation distribution equal the
    predicted state distribution; ego's own modality is pinned to the action
    under consideration.
    """
    rows = np.empty((model.n_factors, model.n_actions))
    for n, belief in enumerate(beliefs):
        if n == EGO_FACTOR:
            rows[n] = 0.0
            rows[n, action] = 1.0
        else:
            rows[n] = predict_state(belief, normalized_matrix(model.transition, action, n))
    return PredictiveProfile(rows)


def _joint(profile: PredictiveProfile) -> np.ndarray:
    return reduce(np.multiply.outer, profile.marginals)


def pragmatic_value(profile: PredictiveProfile, prefs) -> float:
    """Expected log-preference of the predicted joint outcome; always <= 0."""
    return float(np.sum(_joint(profile) * np.log(prefs.probs)))


def salience(profile: PredictiveProfile) -> float:
    """Summed entropy (nats) of the predictive marginals; deterministic rows add 0."""
    p = profile.marginals
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(p), 0.0)
    return float(terms.sum())


def novelty(model: GenerativeModel, beliefs: list, action: int) -> float:
    """Expected Dirichlet information gain on the transition counts from acting."""
    total = 0.0
    for n, belief in enumerate(beliefs):
        current = dirichlet_mean(belief)
        if n == EGO_FACTOR:
            predicted = np.zeros(model.n_actions)
            predicted[action] = 1.0
        else:
            predicted = predict_state(belief, normalized_matrix(model.transition, action, n))
        updated = predict_counts(model.transition, action, n, current, predicted, model.alpha_l)
        base = model.transition.counts[action, n]
        for col in range(base.shape[1]):
            total += dirichlet_kl(updated[:, col], base[:, col])
    return total


def efe_all_actions(
    beliefs: list,
    model: GenerativeModel,
    prefs,
    learning_enabled: bool = True,
) -> EFEBreakdown:
    n_actions = model.n_actions
    rho = np.empty(n_actions)
    sal = np.empty(n_actions)
    eta = np.zeros(n_actions)
    for u in range(n_actions):
        profile = predictive_profile(beliefs, model, u)
        rho[u] = pragmatic_value(profile, prefs)
        sal[u] = salience(profile)
        if learning_enabled:
            eta[u] = novelty(model, beliefs, u)
    return EFEBreakdown(pragmatic=rho, salience=sal, novelty=eta)
