"""Dirichlet beliefs over opponent-type simplices and variational inference.

Each tracked agent occupies one factor whose hidden state lives on the action
simplex; beliefs about it are Dirichlet with concentration vector theta.
Inference minimises the variational free energy of the latest observation,
either by stochastic gradient descent on a Monte-Carlo estimate or by the
closed-form conjugate update, which is the exact minimiser of the same
objective and doubles as the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln

SAMPLE_FLOOR = 1e-12
THETA_FLOOR = 1e-3


class InferenceError(RuntimeError):
    """Raised when inference produces non-finite quantities."""


@dataclass(frozen=True)
class FactorBelief:
    """Dirichlet concentration vector over one factor's type simplex."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        object.__setattr__(self, "theta", theta)
        if not np.all(np.isfinite(theta)) or not np.all(theta > 0):
            raise ValueError(f"concentrations must be positive and finite, got {theta}")


@dataclass
class InferenceSettings:
    mc_samples: int = 32
    sgd_steps: int = 500
    sgd_learning_rate: float = 0.1
    convergence_tol: float = 1e-7
    mode: str = "conjugate"

    def __post_init__(self):
        if self.mc_samples < 1:
            raise ValueError("need at least one MC sample")
        if self.sgd_learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.mode not in ("monte-carlo", "conjugate"):
            raise ValueError(f"unknown inference mode {self.mode!r}")


def dirichlet_mean(belief: FactorBelief) -> np.ndarray:
    return belief.theta / belief.theta.sum()


def dirichlet_kl(alpha: np.ndarray, beta: np.ndarray) -> float:
    """KL divergence between Dirichlet(alpha) and Dirichlet(beta)."""
    a0 = alpha.sum()
    b0 = beta.sum()
    return float(
        gammaln(a0)
        - gammaln(alpha).sum()
        - gammaln(b0)
        + gammaln(beta).sum()
        + np.dot(alpha - beta, digamma(alpha) - digamma(a0))
    )


def _dirichlet_logpdf(samples: np.ndarray, theta: np.ndarray) -> np.ndarray:
    lognorm = gammaln(theta).sum() - gammaln(theta.sum())
    return ((theta - 1.0) * np.log(samples)).sum(axis=-1) - lognorm


def vfe_exact(q: FactorBelief, prior: FactorBelief, observation: int) -> float:
    """Closed-form free energy: KL(q || prior) minus expected log-likelihood."""
    expected_log_s = digamma(q.theta[observation]) - digamma(q.theta.sum())
    return dirichlet_kl(q.theta, prior.theta) - float(expected_log_s)


def vfe_mc(
    q: FactorBelief,
    prior: FactorBelief,
    observation: int,
    L: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo free energy estimate; unbiased for vfe_exact."""
    samples = np.clip(rng.dirichlet(q.theta, size=L), SAMPLE_FLOOR, None)
    per_sample = (
        _dirichlet_logpdf(samples, q.theta)
        - _dirichlet_logpdf(samples, prior.theta)
        - np.log(samples[:, observation])
    )
    return float(per_sample.mean())


def _vfe_grad_theta(theta: np.ndarray, prior: np.ndarray, observation: int) -> np.ndarray:
    """Analytic gradient of the closed-form free energy w.r.t. theta."""
    from scipy.special import polygamma

    diff = theta - prior
    diff[observation] -= 1.0
    return polygamma(1, theta) * diff - polygamma(1, theta.sum()) * diff.sum()


def infer(
    prior: FactorBelief,
    observation: int,
    settings: InferenceSettings,
    rng: np.random.Generator,
) -> FactorBelief:
    """Update one factor's belief from an observed action.

    Conjugate mode adds a unit count to the observed component. Monte-Carlo
    mode runs SGD on the free energy in log-concentration space (keeping
    theta positive without projection); the descent direction is the exact
    analytic gradient, so the result is deterministic given the seed.
    """
    if settings.mode == "conjugate":
        theta = prior.theta.copy()
        theta[observation] += 1.0
        return FactorBelief(theta)

    phi = np.log(prior.theta)
    last_f = vfe_exact(prior, prior, observation)
    for _ in range(settings.sgd_steps):
        theta = np.exp(phi)
        grad = _vfe_grad_theta(theta, prior.theta, observation) * theta
        if not np.all(np.isfinite(grad)):
            raise InferenceError(f"non-finite gradient at theta={theta}")
        phi = phi - settings.sgd_learning_rate * grad
        f = vfe_exact(FactorBelief(np.exp(phi)), prior, observation)
        if abs(f - last_f) < settings.convergence_tol:
            last_f = f
            break
        last_f = f
    return FactorBelief(np.exp(phi))


def predict_state(belief: FactorBelief, transition_column_matrix: np.ndarray) -> np.ndarray:
    """Propagate the belief mean through a column-stochastic transition matrix."""
    colsums = transition_column_matrix.sum(axis=0)
    if np.any(np.abs(colsums - 1.0) > 1e-9):
        raise ValueError("transition matrix columns must sum to 1")
    return transition_column_matrix @ dirichlet_mean(belief)


def categorical_to_prior(
    mean: np.ndarray, concentration: float, floor: float = THETA_FLOOR
) -> FactorBelief:
    """Re-project a categorical prediction into a Dirichlet prior."""
    if concentration <= 0:
        raise ValueError("concentration must be positive")
    return FactorBelief(np.maximum(concentration * np.asarray(mean, dtype=float), floor))
