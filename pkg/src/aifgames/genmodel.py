"""Transition-model counts, slow-timescale learning, and Bayesian model reduction.

The transition model holds one matrix of Dirichlet counts per (ego action,
factor), with the convention column = previous state, row = next state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beliefs import FactorBelief

COLUMN_MASS_CAP = 10.0
EVIDENCE_TIE_TOL = 1e-12
RESET_CONCENTRATION = 5.0


@dataclass
class TransitionModel:
    """Concentration counts, shape (n_actions, n_factors, |U|, |U|)."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        self.counts = counts
        if counts.ndim != 4:
            raise ValueError("counts must have shape (actions, factors, U, U)")
        if not np.all(counts > 0) or not np.all(np.isfinite(counts)):
            raise ValueError("transition counts must be positive and finite")

    @classmethod
    def uniform(cls, n_actions: int, n_factors: int) -> "TransitionModel":
        return cls(np.ones((n_actions, n_factors, n_actions, n_actions)))

    def copy(self) -> "TransitionModel":
        return TransitionModel(self.counts.copy())


def normalized_matrix(model: TransitionModel, action: int, factor: int) -> np.ndarray:
    """Column-normalized (stochastic) form of one counts matrix."""
    m = model.counts[action, factor]
    return m / m.sum(axis=0, keepdims=True)


@dataclass
class TransitionBuffer:
    """Chronological (per-factor state means, ego action) pairs since last learning."""

    entries: list = field(default_factory=list)

    def append(self, state_means: np.ndarray, action: int) -> None:
        self.entries.append((np.asarray(state_means, dtype=float).copy(), int(action)))

    def clear(self) -> None:
        self.entries.clear()

    def __len__(self) -> int:
        return len(self.entries)


def learn_update(
    model: TransitionModel,
    buffer: TransitionBuffer,
    alpha_l: float,
    column_mass_cap: float = COLUMN_MASS_CAP,
) -> TransitionModel:
    """Accumulate outer products of consecutive state means into the counts.

    Each buffered transition only touches the slice of the ego action under
    which it was taken. Columns whose total exceeds ``column_mass_cap`` are
    rescaled back to the cap, so the model has bounded memory: without the
    cap the counts grow without limit, the reduction softmax saturates into
    an argmax with degenerate concentrations, and the novelty term either
    blows up or vanishes.
    """
    if len(buffer) < 2:
        raise ValueError("need at least two buffered entries to learn")
    counts = model.counts.copy()
    for (s_prev, u_prev), (s_next, _) in zip(buffer.entries, buffer.entries[1:]):
        for n in range(counts.shape[1]):
            counts[u_prev, n] += alpha_l * np.outer(s_next[n], s_prev[n])
    if column_mass_cap is not None:
        totals = counts.sum(axis=2, keepdims=True)
        counts = np.where(
            totals > column_mass_cap, counts * (column_mass_cap / totals), counts
        )
    return TransitionModel(counts)


def predict_counts(
    model: TransitionModel,
    action: int,
    factor: int,
    current: np.ndarray,
    predicted: np.ndarray,
    alpha_l: float,
) -> np.ndarray:
    """Counterfactual counts after one learning increment; pure function."""
    return model.counts[action, factor] + alpha_l * np.outer(predicted, current)


def bayesian_model_reduction(
    model: TransitionModel,
    posterior: TransitionModel,
    alpha_r: float = 1.25,
    restore: str = "reset",
    reset_concentration: float = RESET_CONCENTRATION,
) -> TransitionModel:
    """Select, per column, between the learned counts and a smoothed reduction.

    The reduced candidate is the softmax of each pre-learning column scaled
    by 1/alpha_r. Its evidence is compared against the original
    parameterisation under the post-learning column weights; a positive
    difference selects the reduced column, otherwise the posterior is kept.

    ``restore`` controls the counts an accepted reduction carries: "reset"
    installs the reduced probabilities at a fixed total concentration
    ``reset_concentration`` (accepted columns shed accumulated count mass but
    keep moderate confidence, so the novelty term relaxes rather than spiking
    on every acceptance), while "mass" rescales them to the posterior
    column's total.
    """
    if model.counts.shape != posterior.counts.shape:
        raise ValueError("model and posterior shapes differ")
    if restore not in ("reset", "mass"):
        raise ValueError(f"unknown restore rule {restore!r}")
    out = posterior.counts.copy()
    n_actions, n_factors, _, _ = model.counts.shape
    for u in range(n_actions):
        for n in range(n_factors):
            prior_m = model.counts[u, n]
            post_m = posterior.counts[u, n]
            for col in range(prior_m.shape[1]):
                prior_col = prior_m[:, col]
                post_col = post_m[:, col]
                p = prior_col / prior_col.sum()
                scaled = prior_col / alpha_r
                ex = np.exp(scaled - scaled.max())
                p_reduced = ex / ex.sum()
                w = post_col / post_col.sum()
                delta_evidence = np.log(np.dot(w, p_reduced / p))
                # ties (identical posterior and model) keep the posterior;
                # the tolerance absorbs rounding in the expectation above
                if delta_evidence > EVIDENCE_TIE_TOL:
                    scale = reset_concentration if restore == "reset" else post_col.sum()
                    out[u, n, :, col] = scale * p_reduced
    return TransitionModel(out)


@dataclass
class GenerativeModel:
    """One agent's full model: initial priors D, habits E, transitions B, rates."""

    initial_prior: list  # FactorBelief per factor
    habits: np.ndarray  # E, probability vector over actions
    transition: TransitionModel
    learn_interval_bounds: tuple = (18, 30)
    alpha_l: float = 1.0
    alpha_r: float = 1.25

    def __post_init__(self):
        self.habits = np.asarray(self.habits, dtype=float)
        if abs(self.habits.sum() - 1.0) > 1e-9:
            raise ValueError("habits must sum to 1")
        lo, hi = self.learn_interval_bounds
        if lo > hi:
            raise ValueError("learning interval bounds out of order")

    @classmethod
    def default(cls, n_agents: int, n_actions: int = 2, **kwargs) -> "GenerativeModel":
        return cls(
            initial_prior=[FactorBelief(np.ones(n_actions)) for _ in range(n_agents)],
            habits=np.full(n_actions, 1.0 / n_actions),
            transition=TransitionModel.uniform(n_actions, n_agents),
            **kwargs,
        )

    @property
    def n_factors(self) -> int:
        return self.transition.counts.shape[1]

    @property
    def n_actions(self) -> int:
        return self.transition.counts.shape[0]
