"""One agent's per-step perceive / learn / plan / act cycle.

Factor 0 is always the agent's own factor; alters follow in ascending agent
index. Observations arrive in the same egocentric order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beliefs import (
    FactorBelief,
    InferenceSettings,
    categorical_to_prior,
    dirichlet_mean,
    infer,
    predict_state,
    vfe_exact,
    vfe_mc,
)
from .genmodel import (
    GenerativeModel,
    TransitionBuffer,
    bayesian_model_reduction,
    learn_update,
    normalized_matrix,
)
from .planning import efe_all_actions
from .selection import (
    PrecisionState,
    policy_distribution,
    sample_action,
    update_precision,
)


@dataclass
class StepMetrics:
    """Everything logged for one agent at one step."""

    f_factors: np.ndarray  # per-factor VFE
    pragmatic: np.ndarray  # per action
    salience: np.ndarray
    novelty: np.ndarray
    efe: np.ndarray
    gamma: float
    expected_g: float
    policy: np.ndarray
    action: int

    @property
    def f_total(self) -> float:
        return float(self.f_factors.sum())


@dataclass
class AgentState:
    agent_id: int
    beliefs: list  # FactorBelief per factor, ego first
    model: GenerativeModel
    precision: PrecisionState
    inference: InferenceSettings
    rng: np.random.Generator
    prior_concentration: float = 2.0
    buffer: TransitionBuffer = field(default_factory=TransitionBuffer)
    steps_until_learning: int = 0
    prev_action: int | None = None

    @classmethod
    def create(
        cls,
        agent_id: int,
        n_agents: int,
        beta0: float,
        beta1: float,
        inference: InferenceSettings,
        rng: np.random.Generator,
        prior_concentration: float = 2.0,
        alpha_l: float = 1.0,
        alpha_r: float = 1.25,
    ) -> "AgentState":
        model = GenerativeModel.default(n_agents, alpha_l=alpha_l, alpha_r=alpha_r)
        agent = cls(
            agent_id=agent_id,
            beliefs=[FactorBelief(b.theta.copy()) for b in model.initial_prior],
            model=model,
            precision=PrecisionState.initial(beta0, beta1),
            inference=inference,
            rng=rng,
            prior_concentration=prior_concentration,
        )
        agent.steps_until_learning = agent._draw_learning_interval()
        return agent

    def _draw_learning_interval(self) -> int:
        lo, hi = self.model.learn_interval_bounds
        return int(self.rng.integers(lo, hi + 1))

    def _state_means(self) -> np.ndarray:
        return np.stack([dirichlet_mean(b) for b in self.beliefs])

    def _perceive(self, observation) -> np.ndarray:
        f = np.zeros(len(self.beliefs))
        for n, belief in enumerate(self.beliefs):
            matrix = normalized_matrix(self.model.transition, self.prev_action, n)
            prior = categorical_to_prior(
                predict_state(belief, matrix), self.prior_concentration
            )
            posterior = infer(prior, observation[n], self.inference, self.rng)
            if self.inference.mode == "monte-carlo":
                f[n] = vfe_mc(
                    posterior, prior, observation[n], self.inference.mc_samples, self.rng
                )
            else:
                f[n] = vfe_exact(posterior, prior, observation[n])
            self.beliefs[n] = posterior
        return f

    def _maybe_learn(self) -> None:
        if self.steps_until_learning > 0:
            return
        if len(self.buffer) >= 2:
            posterior = learn_update(self.model.transition, self.buffer, self.model.alpha_l)
            self.model.transition = bayesian_model_reduction(
                self.model.transition, posterior, self.model.alpha_r
            )
        self.buffer.clear()
        self.steps_until_learning = self._draw_learning_interval()

    def step(self, observation, prefs, learning_enabled: bool = True):
        """Advance one step; observation is None only at t=0 (plan from D)."""
        if observation is None:
            f = np.zeros(len(self.beliefs))
        else:
            observation = [int(o) for o in observation]
            if len(observation) != len(self.beliefs):
                raise ValueError("observation must carry one action per factor")
            if any(o < 0 or o >= self.model.n_actions for o in observation):
                raise ValueError("observed actions must index the action set")
            f = self._perceive(observation)
            if learning_enabled:
                self.steps_until_learning -= 1
                self._maybe_learn()

        efe = efe_all_actions(self.beliefs, self.model, prefs, learning_enabled)
        self.precision = update_precision(self.precision, efe, self.model.habits)
        policy = policy_distribution(efe, self.model.habits, self.precision.gamma)
        expected_g = float(np.dot(policy, efe.total))
        action = sample_action(policy, self.rng)

        self.buffer.append(self._state_means(), action)
        self.prev_action = action

        metrics = StepMetrics(
            f_factors=f,
            pragmatic=efe.pragmatic.copy(),
            salience=efe.salience.copy(),
            novelty=efe.novelty.copy(),
            efe=efe.total,
            gamma=self.precision.gamma,
            expected_g=expected_g,
            policy=policy,
            action=action,
        )
        return action, metrics
