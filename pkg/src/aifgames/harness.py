"""Seeded trials, ensemble statistics, and the five built-in experiment conditions."""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .agent import AgentState
from .beliefs import InferenceSettings
from .games import GameSchedule, TransitionEvent, build_canonical

KDE_GRID = np.round(np.arange(0.0, 8.0 + 1e-9, 0.01), 10)
KDE_BANDWIDTH = 0.08
CLASSIFY_WINDOW = 50
COOP_THRESHOLD = 0.8
DEFECT_THRESHOLD = 0.2


@dataclass(frozen=True)
class AgentParams:
    beta0: float = 5.0
    beta1: float = 30.0
    alpha_l: float = 1.0
    alpha_r: float = 1.25
    prior_concentration: float = 2.0
    inference: InferenceSettings = field(default_factory=InferenceSettings)
    learning_enabled: bool = True


@dataclass(frozen=True)
class TrialConfig:
    name: str
    n_agents: int
    horizon: int
    base_game: str
    transitions: tuple = ()  # (t_x, T_x, target_name) triples
    agent_params: AgentParams = field(default_factory=AgentParams)
    seed: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.n_agents not in (2, 3):
            raise ValueError("only 2- or 3-agent trials are supported")

    def schedule(self) -> GameSchedule:
        base = build_canonical(self.base_game, self.n_agents)
        events = [
            TransitionEvent(t_x=t_x, T_x=T_x, target=build_canonical(target, self.n_agents))
            for (t_x, T_x, target) in self.transitions
        ]
        for event in events:
            start, end = event.window
            if start < 0 or end > self.horizon:
                raise ValueError(f"transition window {event.window} outside horizon")
        return GameSchedule(base=base, events=events)

    def to_dict(self) -> dict:
        p = self.agent_params
        return {
            "name": self.name,
            "n_agents": self.n_agents,
            "horizon": self.horizon,
            "base_game": self.base_game,
            "transitions": [list(t) for t in self.transitions],
            "agent_params": {
                "beta0": p.beta0,
                "beta1": p.beta1,
                "alpha_l": p.alpha_l,
                "alpha_r": p.alpha_r,
                "prior_concentration": p.prior_concentration,
                "learning_enabled": p.learning_enabled,
                "inference": {
                    "mode": p.inference.mode,
                    "mc_samples": p.inference.mc_samples,
                    "sgd_steps": p.inference.sgd_steps,
                    "sgd_learning_rate": p.inference.sgd_learning_rate,
                    "convergence_tol": p.inference.convergence_tol,
                },
            },
            "seed": self.seed,
        }


@dataclass
class TrialRecord:
    config: TrialConfig
    steps: list  # steps[t][agent] -> StepMetrics
    ensemble_series: np.ndarray
    final_classification: str
    final_b_counts: list = field(default_factory=list)  # per agent, nested lists

    def policy_coop(self) -> np.ndarray:
        """Cooperate-probability per step per agent, shape (horizon, n_agents)."""
        return np.array([[m.policy[0] for m in row] for row in self.steps])


@dataclass
class ConditionSummary:
    name: str
    config: TrialConfig
    n_trials: int
    trial_seeds: list
    final_ensemble_g: list
    classifications: list
    histogram: dict
    kde_samples: np.ndarray
    failures: list


def split_seed(master_seed: int, condition_name: str, trial_index: int) -> int:
    """Stable 64-bit per-trial seed; adding trials never perturbs existing ones."""
    key = f"{master_seed}:{condition_name}:{trial_index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def run_trial(config: TrialConfig) -> TrialRecord:
    schedule = config.schedule()
    params = config.agent_params
    agent_seeds = np.random.SeedSequence(config.seed).spawn(config.n_agents)
    agents = [
        AgentState.create(
            agent_id=i,
            n_agents=config.n_agents,
            beta0=params.beta0,
            beta1=params.beta1,
            inference=params.inference,
            rng=np.random.Generator(np.random.PCG64(agent_seeds[i])),
            prior_concentration=params.prior_concentration,
            alpha_l=params.alpha_l,
            alpha_r=params.alpha_r,
        )
        for i in range(config.n_agents)
    ]

    steps = []
    ensemble = np.empty(config.horizon)
    prev_actions = None
    for t in range(config.horizon):
        prefs = schedule.preference_at_time(t)
        row = []
        actions = []
        for i, agent in enumerate(agents):
            if prev_actions is None:
                obs = None
            else:
                others = [prev_actions[j] for j in range(config.n_agents) if j != i]
                obs = [prev_actions[i]] + others
            try:
                action, metrics = agent.step(obs, prefs, params.learning_enabled)
            except Exception as exc:
                raise RuntimeError(f"agent {i} failed at step {t}: {exc}") from exc
            actions.append(action)
            row.append(metrics)
        prev_actions = actions
        steps.append(row)
        ensemble[t] = sum(m.expected_g for m in row)

    record = TrialRecord(
        config=config,
        steps=steps,
        ensemble_series=ensemble,
        final_classification="",
        final_b_counts=[a.model.transition.counts.tolist() for a in agents],
    )
    record.final_classification = classify_equilibrium(record, CLASSIFY_WINDOW)
    return record


def classify_equilibrium(record: TrialRecord, window: int = CLASSIFY_WINDOW) -> str:
    """Label the final window as PDE, RDE, asymmetric, or mixed."""
    coop = record.policy_coop()[-window:].mean(axis=0)
    high = coop >= COOP_THRESHOLD
    low = coop <= DEFECT_THRESHOLD
    if high.all():
        return "PDE"
    if low.all():
        return "RDE"
    if (high | low).all() and high.any() and low.any():
        return "asymmetric"
    return "mixed"


def kde(values, bandwidth: float, grid) -> np.ndarray:
    """Gaussian kernel density estimate on the given grid."""
    values = np.asarray(values, dtype=float)
    if values.size < 1:
        raise ValueError("need at least one value")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    grid = np.asarray(grid, dtype=float)
    z = (grid[:, None] - values[None, :]) / bandwidth
    return np.exp(-0.5 * z**2).sum(axis=1) / (values.size * bandwidth * np.sqrt(2 * np.pi))


def run_condition(
    template: TrialConfig,
    n_trials: int,
    master_seed: int,
    workers: int = 1,
) -> tuple:
    """Run seeded trials of one condition; returns (summary, records).

    Trial failures are recorded and the condition continues.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    seeds = [split_seed(master_seed, template.name, k) for k in range(n_trials)]
    configs = [replace(template, seed=s) for s in seeds]

    records: list = [None] * n_trials
    failures = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {k: pool.submit(run_trial, cfg) for k, cfg in enumerate(configs)}
            for k, fut in futures.items():
                try:
                    records[k] = fut.result()
                except Exception as exc:
                    failures.append({"trial": k, "error": str(exc)})
    else:
        for k, cfg in enumerate(configs):
            try:
                records[k] = run_trial(cfg)
            except Exception as exc:
                failures.append({"trial": k, "error": str(exc)})

    finished = [r for r in records if r is not None]
    finals = [float(r.ensemble_series[-1]) for r in finished]
    classes = [r.final_classification for r in finished]
    histogram = {c: classes.count(c) for c in ("PDE", "RDE", "asymmetric", "mixed")}
    samples = kde(finals, KDE_BANDWIDTH, KDE_GRID) if finals else np.zeros_like(KDE_GRID)
    summary = ConditionSummary(
        name=template.name,
        config=template,
        n_trials=n_trials,
        trial_seeds=seeds,
        final_ensemble_g=finals,
        classifications=classes,
        histogram=histogram,
        kde_samples=samples,
        failures=failures,
    )
    return summary, records


def builtin_conditions(beta1: float = 30.0, horizon: int = 1000) -> list:
    """The five experiment conditions: Ch warm-up then a Stag Hunt variant."""
    params = AgentParams(beta1=beta1)
    return [
        TrialConfig(
            name="SH2",
            n_agents=2,
            horizon=horizon,
            base_game="Ch",
            transitions=((500, 10, "SH"),),
            agent_params=params,
        ),
        TrialConfig(
            name="SH_g",
            n_agents=3,
            horizon=horizon,
            base_game="Ch3",
            transitions=((500, 10, "SH_g"),),
            agent_params=params,
        ),
        TrialConfig(
            name="SH_r",
            n_agents=3,
            horizon=horizon,
            base_game="Ch3",
            transitions=((500, 10, "SH_r"),),
            agent_params=params,
        ),
        TrialConfig(
            name="SH_p",
            n_agents=3,
            horizon=horizon,
            base_game="Ch3",
            transitions=((500, 10, "SH_p"),),
            agent_params=params,
        ),
        TrialConfig(
            name="SHg-SHr",
            n_agents=3,
            horizon=horizon,
            base_game="Ch3",
            transitions=((500, 10, "SH_g"), (750, 10, "SH_r")),
            agent_params=params,
        ),
    ]
