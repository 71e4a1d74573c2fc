"""Canonical normal-form games, preference tensors, and scheduled game transitions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

COOPERATE = 0
DEFECT = 1

ACTION_LABELS = ("cooperate", "defect")


@dataclass(frozen=True)
class ActionSpace:
    """Ordered action labels; index 0 is cooperate, index 1 is defect."""

    labels: tuple = ACTION_LABELS

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("action space needs at least 2 actions")

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class PayoffTensor:
    """Ego's payoffs over joint action profiles.

    Axis 0 is ego's action; subsequent axes are the alters in ascending
    agent-index order.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        n = vals.shape[0]
        if any(d != n for d in vals.shape):
            raise ValueError(f"payoff tensor must be square in every axis, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("payoff entries must be finite")

    @property
    def n_players(self) -> int:
        return self.values.ndim

    @property
    def n_actions(self) -> int:
        return self.values.shape[0]

    def lookup(self, *profile: int) -> float:
        """Payoff for a joint action profile (ego first)."""
        return float(self.values[tuple(profile)])


@dataclass(frozen=True)
class GameSpec:
    name: str
    payoffs: PayoffTensor


@dataclass(frozen=True)
class PreferenceTensor:
    """Joint preference distribution over outcomes; same shape as the payoffs."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("preference tensor must sum to 1")
        if not np.all(probs > 0):
            raise ValueError("preference entries must be strictly positive")


# 2-player payoff matrices, rows = ego action (c, d), columns = alter action.
_TWO_PLAYER = {
    "PD": [[3, 1], [4, 2]],
    "Ch": [[2, 3], [4, 1]],
    "SH": [[4, 1], [3, 2]],
}

# 3-player Stag Hunt variants with R, T, P, S = 4, 3, 2, 1 and the
# 3-player Chicken with T, R, S, P = 4, 3, 2, 1 (same structural form
# as SH_r). Axis order: ego, alter 1, alter 2.
_THREE_PLAYER = {
    # SH_g: two cooperators suffice to hunt the stag.
    "SH_g": [[[4, 4], [4, 1]], [[3, 2], [2, 2]]],
    # SH_r: all three are required.
    "SH_r": [[[4, 1], [1, 1]], [[3, 2], [2, 2]]],
    # SH_p: all three required and the temptation lowered to T = P.
    "SH_p": [[[4, 1], [1, 1]], [[2, 2], [2, 2]]],
    "Ch3": [[[3, 2], [2, 2]], [[4, 1], [1, 1]]],
}

_ORDERINGS = {
    # Ordering predicates on (R, S, T, P) read from the 2x2 matrix. Chicken's
    # canonical integers put the sucker payoff above reward.
    "PD": lambda R, S, T, P: T > R > P > S,
    "Ch": lambda R, S, T, P: T > S > R > P,
    "SH": lambda R, S, T, P: R > T > P > S,
}


def build_canonical(name: str, n_players: int) -> GameSpec:
    """Build one of the canonical games with its exact integer payoffs."""
    if n_players == 2:
        table = _TWO_PLAYER.get(name)
    elif n_players == 3:
        table = _THREE_PLAYER.get(name)
    else:
        raise ValueError(f"unsupported player count {n_players}")
    if table is None:
        raise ValueError(f"unknown game {name!r} for {n_players} players")
    spec = GameSpec(name=name, payoffs=PayoffTensor(np.array(table, dtype=float)))
    if name in _ORDERINGS:
        (R, S), (T, P) = spec.payoffs.values
        assert _ORDERINGS[name](R, S, T, P), f"{name} payoff ordering violated"
    return spec


def preferences_from_payoffs(payoffs: PayoffTensor) -> PreferenceTensor:
    """Softmax of the flattened payoff tensor, reshaped back."""
    flat = payoffs.values.ravel()
    shifted = flat - flat.max()
    ex = np.exp(shifted)
    return PreferenceTensor((ex / ex.sum()).reshape(payoffs.values.shape))


@dataclass(frozen=True)
class TransitionEvent:
    """A scheduled game change, linearly interpolated over a window.

    The window is centered on ``t_x`` with duration ``T_x`` steps and is
    inclusive on both ends; odd durations round the bounds outward.
    """

    t_x: int
    T_x: int
    target: GameSpec

    def __post_init__(self):
        if self.T_x < 1:
            raise ValueError("transition duration must be positive")

    @property
    def window(self) -> tuple:
        start = math.floor(self.t_x - self.T_x / 2)
        end = math.ceil(self.t_x + self.T_x / 2)
        return start, end

    def mixing(self, t: int) -> float:
        l = (t - (self.t_x - self.T_x / 2)) / self.T_x
        return min(max(l, 0.0), 1.0)


@dataclass
class GameSchedule:
    """A base game plus ordered, non-overlapping transition events."""

    base: GameSpec
    events: list = field(default_factory=list)

    def __post_init__(self):
        self.events = sorted(self.events, key=lambda e: e.t_x)
        for a, b in zip(self.events, self.events[1:]):
            if a.window[1] >= b.window[0]:
                raise ValueError(
                    f"overlapping transition windows {a.window} and {b.window}"
                )
        shapes = {e.target.payoffs.values.shape for e in self.events}
        shapes.add(self.base.payoffs.values.shape)
        if len(shapes) > 1:
            raise ValueError("all games in a schedule must share a player count")

    def payoffs_at(self, t: int) -> np.ndarray:
        g = self.base.payoffs.values
        for event in self.events:
            start, end = event.window
            if t < start:
                break
            if t > end:
                g = event.target.payoffs.values
                continue
            l = event.mixing(t)
            return (1.0 - l) * g + l * event.target.payoffs.values
        return g

    def preference_at_time(self, t: int) -> PreferenceTensor:
        return preferences_from_payoffs(PayoffTensor(self.payoffs_at(t)))
