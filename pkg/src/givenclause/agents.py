"""Agents: masked-random clause selection and Beta-Bernoulli Thompson
sampling over the two-queue bandit arms.

An agent commits to its decision context at episode start (one bandit
round per proof attempt) and receives the episode's terminal reward once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ThompsonState:
    """Beta posterior parameters per arm; alpha_k - 1 wins, beta_k - 1 losses."""

    alpha: tuple[float, ...] = (1.0, 1.0)
    beta: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta must cover the same arms")
        if any(a < 1 for a in self.alpha) or any(b < 1 for b in self.beta):
            raise ValueError("Beta parameters start at 1")

    @property
    def arms(self) -> int:
        return len(self.alpha)


def thompson_act(state: ThompsonState, rng: np.random.Generator) -> int:
    """Sample theta_k ~ Beta(alpha_k, beta_k) per arm and play the argmax."""
    draws = [rng.beta(a, b) for a, b in zip(state.alpha, state.beta)]
    return int(np.argmax(draws))

def thompson_update(state: ThompsonState, arm: int, reward: float) -> ThompsonState:
    """Conjugate update of the played arm from a Bernoulli reward."""
    if reward not in (0.0, 1.0):
        raise ValueError(f"reward must be 0.0 or 1.0, got {reward!r}")
    if not 0 <= arm < state.arms:
        raise ValueError(f"no arm {arm}")
    alpha = list(state.alpha)
    beta = list(state.beta)
    alpha[arm] += reward
    beta[arm] += 1.0 - reward
    return ThompsonState(alpha=tuple(alpha), beta=tuple(beta))


class MaskedRandomAgent:
    """Uniform choice among currently selectable clause indices."""

    action_kind = "clause-index"

    def __init__(self):
        self._rng: np.random.Generator | None = None

    def begin_episode(self, observation, rng: np.random.Generator) -> None:
        self._rng = rng

    def act(self, observation) -> int:
        live = np.flatnonzero(observation.action_mask > 0)
        if live.size == 0:
            raise RuntimeError("no selectable clause to sample")
        return int(self._rng.choice(live))

    def learn(self, reward: float) -> None:
        pass


class UniformArmAgent:
    """Baseline bandit player: one uniformly random arm per episode."""

    action_kind = "arm"

    def __init__(self, arms: int = 2):
        self.arms = arms
        self._arm = 0

    def begin_episode(self, observation, rng: np.random.Generator) -> None:
        self._arm = int(rng.integers(self.arms))

    def act(self, observation) -> int:
        return self._arm

    def learn(self, reward: float) -> None:
        pass


class ThompsonAgent:
    """Thompson sampling: draw an arm from the posterior each episode,
    play it throughout, update it with the terminal reward."""

    action_kind = "arm"

    def __init__(self):
        self.state = ThompsonState()
        self._arm = 0

    def begin_episode(self, observation, rng: np.random.Generator) -> None:
        self._arm = thompson_act(self.state, rng)

    def act(self, observation) -> int:
        return self._arm

    def learn(self, reward: float) -> None:
        self.state = thompson_update(self.state, self._arm, reward)
