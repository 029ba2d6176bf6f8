"""Environment wrappers.

* BanditActionWrapper folds the clause-index action space down to two
  priority queues (0 = oldest clause, 1 = lightest clause), turning the
  environment into a 2-armed bandit.
* StepLimitWrapper truncates episodes after a fixed number of steps.
* FeatureObservationWrapper / EmbeddingObservationWrapper turn the clause
  sequence into a fixed-shape numeric matrix, via hand-coded features or
  an external embedding service.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .clauses import Clause, clause_weight
from .env import Observation, StepOutcome

FEATURE_DIMENSION = 9
_ROLE_SLOTS = {"axiom": 0, "input": 0, "hypothesis": 1, "negated_conjecture": 2}


class NoSelectableClauseError(RuntimeError):
    pass


@dataclass(eq=False)
class NumericObservation:
    """Fixed-shape stand-in for Observation: one row per clause slot."""

    matrix: np.ndarray
    action_mask: np.ndarray

    def __getitem__(self, key: str):
        if key == "matrix":
            return self.matrix
        if key == "action_mask":
            return self.action_mask
        raise KeyError(key)


def bandit_map_action(observation: Observation, arm: int) -> int:
    """Map a queue number to a clause index.

    Arm 0 picks the selectable clause minimizing (birth_step, index);
    arm 1 the one minimizing (clause_weight, index). Ties break toward
    the lowest index, so the choice is deterministic.
    """
    if arm not in (0, 1):
        raise ValueError(f"arm must be 0 or 1, got {arm!r}")
    mask = observation.action_mask
    live = [i for i in np.flatnonzero(mask > 0) if i < len(observation.real_obs)]
    if not live:
        raise NoSelectableClauseError("no selectable clause to map the arm onto")
    if arm == 0:
        key = lambda i: (observation.real_obs[i].birth_step, i)
    else:
        key = lambda i: (clause_weight(observation.real_obs[i]), i)
    return min(live, key=key)


class EnvWrapper:
    def __init__(self, env):
        self.env = env

    def __getattr__(self, name):
        return getattr(self.env, name)

    def reset(self, seed=None):
        return self.env.reset(seed=seed)

    def step(self, action):
        return self.env.step(action)

    def render(self, mode="human"):
        return self.env.render(mode=mode)

    def set_task(self, problem_path):
        return self.env.set_task(problem_path)

    def close(self):
        return self.env.close()


class BanditActionWrapper(EnvWrapper):
    """Actions become queue arms; the chosen arm's head clause is selected.

    The selected index always carries mask value 1, so the wrapper never
    trips the core's invalid-action error.
    """

    def __init__(self, env):
        super().__init__(env)
        self._last_observation: Optional[Observation] = None

    def reset(self, seed=None):
        observation, info = self.env.reset(seed=seed)
        self._last_observation = observation
        return observation, info

    def step(self, action):
        if self._last_observation is None:
            raise RuntimeError("step() before reset()")
        index = bandit_map_action(self._last_observation, int(action))
        outcome = self.env.step(index)
        self._last_observation = outcome.observation
        return outcome


class StepLimitWrapper(EnvWrapper):
    """Truncate the episode once a step budget is spent.

    Termination on the final step wins over truncation, so a refutation
    at exactly the limit still pays its reward as a terminal state.
    """

    def __init__(self, env, limit: int):
        if limit <= 0:
            raise ValueError("step limit must be positive")
        super().__init__(env)
        self.limit = limit
        self._elapsed = 0
        self._cause: Optional[str] = None

    @property
    def truncation_cause(self) -> Optional[str]:
        return self._cause or self.env.truncation_cause

    def reset(self, seed=None):
        self._elapsed = 0
        self._cause = None
        return self.env.reset(seed=seed)

    def step(self, action):
        outcome = self.env.step(action)
        self._elapsed += 1
        if (
            not outcome.terminated
            and not outcome.truncated
            and self._elapsed >= self.limit
        ):
            self._cause = "steps"
            return StepOutcome(
                observation=outcome.observation,
                reward=outcome.reward,
                terminated=False,
                truncated=True,
                info=outcome.info,
            )
        return outcome


def extract_features(clause: Clause, step_count: int) -> np.ndarray:
    """Hand-coded 9-dimensional clause features.

    [age, weight, literal count, negative literals, equality literals,
    role one-hot over {axiom/input, hypothesis, negated_conjecture, other}]
    """
    lits = clause.parsed_literals
    role_onehot = [0.0, 0.0, 0.0, 0.0]
    role_onehot[_ROLE_SLOTS.get(clause.role, 3)] = 1.0
    return np.array(
        [
            float(step_count - clause.birth_step),
            float(clause_weight(clause)),
            float(len(lits)),
            float(sum(1 for lit in lits if lit.negated)),
            float(sum(1 for lit in lits if lit.atom.is_equality)),
            *role_onehot,
        ],
        dtype=np.float32,
    )


def embed_observation(
    observation: Observation,
    embedder: Callable[[str], "np.ndarray | list[float]"],
    dimension: int,
    cache: Optional[dict] = None,
) -> NumericObservation:
    """Embed every live clause (selected and redundant ones included) into
    a max_clauses x d matrix; rows past the live count stay zero."""
    if not observation.real_obs:
        raise ValueError("cannot embed an empty proof state")
    rows = len(observation.action_mask)
    matrix = np.zeros((rows, dimension), dtype=np.float32)
    for i, clause in enumerate(observation.real_obs[:rows]):
        key = clause.literals
        if cache is not None and key in cache:
            vector = cache[key]
        else:
            try:
                vector = np.asarray(embedder(key), dtype=np.float32)
            except Exception as exc:
                raise RuntimeError(
                    f"embedding failed for clause {clause.label!r} ({key!r}): {exc}"
                ) from exc
            if vector.shape != (dimension,):
                raise ValueError(
                    f"embedder returned shape {vector.shape}, expected ({dimension},)"
                )
            if cache is not None:
                cache[key] = vector
        matrix[i] = vector
    return NumericObservation(matrix=matrix, action_mask=observation.action_mask)


class EmbeddingObservationWrapper(EnvWrapper):
    """Observations become embedding matrices; actions pass through.

    Embeddings are cached per clause text for the episode, so clauses that
    persist across steps are embedded once.
    """

    def __init__(self, env, embedder: Callable[[str], "np.ndarray | list[float]"],
                 dimension: int = 256):
        super().__init__(env)
        self.embedder = embedder
        self.dimension = dimension
        self._cache: dict = {}

    def reset(self, seed=None):
        self._cache.clear()
        observation, info = self.env.reset(seed=seed)
        return self._convert(observation), info

    def step(self, action):
        outcome = self.env.step(action)
        return StepOutcome(
            observation=self._convert(outcome.observation),
            reward=outcome.reward,
            terminated=outcome.terminated,
            truncated=outcome.truncated,
            info=outcome.info,
        )

    def _convert(self, observation: Observation) -> NumericObservation:
        return embed_observation(
            observation, self.embedder, self.dimension, cache=self._cache
        )


class FeatureObservationWrapper(EnvWrapper):
    """Observations become matrices of hand-coded clause features."""

    dimension = FEATURE_DIMENSION

    def reset(self, seed=None):
        observation, info = self.env.reset(seed=seed)
        return self._convert(observation), info

    def step(self, action):
        outcome = self.env.step(action)
        return StepOutcome(
            observation=self._convert(outcome.observation),
            reward=outcome.reward,
            terminated=outcome.terminated,
            truncated=outcome.truncated,
            info=outcome.info,
        )

    def _convert(self, observation: Observation) -> NumericObservation:
        rows = len(observation.action_mask)
        step_count = self.env.state.step_count
        matrix = np.zeros((rows, FEATURE_DIMENSION), dtype=np.float32)
        for i, clause in enumerate(observation.real_obs[:rows]):
            matrix[i] = extract_features(clause, step_count)
        return NumericObservation(matrix=matrix, action_mask=observation.action_mask)
