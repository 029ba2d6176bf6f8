"""The episode runner and experiment driver.

Experiments write one JSON record per episode. Wall-clock timings stay in
the in-memory records only: the statistics file must be byte-identical
across runs with the same seed, and timings never are.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .agents import MaskedRandomAgent, ThompsonAgent, UniformArmAgent
from .env import EnvConfig, InvalidActionError, SaturationEnv
from .wrappers import BanditActionWrapper, NoSelectableClauseError, StepLimitWrapper

AGENTS = ("random", "thompson")
WRAPPERS = ("none", "bandit")
BACKENDS = ("embedded", "stdio", "relay")

# per-episode seed derivation from the master seed; documented so runs can
# be reproduced piecemeal
SEED_STRIDE = 1_000_003


class ConfigError(ValueError):
    pass


@dataclass
class EpisodeRecord:
    episode: int
    steps: int
    reward: float
    end_cause: str
    arm_counts: Optional[dict[int, int]]
    wall_time: float

    def __post_init__(self):
        if self.end_cause == "terminated-refutation" and self.reward != 1.0:
            raise ValueError("refutation episodes must carry reward 1.0")
        if self.end_cause != "terminated-refutation" and self.reward == 1.0:
            raise ValueError("reward 1.0 implies a refutation end cause")


def episode_seed(master_seed: int, episode: int) -> int:
    return (master_seed * SEED_STRIDE + episode) % 2**31


def run_episode(env, agent, seed: int, episode: int = 0) -> EpisodeRecord:
    """Drive one reset-to-end episode, feeding the terminal reward back to
    the agent. Identical (seed, agent state) pairs on the embedded backend
    yield identical records apart from wall time."""
    rng = np.random.default_rng(seed)
    started = time.perf_counter()
    observation, _ = env.reset(seed=seed)
    agent.begin_episode(observation, rng)

    counts_arms = agent.action_kind == "arm"
    arm_counts: dict[int, int] = {}
    steps = 0
    reward = 0.0
    end_cause = "terminated-exhausted"
    while True:
        action = agent.act(observation)
        try:
            outcome = env.step(action)
        except (InvalidActionError, NoSelectableClauseError) as exc:
            end_cause = f"aborted-invalid-action: {exc}"
            reward = 0.0
            break
        steps += 1
        if counts_arms:
            arm_counts[int(action)] = arm_counts.get(int(action), 0) + 1
        observation = outcome.observation
        reward = outcome.reward
        if outcome.terminated:
            end_cause = (
                "terminated-refutation" if reward == 1.0 else "terminated-exhausted"
            )
            break
        if outcome.truncated:
            cause = getattr(env, "truncation_cause", None) or "clauses"
            end_cause = f"truncated-{cause}"
            reward = 0.0
            break
    agent.learn(reward)
    return EpisodeRecord(
        episode=episode,
        steps=steps,
        reward=reward,
        end_cause=end_cause,
        arm_counts=arm_counts if counts_arms else None,
        wall_time=time.perf_counter() - started,
    )


@dataclass
class ExperimentConfig:
    agent: str = "random"
    backend: str = "embedded"
    problem: Optional[str] = None
    max_clauses: int = 1000
    episodes: int = 100
    seed: int = 0
    wrapper: str = "none"
    step_limit: Optional[int] = None
    out: Optional[str] = None
    backend_factory: Optional[Callable] = None  # overrides `backend` when set

    def validate(self) -> None:
        if self.agent not in AGENTS:
            raise ConfigError(f"unknown agent {self.agent!r}; expected one of {AGENTS}")
        if self.wrapper not in WRAPPERS:
            raise ConfigError(
                f"unknown wrapper {self.wrapper!r}; expected one of {WRAPPERS}"
            )
        if self.backend not in BACKENDS:
            raise ConfigError(
                f"unknown backend {self.backend!r}; expected one of {BACKENDS}"
            )
        if self.agent == "thompson" and self.wrapper != "bandit":
            raise ConfigError("the thompson agent requires the bandit wrapper")
        if self.episodes < 0:
            raise ConfigError("episode count cannot be negative")
        if self.max_clauses <= 0:
            raise ConfigError("max_clauses must be positive")
        if self.backend in ("stdio", "relay") and self.backend_factory is None:
            raise ConfigError(
                f"backend {self.backend!r} needs an adapter configuration"
            )


def build_env(config: ExperimentConfig):
    backend = config.backend_factory if config.backend_factory else "embedded"
    env = SaturationEnv(
        EnvConfig(
            max_clauses=config.max_clauses,
            problem_path=config.problem,
            backend=backend,
        )
    )
    if config.wrapper == "bandit":
        env = BanditActionWrapper(env)
    if config.step_limit:
        env = StepLimitWrapper(env, limit=config.step_limit)
    return env


def build_agent(config: ExperimentConfig):
    if config.agent == "thompson":
        return ThompsonAgent()
    if config.wrapper == "bandit":
        return UniformArmAgent()
    return MaskedRandomAgent()


@dataclass
class ExperimentResult:
    records: list[EpisodeRecord] = field(default_factory=list)
    out_path: Optional[Path] = None

    @property
    def mean_reward(self) -> float:
        if not self.records:
            return 0.0
        return sum(r.reward for r in self.records) / len(self.records)

    def mean_reward_last(self, n: int) -> float:
        tail = self.records[-n:]
        if not tail:
            return 0.0
        return sum(r.reward for r in tail) / len(tail)


def record_line(record: EpisodeRecord, cumulative_steps: int, reward_mean: float) -> str:
    payload = {
        "episode": record.episode,
        "steps": record.steps,
        "reward": record.reward,
        "end_cause": record.end_cause,
        "arm_counts": (
            {str(k): v for k, v in sorted(record.arm_counts.items())}
            if record.arm_counts is not None
            else None
        ),
        "cumulative_steps": cumulative_steps,
        "episode_reward_mean": round(reward_mean, 10),
    }
    return json.dumps(payload, sort_keys=True)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the configured number of episodes and write the statistics file.

    Each output line is one episode record plus the running mean reward
    keyed by cumulative step count, ready for a reward-curve plot.
    """
    config.validate()
    env = build_env(config)
    agent = build_agent(config)
    result = ExperimentResult()
    lines = []
    cumulative_steps = 0
    reward_sum = 0.0
    try:
        for episode in range(config.episodes):
            record = run_episode(
                env, agent, seed=episode_seed(config.seed, episode), episode=episode
            )
            result.records.append(record)
            cumulative_steps += record.steps
            reward_sum += record.reward
            lines.append(
                record_line(record, cumulative_steps, reward_sum / (episode + 1))
            )
    finally:
        env.close()
    if config.out is not None:
        out_path = Path(config.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        text = "".join(line + "\n" for line in lines)
        out_path.write_text(text, encoding="utf-8")
        result.out_path = out_path
    return result
