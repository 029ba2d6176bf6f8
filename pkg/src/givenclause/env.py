"""The clause-selection environment.

One episode is one proof attempt: reset() restarts the backend prover on
the configured problem, each step() hands it the chosen given clause, and
the episode ends when the empty clause appears (terminated, reward 1.0),
when no selectable clause remains (terminated, reward 0.0), or when the
proof state outgrows the clause budget (truncated).
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .backend import Backend, BackendStartupError, ProverStatus
from .clauses import Clause, render_clause
from .prover import EmbeddedProver
from .tptp import read_problem

DEFAULT_MAX_CLAUSES = 1000
DEFAULT_PROBLEM = "group_idempotent.p"

RENDER_MODES = ("human", "ansi")


class InvalidActionError(ValueError):
    """The chosen index is masked off or out of range."""


class EpisodeFinishedError(RuntimeError):
    """step() was called after the episode terminated or was truncated."""


def default_problem_path(name: str = DEFAULT_PROBLEM) -> Path:
    """Filesystem path of a bundled problem."""
    resource = importlib.resources.files("givenclause").joinpath("problems").joinpath(name)
    return Path(str(resource))


def bundled_problems() -> list[str]:
    root = importlib.resources.files("givenclause").joinpath("problems")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".p"))


@dataclass
class EnvConfig:
    max_clauses: int = DEFAULT_MAX_CLAUSES
    backend: Union[str, Callable[[], Backend]] = "embedded"
    problem_path: Optional[str] = None
    verbose_render: bool = True

    def __post_init__(self):
        if self.max_clauses <= 0:
            raise ValueError("max_clauses must be positive")


@dataclass(eq=False)
class Observation:
    """``real_obs`` is every clause seen so far, processed or not;
    ``action_mask[i]`` is 1.0 iff clause i can still be the given clause."""

    real_obs: tuple[Clause, ...]
    action_mask: np.ndarray

    def __getitem__(self, key: str):
        if key == "real_obs":
            return self.real_obs
        if key == "action_mask":
            return self.action_mask
        raise KeyError(key)


@dataclass(eq=False)
class StepOutcome:
    observation: Observation
    reward: float
    terminated: bool
    truncated: bool
    info: dict

    def __iter__(self):
        # Allows: observation, reward, terminated, truncated, info = env.step(a)
        return iter(
            (self.observation, self.reward, self.terminated, self.truncated, self.info)
        )


@dataclass
class ProofState:
    clauses: list[Clause] = field(default_factory=list)
    selectable: list[bool] = field(default_factory=list)
    step_count: int = 0


def _make_backend(spec: Union[str, Callable[[], Backend]]) -> tuple[str, Backend]:
    if callable(spec):
        backend = spec()
        return type(backend).__name__, backend
    if spec == "embedded":
        return "embedded", EmbeddedProver()
    raise ValueError(f"unknown backend {spec!r}")


class SaturationEnv:
    def __init__(self, config: Optional[EnvConfig] = None, **kwargs):
        self.config = config or EnvConfig(**kwargs)
        if self.config.problem_path is not None:
            self._task = read_problem(self.config.problem_path)
            self._task_path = str(self.config.problem_path)
        else:
            self._task_path = str(default_problem_path())
            self._task = read_problem(self._task_path)
        self.state: Optional[ProofState] = None
        self._backend: Optional[Backend] = None
        self._label_to_index: dict[str, int] = {}
        self._episode_over = False
        self._has_empty = False
        self._truncation_cause: Optional[str] = None
        self._seed: Optional[int] = None

    @property
    def max_clauses(self) -> int:
        return self.config.max_clauses

    @property
    def task_path(self) -> str:
        return self._task_path

    @property
    def seed(self) -> Optional[int]:
        """Stored for agents; the core loop itself consumes no randomness."""
        return self._seed

    @property
    def truncation_cause(self) -> Optional[str]:
        return self._truncation_cause

    def set_task(self, problem_path: str) -> None:
        """Switch the problem used by subsequent resets.

        Missing files and parse failures surface here, leaving the
        environment unchanged.
        """
        clauses = read_problem(problem_path)
        self._task = clauses
        self._task_path = str(problem_path)

    def reset(self, seed: Optional[int] = None) -> tuple[Observation, dict]:
        if seed is not None:
            self._seed = seed
        if self._backend is not None:
            self._backend.close()
        name, backend = _make_backend(self.config.backend)
        try:
            initial = backend.start(list(self._task))
        except Exception as exc:
            raise BackendStartupError(f"backend {name!r} failed to start: {exc}") from exc
        if len(initial) > self.config.max_clauses:
            raise ValueError(
                f"problem has {len(initial)} input clauses, above the "
                f"max_clauses budget of {self.config.max_clauses}"
            )
        self._backend = backend
        self.state = ProofState(
            clauses=list(initial),
            selectable=[True] * len(initial),
            step_count=0,
        )
        self._label_to_index = {c.label: i for i, c in enumerate(initial)}
        self._episode_over = False
        self._has_empty = any(c.is_empty for c in initial)
        self._truncation_cause = None
        return self._observation(), {}

    def _observation(self) -> Observation:
        assert self.state is not None
        mask = np.zeros(self.config.max_clauses, dtype=np.float32)
        if not self._episode_over:
            limit = min(len(self.state.clauses), self.config.max_clauses)
            for i in range(limit):
                if self.state.selectable[i]:
                    mask[i] = 1.0
        return Observation(real_obs=tuple(self.state.clauses), action_mask=mask)

    def _available(self) -> bool:
        assert self.state is not None
        limit = min(len(self.state.clauses), self.config.max_clauses)
        return any(self.state.selectable[:limit])

    def step(self, action: int) -> StepOutcome:
        if self.state is None:
            raise RuntimeError("step() before reset()")
        if self._episode_over:
            raise EpisodeFinishedError("episode already finished; call reset()")
        action = int(action)
        if not 0 <= action < self.config.max_clauses:
            raise InvalidActionError(f"action {action} outside the action space")
        if action >= len(self.state.clauses) or not self.state.selectable[action]:
            raise InvalidActionError(f"clause {action} cannot be a given clause now")

        state = self.state
        state.step_count += 1
        given_label = state.clauses[action].label
        result = self._backend.select(given_label)

        empty_this_step = False
        for clause in result.new_clauses:
            stamped = clause.with_birth_step(state.step_count)
            self._label_to_index[stamped.label] = len(state.clauses)
            state.clauses.append(stamped)
            state.selectable.append(True)
            if stamped.is_empty:
                empty_this_step = True
        state.selectable[action] = False
        for label in result.eliminated_labels:
            index = self._label_to_index.get(label)
            if index is None:
                raise RuntimeError(f"backend eliminated unknown label {label!r}")
            state.selectable[index] = False

        if empty_this_step:
            self._has_empty = True
        refuted = empty_this_step or result.status is ProverStatus.REFUTATION
        reward = 1.0 if refuted else 0.0
        terminated = (
            self._has_empty
            or result.status in (ProverStatus.REFUTATION, ProverStatus.SATURATED)
            or not self._available()
        )
        truncated = False
        if not terminated and len(state.clauses) > self.config.max_clauses:
            truncated = True
            self._truncation_cause = "clauses"
        if terminated or truncated:
            self._episode_over = True
        return StepOutcome(
            observation=self._observation(),
            reward=reward,
            terminated=terminated,
            truncated=truncated,
            info={},
        )

    def render(self, mode: str = "human") -> Optional[str]:
        if mode not in RENDER_MODES:
            raise ValueError(f"unknown render mode {mode!r}; expected one of {RENDER_MODES}")
        if self.state is None:
            raise RuntimeError("render() before reset()")
        text = "\n".join(
            render_clause(c, verbose=self.config.verbose_render)
            for c in self.state.clauses
        )
        if mode == "ansi":
            return text
        print(text)
        return None

    def close(self) -> None:
        if self._backend is not None:
            self._backend.close()
            self._backend = None
