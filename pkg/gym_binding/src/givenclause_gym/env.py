"""The bound environment: a standard RL environment object whose reset,
step, render, set_task and close calls each travel to a child env-server
process and come back as native types."""

from __future__ import annotations

from typing import Any, Optional

import numpy as np

from .spaces import HAS_GYMNASIUM, MaskedDiscrete, ObservationDict
from .transport import EnvServerProcess, default_server_command

if HAS_GYMNASIUM:
    import gymnasium

    _ENV_BASE = gymnasium.Env
else:
    _ENV_BASE = object


class BoundSaturationEnv(_ENV_BASE):
    """Clause-selection proving as an RL environment over a child process.

    Observations are dictionaries with ``real_obs`` (a tuple of clauses in
    TPTP text) and ``action_mask`` (a float array of length max_clauses
    with 1.0 at selectable indices). The action is a clause index; masked
    actions raise. The reward is 1.0 exactly on the refuting step.
    """

    metadata = {"render_modes": ["human", "ansi"]}

    def __init__(
        self,
        max_clauses: int = 1000,
        problem_path: Optional[str] = None,
        render_mode: Optional[str] = None,
        server_command: Optional[list[str]] = None,
        server_args: Optional[list[str]] = None,
    ):
        if render_mode is not None and render_mode not in self.metadata["render_modes"]:
            raise ValueError(f"unsupported render_mode {render_mode!r}")
        self.render_mode = render_mode
        self.max_clauses = int(max_clauses)
        self._server = EnvServerProcess(
            command=server_command or default_server_command(),
            extra_args=server_args,
        )
        config: dict[str, Any] = {"max_clauses": self.max_clauses}
        if problem_path is not None:
            config["problem_path"] = str(problem_path)
        self._server.call(cmd="make", config=config)
        self.action_space = MaskedDiscrete(self.max_clauses)
        self.observation_space = ObservationDict(self.max_clauses)

    @staticmethod
    def _decode_observation(payload: dict) -> dict:
        return {
            "real_obs": tuple(payload["real_obs"]),
            "action_mask": np.asarray(payload["action_mask"], dtype=np.float32),
        }

    def set_task(self, problem_path: str) -> None:
        self._server.call(cmd="set_task", path=str(problem_path))

    def reset(self, *, seed: Optional[int] = None, options: Optional[dict] = None):
        if HAS_GYMNASIUM:
            super().reset(seed=seed)
        if seed is not None:
            self.action_space.seed(seed)
        result = self._server.call(cmd="reset", seed=seed)
        return self._decode_observation(result["observation"]), result["info"]

    def step(self, action):
        result = self._server.call(cmd="step", action=int(action))
        return (
            self._decode_observation(result["observation"]),
            float(result["reward"]),
            bool(result["terminated"]),
            bool(result["truncated"]),
            result["info"],
        )

    def render(self, mode: Optional[str] = None):
        chosen = mode or self.render_mode or "human"
        text = self._server.call(cmd="render", mode="ansi")["text"]
        if chosen == "ansi":
            return text
        print(text)
        return None

    def close(self) -> None:
        try:
            self._server.call(cmd="close")
        except Exception:
            pass  # reaping below still runs if the server already died
        self._server.close()
