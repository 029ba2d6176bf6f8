"""Environment conformance checks.

With gymnasium installed, ``check_env`` defers to the ecosystem's own
checker. Without it, the fallback applies the same documented contract:
declared spaces, reset/step signatures and return shapes, observation
containment, seeded-reset determinism, mask-aware sampling soundness and
render-mode behaviour.
"""

from __future__ import annotations

import numpy as np

from .spaces import HAS_GYMNASIUM


class ConformanceError(AssertionError):
    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConformanceError(message)


def _equal_observations(a, b) -> bool:
    return a["real_obs"] == b["real_obs"] and np.array_equal(
        a["action_mask"], b["action_mask"]
    )


def check_env(env, episodes: int = 2, max_steps: int = 200) -> None:
    """Raise ConformanceError on the first contract violation."""
    if HAS_GYMNASIUM:
        from gymnasium.utils.env_checker import check_env as gym_check

        gym_check(env, skip_render_check=False)
        return

    _require(hasattr(env, "action_space"), "env must declare an action_space")
    _require(hasattr(env, "observation_space"), "env must declare an observation_space")
    modes = env.metadata.get("render_modes")
    _require(isinstance(modes, (list, tuple)) and modes, "metadata must list render modes")

    result = env.reset(seed=7)
    _require(
        isinstance(result, tuple) and len(result) == 2,
        "reset must return (observation, info)",
    )
    observation, info = result
    _require(isinstance(info, dict), "reset info must be a dict")
    _require(
        env.observation_space.contains(observation),
        "reset observation must lie in the observation space",
    )
    again, _ = env.reset(seed=7)
    _require(
        _equal_observations(observation, again),
        "identical seeds must reproduce the reset observation",
    )

    text = env.render(mode="ansi")
    _require(isinstance(text, str) and text, "ansi render must return text")

    for episode in range(episodes):
        observation, info = env.reset(seed=episode)
        for _ in range(max_steps):
            mask = observation["action_mask"]
            if not mask.any():
                break
            action = env.action_space.sample(mask=mask)
            _require(
                env.action_space.contains(action),
                "sampled action must lie in the action space",
            )
            result = env.step(action)
            _require(
                isinstance(result, tuple) and len(result) == 5,
                "step must return a 5-tuple",
            )
            observation, reward, terminated, truncated, info = result
            _require(
                env.observation_space.contains(observation),
                "step observation must lie in the observation space",
            )
            _require(isinstance(reward, float), "reward must be a float")
            _require(isinstance(terminated, bool), "terminated must be a bool")
            _require(isinstance(truncated, bool), "truncated must be a bool")
            _require(isinstance(info, dict), "info must be a dict")
            if terminated or truncated:
                break
