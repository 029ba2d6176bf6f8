"""RL-ecosystem binding for the clause-selection environment server.

Environments register under prover-named ids: ``EmbeddedProver-v0`` works
out of the box; ``Vampire-v0`` needs a ``prover_command`` pointing at a
prover with an interactive clause-selection mode; ``iProver-v0`` opens a
relay port for a client-style prover to connect to.
"""

from __future__ import annotations

from typing import Any, Optional

from .checker import ConformanceError, check_env
from .env import BoundSaturationEnv
from .spaces import HAS_GYMNASIUM
from .transport import (
    BindingError,
    EpisodeFinishedError,
    InvalidActionError,
    ServerCrashError,
    TaskError,
)

__version__ = "0.1.0"


def _embedded(**kwargs) -> BoundSaturationEnv:
    return BoundSaturationEnv(**kwargs)


def _stdio(prover_command: Optional[str] = None, **kwargs) -> BoundSaturationEnv:
    if prover_command is None:
        raise BindingError(
            "Vampire-v0 needs prover_command, e.g. "
            "make('Vampire-v0', prover_command='vampire ... {problem}')"
        )
    return BoundSaturationEnv(
        server_args=["--backend", "stdio", "--stdio-command", prover_command],
        **kwargs,
    )


def _relay(relay_port: int = 0, relay_client: str = "external",
           **kwargs) -> BoundSaturationEnv:
    return BoundSaturationEnv(
        server_args=[
            "--backend", "relay",
            "--relay-port", str(relay_port),
            "--relay-client", relay_client,
        ],
        **kwargs,
    )


REGISTRY = {
    "EmbeddedProver-v0": _embedded,
    "Vampire-v0": _stdio,
    "iProver-v0": _relay,
}


def make(env_id: str, **kwargs: Any) -> BoundSaturationEnv:
    """Instantiate a registered environment by id."""
    try:
        factory = REGISTRY[env_id]
    except KeyError:
        raise BindingError(
            f"unknown environment id {env_id!r}; known: {sorted(REGISTRY)}"
        ) from None
    return factory(**kwargs)


def register_gymnasium() -> bool:
    """Register every id with gymnasium, if it is installed."""
    if not HAS_GYMNASIUM:
        return False
    import gymnasium

    for env_id, factory in REGISTRY.items():
        if env_id not in gymnasium.registry:
            gymnasium.register(id=env_id, entry_point=factory)
    return True


__all__ = [
    "BindingError",
    "BoundSaturationEnv",
    "ConformanceError",
    "EpisodeFinishedError",
    "HAS_GYMNASIUM",
    "InvalidActionError",
    "REGISTRY",
    "ServerCrashError",
    "TaskError",
    "check_env",
    "make",
    "register_gymnasium",
    "__version__",
]

register_gymnasium()
