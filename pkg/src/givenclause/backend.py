"""The backend contract: everything the environment needs from a prover."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, runtime_checkable

from .clauses import Clause


class ProverStatus(Enum):
    RUNNING = "running"
    REFUTATION = "refutation"
    SATURATED = "saturated"


@dataclass
class SelectResult:
    """Reply to one given-clause selection."""

    new_clauses: list[Clause] = field(default_factory=list)
    eliminated_labels: list[str] = field(default_factory=list)
    status: ProverStatus = ProverStatus.RUNNING


class BackendError(RuntimeError):
    pass


class BackendStartupError(BackendError):
    pass


class UnknownClauseError(BackendError):
    pass


class ProtocolDesyncError(BackendError):
    pass


@runtime_checkable
class Backend(Protocol):
    """start() restarts the prover on a problem; select() feeds it one
    given clause and returns what it inferred. One backend serves one
    environment instance."""

    def start(self, problem: list[Clause]) -> list[Clause]:
        ...

    def select(self, label: str) -> SelectResult:
        ...

    def close(self) -> None:
        ...
