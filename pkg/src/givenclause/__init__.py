"""givenclause: reinforcement-learning environments around given-clause
saturation proving.

The environment exposes clause selection as the agent's action: reset()
starts a proof attempt, step(i) hands clause i to the prover as the given
clause, and the sparse reward pays 1.0 on the step that derives the empty
clause. Backends cover an embedded reference prover plus adapters for the
two external-prover protocols (interactive stdio and a TCP relay).
"""

from .backend import Backend, ProverStatus, SelectResult
from .clauses import (
    Clause,
    ClauseSyntaxError,
    clause_weight,
    is_tautology,
    is_variant,
    parse_clause,
    render_clause,
)
from .env import (
    EnvConfig,
    EpisodeFinishedError,
    InvalidActionError,
    Observation,
    SaturationEnv,
    StepOutcome,
    default_problem_path,
)
from .prover import EmbeddedProver
from .wrappers import (
    BanditActionWrapper,
    EmbeddingObservationWrapper,
    FeatureObservationWrapper,
    StepLimitWrapper,
    bandit_map_action,
    extract_features,
)

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "BanditActionWrapper",
    "Clause",
    "ClauseSyntaxError",
    "EmbeddedProver",
    "EmbeddingObservationWrapper",
    "EnvConfig",
    "EpisodeFinishedError",
    "FeatureObservationWrapper",
    "InvalidActionError",
    "Observation",
    "ProverStatus",
    "SaturationEnv",
    "SelectResult",
    "StepLimitWrapper",
    "StepOutcome",
    "bandit_map_action",
    "clause_weight",
    "default_problem_path",
    "extract_features",
    "is_tautology",
    "is_variant",
    "parse_clause",
    "render_clause",
    "__version__",
]
