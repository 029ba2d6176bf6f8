"""Observation/action space declarations.

When gymnasium is installed these build on its space classes; otherwise
small structural stand-ins provide the same ``contains``/``sample``
surface, which is all the binding and its conformance checker need. The
action space's ``sample(mask=...)`` accepts the float 0.0/1.0 mask the
environment emits.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

try:
    import gymnasium

    HAS_GYMNASIUM = True
except ImportError:  # pragma: no cover - exercised where gymnasium exists
    gymnasium = None
    HAS_GYMNASIUM = False


_BASE = gymnasium.spaces.Space if HAS_GYMNASIUM else object


class MaskedDiscrete(_BASE):
    """Integer actions 0..n-1 with mask-aware uniform sampling."""

    def __init__(self, n: int, seed: Optional[int] = None):
        self.n = int(n)
        self._rng = np.random.default_rng(seed)
        if HAS_GYMNASIUM:
            super().__init__(shape=(), dtype=np.int64, seed=seed)

    def seed(self, seed: Optional[int] = None):
        self._rng = np.random.default_rng(seed)
        return [seed]

    def contains(self, x) -> bool:
        try:
            value = int(x)
        except (TypeError, ValueError):
            return False
        return 0 <= value < self.n

    def sample(self, mask: Optional[np.ndarray] = None) -> int:
        if mask is None:
            return int(self._rng.integers(self.n))
        mask = np.asarray(mask)
        if mask.shape != (self.n,):
            raise ValueError(f"mask shape {mask.shape} != ({self.n},)")
        live = np.flatnonzero(mask > 0)
        if live.size == 0:
            raise ValueError("cannot sample from an all-zero action mask")
        return int(self._rng.choice(live))


class MaskArray(_BASE):
    """Float vectors of fixed length with entries in {0.0, 1.0}."""

    def __init__(self, length: int, seed: Optional[int] = None):
        self.length = int(length)
        self._rng = np.random.default_rng(seed)
        if HAS_GYMNASIUM:
            super().__init__(shape=(self.length,), dtype=np.float32, seed=seed)

    def contains(self, x) -> bool:
        arr = np.asarray(x)
        if arr.shape != (self.length,):
            return False
        return bool(np.isin(arr, (0.0, 1.0)).all())

    def sample(self, mask=None) -> np.ndarray:
        return (self._rng.random(self.length) < 0.5).astype(np.float32)


class ClauseSequence(_BASE):
    """Variable-length tuples of TPTP clause text."""

    def __init__(self, seed: Optional[int] = None):
        if HAS_GYMNASIUM:
            super().__init__(shape=None, dtype=None, seed=seed)

    def contains(self, x) -> bool:
        return isinstance(x, tuple) and all(isinstance(item, str) for item in x)

    def sample(self, mask=None) -> tuple:
        return ("$false",)


class ObservationDict(_BASE):
    """{'real_obs': clause tuple, 'action_mask': float mask}."""

    def __init__(self, max_clauses: int, seed: Optional[int] = None):
        self.spaces = {
            "real_obs": ClauseSequence(),
            "action_mask": MaskArray(max_clauses),
        }
        if HAS_GYMNASIUM:
            super().__init__(shape=None, dtype=None, seed=seed)

    def contains(self, x) -> bool:
        if not isinstance(x, dict) or set(x) != set(self.spaces):
            return False
        return all(space.contains(x[key]) for key, space in self.spaces.items())

    def sample(self, mask=None) -> dict:
        return {key: space.sample() for key, space in self.spaces.items()}

    def __getitem__(self, key):
        return self.spaces[key]
