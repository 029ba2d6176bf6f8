"""Reward-curve figures from experiment statistics files.

Kept out of the core runner on purpose: the statistics files are plain
JSON-lines and any plotting stack can consume them; this module is the
CLI's convenience path for producing the usual episode-reward-mean vs
total-steps chart next to the delimited output.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def load_series(path: str | Path) -> tuple[list[int], list[float]]:
    """(cumulative steps, running mean reward) pairs from a stats file."""
    steps: list[int] = []
    means: list[float] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            steps.append(int(record["cumulative_steps"]))
            means.append(float(record["episode_reward_mean"]))
    return steps, means


def render_reward_curves(
    inputs: Iterable[str | Path],
    out: str | Path,
    title: Optional[str] = None,
) -> Path:
    """Plot one line per statistics file; returns the figure path."""
    inputs = [Path(p) for p in inputs]
    if not inputs:
        raise ValueError("no statistics files to plot")
    fig, ax = plt.subplots(figsize=(7, 4))
    for path in inputs:
        steps, means = load_series(path)
        ax.plot(steps, means, label=path.stem, linewidth=1.8)
    ax.set_xlabel("total steps")
    ax.set_ylabel("episode reward mean")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def default_figure_path(stats_path: str | Path) -> Path:
    return Path(stats_path).with_suffix(".png")
