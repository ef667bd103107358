"""Figure rendering for tracking traces and distance reports.

Uses the object-oriented matplotlib API (no pyplot, no global state) so
figures render headlessly and the CLI can write PNGs next to its CSV output.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from matplotlib.figure import Figure

from .evaluate import EvalReport
from .profiles import GenreVocabulary


def top_genre_indices(actuals: np.ndarray, count: int) -> list[int]:
    """Indices of the genres with the largest total observed interest."""
    totals = np.asarray(actuals, dtype=float).sum(axis=0)
    order = np.argsort(-totals, kind="stable")
    return [int(i) for i in order[: max(1, count)]]


def trace_figure(
    vocab: GenreVocabulary,
    actuals,
    predictions,
    genre_indices: Sequence[int],
    title: str = "",
) -> Figure:
    """Actual-vs-predicted interest lines, one panel per selected genre.

    ``actuals`` and ``predictions`` are aligned (n x d) arrays covering the
    instants after the first (the instants that have predictions).
    """
    actuals = np.asarray(actuals, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    steps = np.arange(1, actuals.shape[0] + 1)
    n_panels = len(genre_indices)
    fig = Figure(figsize=(8.0, 2.2 * n_panels), constrained_layout=True)
    axes = fig.subplots(n_panels, 1, sharex=True, squeeze=False)[:, 0]
    for ax, g in zip(axes, genre_indices):
        ax.plot(steps, actuals[:, g], color="tab:blue", marker=".", label="observed")
        ax.plot(steps, predictions[:, g], color="tab:green", linestyle="--",
                marker=".", label="predicted")
        ax.set_ylabel(vocab.names[g], fontsize=9)
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("window")
    if title:
        fig.suptitle(title)
    return fig


def distance_figure(rep: EvalReport, title: str = "") -> Figure:
    """Cosine distance per instant with the quality threshold marked."""
    fig = Figure(figsize=(8.0, 3.2), constrained_layout=True)
    ax = fig.subplots()
    if rep.per_instant:
        steps = np.arange(1, len(rep.per_instant) + 1)
        distances = [d for _, d in rep.per_instant]
        ax.plot(steps, distances, color="tab:blue", marker=".")
    ax.axhline(rep.threshold, color="tab:red", linestyle="--",
               label=f"threshold {rep.threshold:g}")
    ax.set_xlabel("window")
    ax.set_ylabel("cosine distance")
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right", fontsize=8)
    if title:
        fig.suptitle(f"{title} (fraction below threshold: {rep.fraction_below:.2f})")
    return fig


def save_figure(fig: Figure, path) -> None:
    fig.savefig(path, dpi=130)
