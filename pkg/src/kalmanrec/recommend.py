"""Macroscopic recommendations from predicted interest shifts.

The strategy compares, per genre, the predicted interest (the filter's
one-step-ahead position) against the calculated interest (the observed
profile component).  A positive difference means the user's interest in that
genre is rising, a negative one that it is falling.  Genres whose difference
clears a threshold are promoted or demoted; everything in between carries no
signal.  Recommendations stay at the genre level by design: mapping promoted
genres to concrete programs is a separate concern.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import linalg
from .profiles import GenreVocabulary

DEFAULT_TAU = 0.05


@dataclass(frozen=True)
class ConceptDelta:
    """Signed interest shift for one genre: estimated minus calculated."""

    genre: str
    calculated: float
    estimated: float
    difference: float


@dataclass(frozen=True)
class Recommendation:
    """Promoted and demoted genre lists with their difference scores.

    Promoted entries have difference >= +tau, sorted by difference
    descending; demoted entries have difference <= -tau, sorted ascending.
    Ties break by genre name.
    """

    promoted: tuple[tuple[str, float], ...]
    demoted: tuple[tuple[str, float], ...]
    threshold: float

    def to_dict(self, user_id: str, instant: float) -> dict:
        return {
            "user_id": user_id,
            "instant": instant,
            "promoted": [{"genre": g, "score": s} for g, s in self.promoted],
            "demoted": [{"genre": g, "score": s} for g, s in self.demoted],
            "threshold": self.threshold,
        }


def deltas(calculated, estimated, vocab: GenreVocabulary) -> list[ConceptDelta]:
    """Per-genre differences between estimated and calculated interest."""
    calc = linalg.as_vector(calculated)
    est = linalg.as_vector(estimated)
    if calc.shape[0] != len(vocab) or est.shape[0] != len(vocab):
        raise ValueError(
            f"vectors must have dimension {len(vocab)}, "
            f"got {calc.shape[0]} and {est.shape[0]}"
        )
    return [
        ConceptDelta(
            genre=name,
            calculated=float(calc[i]),
            estimated=float(est[i]),
            difference=float(est[i]) - float(calc[i]),
        )
        for i, name in enumerate(vocab.names)
    ]


def classify(concept_deltas: Sequence[ConceptDelta], tau: float = DEFAULT_TAU) -> Recommendation:
    """Split genres into promoted / demoted sets by thresholded difference."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    promoted = [(d.genre, d.difference) for d in concept_deltas if d.difference >= tau]
    demoted = [(d.genre, d.difference) for d in concept_deltas if d.difference <= -tau]
    promoted.sort(key=lambda item: (-item[1], item[0]))
    demoted.sort(key=lambda item: (item[1], item[0]))
    return Recommendation(
        promoted=tuple(promoted), demoted=tuple(demoted), threshold=float(tau)
    )


def refine(
    rec: Recommendation, watched_today: Iterable[str], vocab: GenreVocabulary
) -> Recommendation:
    """Drop already-watched genres from the promoted set.

    If the user was going to be steered toward genres x, y and z but has
    already watched x and y today, only z remains promoted.  The demoted set
    is left untouched.
    """
    watched = set(watched_today)
    for genre in watched:
        if genre not in vocab:
            raise KeyError(f"unknown genre: {genre!r}")
    promoted = tuple(item for item in rec.promoted if item[0] not in watched)
    return Recommendation(promoted=promoted, demoted=rec.demoted, threshold=rec.threshold)
