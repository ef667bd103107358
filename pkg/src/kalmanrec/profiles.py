"""User interest profiles from viewing-event logs.

A viewing event records one user watching one program, with the program's
genre labels and the fraction of it actually watched.  Events are bucketed
into consecutive equal-duration time windows; within each window every event
credits each of its genres, and the per-window credit vector is L1-normalized
into an interest profile.  The resulting time-indexed profile sequence is the
measurement stream the tracking filter consumes.

The credit rule is a deliberately simple stand-in for whatever editorial
logic a production system would apply: a program watched (almost) entirely
counts fully, a barely-sampled program counts for nothing, and the middle
band passes the watched fraction through unchanged.  Both thresholds are
overridable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# Watched-fraction thresholds of the piecewise credit rule.
CREDIT_FULL_THRESHOLD = 0.75
CREDIT_IGNORE_THRESHOLD = 0.25


@dataclass(frozen=True)
class ViewingEvent:
    """One user x program watch record."""

    user_id: str
    timestamp: float
    program_id: str
    genres: tuple[str, ...]
    watched_fraction: float

    def __post_init__(self):
        if not 0.0 <= self.watched_fraction <= 1.0:
            raise ValueError(
                f"watched_fraction must be in [0, 1], got {self.watched_fraction}"
            )
        if len(self.genres) == 0:
            raise ValueError("event must carry at least one genre")
        object.__setattr__(self, "genres", tuple(self.genres))


class GenreVocabulary:
    """Ordered set of genre names; line/list order defines dimension order."""

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(names) == 0:
            raise ValueError("vocabulary must contain at least one genre")
        if len(set(names)) != len(names):
            raise ValueError("vocabulary genres must be distinct")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    @classmethod
    def from_file(cls, path) -> "GenreVocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(line.strip() for line in lines if line.strip())

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown genre: {name!r}") from None

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self):
        return iter(self.names)


@dataclass(frozen=True)
class ProfileSeries:
    """Per-user time-indexed sequence of d-dimensional interest vectors.

    ``instants`` holds strictly increasing window-end timestamps; ``vectors``
    is an (n_windows x d) array with components in [0, 1], one row per window.
    """

    user_id: str
    instants: tuple[float, ...]
    vectors: np.ndarray

    def __post_init__(self):
        instants = tuple(float(t) for t in self.instants)
        object.__setattr__(self, "instants", instants)
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D array (windows x genres)")
        if vectors.shape[0] != len(instants):
            raise ValueError("one vector per instant required")
        if any(b <= a for a, b in zip(instants, instants[1:])):
            raise ValueError("instants must be strictly increasing")
        if vectors.size and (vectors.min() < 0.0 or vectors.max() > 1.0):
            raise ValueError("profile components must lie in [0, 1]")
        object.__setattr__(self, "vectors", vectors)

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.instants)


def credit(
    event: ViewingEvent,
    *,
    full_threshold: float = CREDIT_FULL_THRESHOLD,
    ignore_threshold: float = CREDIT_IGNORE_THRESHOLD,
) -> float:
    """Interest credit an event contributes to each of its genres.

    Piecewise in the watched fraction: 1.0 at or above ``full_threshold``,
    the fraction itself in the middle band, and 0.0 below
    ``ignore_threshold``.  Monotone and saturating.
    """
    f = event.watched_fraction
    if f >= full_threshold:
        return 1.0
    if f >= ignore_threshold:
        return f
    return 0.0


def build_series(
    events: Sequence[ViewingEvent],
    vocab: GenreVocabulary,
    window: float,
    num_windows: int,
    *,
    normalize: bool = True,
    full_threshold: float = CREDIT_FULL_THRESHOLD,
    ignore_threshold: float = CREDIT_IGNORE_THRESHOLD,
) -> ProfileSeries:
    """Aggregate one user's events into a windowed profile series.

    The timeline is split into ``num_windows`` consecutive windows of
    duration ``window`` starting at the earliest event.  Within each window
    the credit of every event is summed into each of the event's genre
    components; non-empty windows are L1-normalized (unless ``normalize`` is
    False), empty windows yield the zero vector.  Events past the final
    window edge are ignored; the final edge itself belongs to the last
    window.
    """
    if len(events) == 0:
        raise ValueError("cannot build a profile series from zero events")
    if window <= 0:
        raise ValueError("window duration must be > 0")
    if num_windows < 1:
        raise ValueError("num_windows must be >= 1")
    users = {ev.user_id for ev in events}
    if len(users) > 1:
        raise ValueError(f"events span multiple users: {sorted(users)}")

    d = len(vocab)
    sums = np.zeros((num_windows, d))
    t0 = min(ev.timestamp for ev in events)
    horizon = num_windows * window
    for ev in events:
        offset = ev.timestamp - t0
        idx = int(offset // window)
        # Tolerate round-off when the horizon is derived from the event span.
        if idx >= num_windows:
            if offset <= horizon * (1 + 1e-9):
                idx = num_windows - 1
            else:
                continue
        c = credit(
            ev, full_threshold=full_threshold, ignore_threshold=ignore_threshold
        )
        for genre in ev.genres:
            if genre not in vocab:
                raise KeyError(f"unknown genre: {genre!r}")
            sums[idx, vocab.index(genre)] += c

    if normalize:
        totals = sums.sum(axis=1, keepdims=True)
        vectors = np.divide(sums, totals, out=np.zeros_like(sums), where=totals > 0)
    else:
        vectors = np.clip(sums, 0.0, 1.0)
    instants = tuple(t0 + (i + 1) * window for i in range(num_windows))
    return ProfileSeries(user_id=events[0].user_id, instants=instants, vectors=vectors)


def derive_window(events: Sequence[ViewingEvent], num_windows: int) -> float:
    """Window duration covering the event span with ``num_windows`` windows."""
    if len(events) == 0:
        raise ValueError("cannot derive a window from zero events")
    t_min = min(ev.timestamp for ev in events)
    t_max = max(ev.timestamp for ev in events)
    span = t_max - t_min
    if span <= 0:
        return 1.0
    return span / num_windows


def load_events(path) -> list[ViewingEvent]:
    """Read viewing events from a JSON-lines file, one object per line."""
    events = []
    with open(path, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                events.append(
                    ViewingEvent(
                        user_id=str(raw["user_id"]),
                        timestamp=float(raw["timestamp"]),
                        program_id=str(raw["program_id"]),
                        genres=tuple(str(g) for g in raw["genres"]),
                        watched_fraction=float(raw["watched_fraction"]),
                    )
                )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}:{lineno}: invalid event: {exc}") from exc
    return events


def write_events(path, events: Iterable[ViewingEvent]) -> None:
    """Write viewing events as JSON lines in the same format load_events reads."""
    with open(path, "w", encoding="utf-8") as fp:
        for ev in events:
            fp.write(
                json.dumps(
                    {
                        "user_id": ev.user_id,
                        "timestamp": ev.timestamp,
                        "program_id": ev.program_id,
                        "genres": list(ev.genres),
                        "watched_fraction": ev.watched_fraction,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def group_by_user(events: Iterable[ViewingEvent]) -> dict[str, list[ViewingEvent]]:
    """Split a mixed event stream into per-user lists, keyed by user id."""
    grouped: dict[str, list[ViewingEvent]] = {}
    for ev in events:
        grouped.setdefault(ev.user_id, []).append(ev)
    return grouped
