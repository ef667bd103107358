"""Synthetic trajectories, measurements and viewing-event logs.

Real consumption datasets of the scale this tracker targets are proprietary,
so everything here stands in for one: seeded generators produce ground-truth
interest trajectories, noisy measurements of them, and event logs whose
windowed profiles approximate the trajectories.

Three regimes:

* ``model-exact``: states evolve exactly per the linear-Gaussian model, so a
  matched filter is provably consistent on the output.
* ``piecewise-interest``: interest components follow piecewise-linear curves
  clamped to [0, 1].  Profiles live in [0, 1] while the unconstrained linear
  model does not, so this regime exercises the filter under the model
  mismatch it actually operates with.
* ``random-walk``: positions follow a reflected random walk in [0, 1]^d.

All randomness flows from the config seed through numpy's PCG64 bit
generator (Gaussians via numpy's ziggurat sampler); identical configs yield
bit-identical output.  Two independent child streams keep the trajectory
shape separate from the noise, so event generation and state generation see
the same underlying curves.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .profiles import GenreVocabulary, ViewingEvent
from .statespace import ModelParams, assemble

REGIME_MODEL_EXACT = "model-exact"
REGIME_PIECEWISE = "piecewise-interest"
REGIME_RANDOM_WALK = "random-walk"
REGIMES = (REGIME_MODEL_EXACT, REGIME_PIECEWISE, REGIME_RANDOM_WALK)

# Recorded in run metadata so a run can be reproduced bit-for-bit.
PRNG_INFO = {
    "bit_generator": "numpy PCG64",
    "gaussian_sampler": "ziggurat (numpy Generator.normal)",
}

DEFAULT_EVENTS_PER_WINDOW = 1000
DEFAULT_WINDOW_SECONDS = 5 * 86400.0


@dataclass(frozen=True)
class SynthConfig:
    """Seeded recipe for one synthetic user trajectory."""

    steps: int
    seed: int
    params: ModelParams
    regime: str = REGIME_PIECEWISE
    # Overrides the measurement-noise variance used for synthesis; None means
    # params.r.  Unlike the filter's R, this may be exactly zero.
    measurement_noise: float | None = None

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.measurement_noise is not None and self.measurement_noise < 0:
            raise ValueError("measurement_noise must be >= 0")

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def noise_variance(self) -> float:
        return self.params.r if self.measurement_noise is None else self.measurement_noise


def _rng_pair(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    # Child 0 shapes the trajectory, child 1 adds noise / draws events.
    children = np.random.SeedSequence(seed).spawn(2)
    return (
        np.random.Generator(np.random.PCG64(children[0])),
        np.random.Generator(np.random.PCG64(children[1])),
    )


def interest_curves(config: SynthConfig) -> np.ndarray:
    """The bounded ground-truth position path, shape (steps, d), in [0, 1].

    For the piecewise regime each component interpolates between 3 to 6
    random change-points (plus the endpoints) with values uniform in [0, 1].
    Deterministic under the seed; identical to what generate_states and
    generate_events see.
    """
    rng_structure, _ = _rng_pair(config.seed)
    return _positions_for(config, rng_structure)


def _curves_from(rng: np.random.Generator, steps: int, d: int) -> np.ndarray:
    grid = np.arange(steps, dtype=float)
    curves = np.empty((steps, d))
    for j in range(d):
        n_changes = int(rng.integers(3, 7))
        times = np.concatenate(
            [[0.0], np.sort(rng.uniform(0.0, steps - 1.0, size=n_changes)), [steps - 1.0]]
        )
        values = rng.uniform(0.0, 1.0, size=times.shape[0])
        curves[:, j] = np.interp(grid, times, values)
    return np.clip(curves, 0.0, 1.0)


def _with_derivatives(positions: np.ndarray, t_step: float) -> np.ndarray:
    # Full 3d states from a position path: backward-difference velocities and
    # accelerations, zero at the first step.
    vel = np.zeros_like(positions)
    vel[1:] = (positions[1:] - positions[:-1]) / t_step
    acc = np.zeros_like(positions)
    acc[1:] = (vel[1:] - vel[:-1]) / t_step
    return np.hstack([positions, vel, acc])


def _positions_for(config: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """Bounded [0, 1] position path for the non-model-exact regimes."""
    if config.regime == REGIME_PIECEWISE:
        return _curves_from(rng, config.steps, config.d)
    if config.regime == REGIME_RANDOM_WALK:
        positions = np.empty((config.steps, config.d))
        positions[0] = rng.uniform(0.0, 1.0, size=config.d)
        step_std = float(np.sqrt(config.params.q))
        for k in range(config.steps - 1):
            raw = positions[k] + rng.normal(0.0, step_std, size=config.d)
            folded = np.remainder(raw, 2.0)
            positions[k + 1] = np.where(folded > 1.0, 2.0 - folded, folded)
        return positions
    raise ValueError(
        f"regime {config.regime!r} has no bounded position path; "
        "event synthesis needs piecewise-interest or random-walk"
    )


def generate_states(config: SynthConfig) -> tuple[np.ndarray, np.ndarray]:
    """Ground-truth states (steps x 3d) and noisy measurements (steps x d)."""
    rng_structure, rng_noise = _rng_pair(config.seed)
    params = config.params
    d, steps = config.d, config.steps
    noise_std = float(np.sqrt(config.noise_variance))

    if config.regime == REGIME_MODEL_EXACT:
        model = assemble(params)
        w_std = float(np.sqrt(params.q))
        states = np.empty((steps, 3 * d))
        states[0] = np.concatenate(
            [rng_structure.uniform(0.25, 0.75, size=d), np.zeros(2 * d)]
        )
        for k in range(steps - 1):
            w = rng_noise.normal(0.0, w_std, size=3 * d)
            states[k + 1] = model.A @ states[k] + w
        measurements = states[:, :d] + rng_noise.normal(0.0, noise_std, size=(steps, d))
        return states, measurements

    positions = _positions_for(config, rng_structure)
    states = _with_derivatives(positions, params.t_step)
    measurements = positions + rng_noise.normal(0.0, noise_std, size=(steps, d))
    return states, measurements


def generate_events(
    config: SynthConfig,
    vocab: GenreVocabulary,
    *,
    user_id: str = "user000",
    events_per_window: int = DEFAULT_EVENTS_PER_WINDOW,
    window_seconds: float = DEFAULT_WINDOW_SECONDS,
    start_time: float = 0.0,
    positions: np.ndarray | None = None,
) -> list[ViewingEvent]:
    """Event log whose windowed profiles approximate the interest curves.

    Per window, ``events_per_window`` watches are split across genres in
    proportion to the current interest vector, and each watch's
    watched_fraction scales with the genre's interest so strong interests
    earn full credit.  Windows with zero total interest produce no events.

    The interest path defaults to the regime's position path (identical to
    the one :func:`generate_states` reports as ground truth, since both come
    from the same child stream of the seed); pass ``positions`` to drive the
    events from an explicit (steps x d) path in [0, 1] instead.
    """
    if len(vocab) != config.d:
        raise ValueError(f"vocabulary size {len(vocab)} != d = {config.d}")
    if events_per_window < 1:
        raise ValueError("events_per_window must be >= 1")
    rng_structure, rng_events = _rng_pair(config.seed)
    if positions is None:
        curves = _positions_for(config, rng_structure)
    else:
        curves = np.asarray(positions, dtype=float)
        if curves.shape != (config.steps, config.d):
            raise ValueError(
                f"positions must have shape ({config.steps}, {config.d}), got {curves.shape}"
            )

    events: list[ViewingEvent] = []
    for w in range(config.steps):
        interest = curves[w]
        total = interest.sum()
        if total <= 0.0:
            continue
        counts = rng_events.multinomial(events_per_window, interest / total)
        w_start = start_time + w * window_seconds
        serial = 0
        for g in range(config.d):
            for _ in range(int(counts[g])):
                t = w_start + rng_events.uniform(0.0, window_seconds)
                fraction = float(
                    interest[g] * (0.75 + 0.25 * rng_events.uniform())
                )
                events.append(
                    ViewingEvent(
                        user_id=user_id,
                        timestamp=float(t),
                        program_id=f"prog-{w:03d}-{serial:04d}",
                        genres=(vocab.names[g],),
                        watched_fraction=min(fraction, 1.0),
                    )
                )
                serial += 1
    events.sort(key=lambda ev: (ev.timestamp, ev.program_id))
    return events


def write_truth_csv(fp, vocab: GenreVocabulary, positions: np.ndarray) -> None:
    """Ground-truth positions as ``step,genre,true_position`` rows."""
    positions = np.asarray(positions, dtype=float)
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["step", "genre", "true_position"])
    for k in range(positions.shape[0]):
        for g, genre in enumerate(vocab.names):
            writer.writerow([k, genre, format(positions[k, g], ".12g")])


def derived_seed(seed: int, user_index: int) -> int:
    """Per-user seed for parallel generation: top-level seed XOR user index."""
    return seed ^ user_index


def default_vocabulary(d: int) -> GenreVocabulary:
    """Synthetic genre names genre00..genre{d-1} for self-contained runs."""
    return GenreVocabulary(f"genre{i:02d}" for i in range(d))
