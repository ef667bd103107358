"""One-step-ahead Kalman predictor over interest trajectories.

Given the model of :mod:`kalmanrec.statespace`, the recursion below advances
a predicted state ``x_hat`` and its covariance ``P`` one measurement at a
time:

    S = H P H' + R                      innovation covariance
    K = A P H' S^{-1}                   predictor gain
    x_hat <- A x_hat + K (z - H x_hat)
    P     <- A P A' - K H P A' [+ Q]

The ``+ Q`` term is the standard prediction-form Riccati update and is on by
default; without it the covariance collapses to zero and the gain with it,
so the literal mode exists only for comparison runs
(``include_process_noise_in_riccati=False``).

The gain applies ``S^{-1}`` through a Cholesky solve; S is symmetric positive
definite whenever r > 0 and P is positive semidefinite, so a factorization
failure here means the state has been corrupted upstream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .profiles import GenreVocabulary, ProfileSeries
from .statespace import ModelMatrices, ModelParams, StateEstimate, assemble, initial_estimate


@dataclass(frozen=True)
class Innovation:
    """Measurement minus predicted measurement, with its covariance."""

    value: np.ndarray
    covariance: np.ndarray


@dataclass(frozen=True)
class TrackPoint:
    """Prediction aligned to one instant of a measurement sequence.

    ``estimate`` predicts this instant's state from all earlier measurements.
    ``innovation`` compares this instant's measurement against that
    prediction; it is None when the instant had no usable measurement (and
    for the very first instant, which seeds the filter).
    """

    instant: float
    estimate: StateEstimate
    innovation: Innovation | None


def innovation_of(prev: StateEstimate, z, model: ModelMatrices) -> Innovation:
    """Innovation of measurement ``z`` against the prediction ``prev``."""
    z = linalg.as_vector(z)
    value = z - model.H @ prev.x_hat
    covariance = model.H @ prev.P @ model.H.T + model.R
    return Innovation(value=value, covariance=covariance)


def gain(P, model: ModelMatrices) -> np.ndarray:
    """Predictor gain K = A P H' (H P H' + R)^{-1}, via an SPD solve."""
    P = np.asarray(P, dtype=float)
    HP = linalg.matmul(model.H, P)
    S = HP @ model.H.T + model.R
    S = 0.5 * (S + S.T)
    APHt = model.A @ (P @ model.H.T)
    return linalg.solve_spd(S, APHt.T).T


def predict_step(
    prev: StateEstimate, z, model: ModelMatrices, params: ModelParams
) -> tuple[StateEstimate, Innovation]:
    """Consume measurement ``z`` and advance the prediction one step.

    Returns the next estimate (prediction for the following instant) and the
    innovation of ``z`` against ``prev``.  Raises on dimension mismatches and
    on non-finite results, naming the step index.
    """
    z = linalg.as_vector(z)
    if z.shape[0] != model.H.shape[0]:
        raise ValueError(
            f"measurement dimension {z.shape[0]} does not match model ({model.H.shape[0]})"
        )
    inno = innovation_of(prev, z, model)
    S = 0.5 * (inno.covariance + inno.covariance.T)
    AP = model.A @ prev.P
    HPAt = (model.H @ prev.P) @ model.A.T
    K = linalg.solve_spd(S, HPAt).T

    x_next = model.A @ prev.x_hat + K @ inno.value
    P_next = AP @ model.A.T - K @ HPAt
    if params.include_process_noise_in_riccati:
        P_next = P_next + model.Q
    P_next = 0.5 * (P_next + P_next.T)

    k_next = prev.k + 1
    if not (np.isfinite(x_next).all() and np.isfinite(P_next).all()):
        raise ValueError(f"non-finite filter state at step {k_next}")
    return StateEstimate(x_hat=x_next, P=P_next, k=k_next), inno


def predict_only(
    prev: StateEstimate, model: ModelMatrices, params: ModelParams
) -> StateEstimate:
    """Advance the prediction with no measurement: pure dynamics plus Q."""
    x_next = model.A @ prev.x_hat
    P_next = model.A @ prev.P @ model.A.T + model.Q
    P_next = 0.5 * (P_next + P_next.T)
    k_next = prev.k + 1
    if not (np.isfinite(x_next).all() and np.isfinite(P_next).all()):
        raise ValueError(f"non-finite filter state at step {k_next}")
    return StateEstimate(x_hat=x_next, P=P_next, k=k_next)


def _is_missing(z: np.ndarray) -> bool:
    return not z.any()


def run_filter(
    measurements,
    params: ModelParams,
    *,
    instants: Sequence[float] | None = None,
    zero_as_measurement: bool = False,
    initial: StateEstimate | None = None,
    model: ModelMatrices | None = None,
) -> list[TrackPoint]:
    """Run the predictor over a raw measurement sequence.

    ``measurements`` is an (n x d) array-like.  The filter seeds itself from
    the first measurement unless ``initial`` is given.  All-zero measurements
    are treated as missing (dynamics-only propagation) unless
    ``zero_as_measurement`` is set.  The returned list has one entry per
    instant; entry k predicts instant k from measurements before it.
    """
    zs = np.asarray(measurements, dtype=float)
    if zs.ndim != 2:
        raise ValueError("measurements must be a 2-D array (instants x d)")
    n = zs.shape[0]
    if n < 1:
        raise ValueError("need at least one measurement")
    if zs.shape[1] != params.d:
        raise ValueError(f"measurement dimension {zs.shape[1]} != d = {params.d}")
    if instants is None:
        instants = [float(k) for k in range(n)]
    elif len(instants) != n:
        raise ValueError("instants must align one-to-one with measurements")

    if model is None:
        model = assemble(params)
    est = initial if initial is not None else initial_estimate(params, zs[0])
    points = [TrackPoint(instant=float(instants[0]), estimate=est, innovation=None)]
    prev = est
    for k in range(1, n):
        z_prev = zs[k - 1]
        if _is_missing(z_prev) and not zero_as_measurement:
            cur = predict_only(prev, model, params)
        else:
            cur, _ = predict_step(prev, z_prev, model, params)
        z_k = zs[k]
        if _is_missing(z_k) and not zero_as_measurement:
            inno = None
        else:
            inno = innovation_of(cur, z_k, model)
        points.append(TrackPoint(instant=float(instants[k]), estimate=cur, innovation=inno))
        prev = cur
    return points


def track(
    series: ProfileSeries,
    params: ModelParams,
    *,
    zero_as_measurement: bool = False,
) -> list[TrackPoint]:
    """Track one user's profile series; see :func:`run_filter`.

    Zero-profile windows mean "no consumption observed", so by default they
    propagate the dynamics instead of being conditioned on as real
    measurements of the origin.
    """
    if series.d != params.d:
        raise ValueError(f"series dimension {series.d} != d = {params.d}")
    return run_filter(
        series.vectors,
        params,
        instants=series.instants,
        zero_as_measurement=zero_as_measurement,
    )


def predicted_position(point: TrackPoint, model: ModelMatrices) -> np.ndarray:
    """Position block of a track point's predicted state (H x_hat)."""
    return model.H @ point.estimate.x_hat


def predicted_positions(points: Sequence[TrackPoint], model: ModelMatrices) -> np.ndarray:
    """Stacked predicted positions, one row per track point."""
    return np.array([predicted_position(p, model) for p in points])


def write_trace_csv(
    fp,
    vocab: GenreVocabulary,
    series: ProfileSeries,
    points: Sequence[TrackPoint],
    model: ModelMatrices,
) -> None:
    """Write the per-genre actual/predicted trace for a tracked series.

    One row per (step, genre) for every instant after the first:
    ``step,instant,genre,actual,predicted,innovation``.  The innovation field
    is empty for instants whose profile was treated as missing.
    """
    if len(points) != len(series):
        raise ValueError("track points must align with the series")
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["step", "instant", "genre", "actual", "predicted", "innovation"])
    for k in range(1, len(points)):
        point = points[k]
        actual = series.vectors[k]
        predicted = predicted_position(point, model)
        for g, genre in enumerate(vocab.names):
            inno = "" if point.innovation is None else format(point.innovation.value[g], ".12g")
            writer.writerow(
                [
                    k,
                    format(point.instant, ".12g"),
                    genre,
                    format(actual[g], ".12g"),
                    format(predicted[g], ".12g"),
                    inno,
                ]
            )
