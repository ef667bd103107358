"""Tracking-quality metrics: cosine distance between prediction and observation.

For every instant after the first, the one-step-ahead predicted profile is
compared against the profile actually observed at that instant.  Instants
whose observed profile is the zero vector carry no information and are
skipped (but counted); everything else contributes a cosine distance, and
the report summarizes how often the distance stays under a quality
threshold.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .profiles import ProfileSeries

DEFAULT_THRESHOLD = 0.15


def cosine_distance(a, b) -> float:
    """1 - cos(a, b); 1.0 by convention when either vector has zero norm."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 1.0
    return 1.0 - float(np.dot(a, b)) / (na * nb)


@dataclass(frozen=True)
class EvalReport:
    """Distance-per-instant summary of a tracked series.

    ``per_instant`` holds (instant, cosine_distance) pairs for every scored
    instant; instants whose observed profile was zero are excluded from the
    statistics and counted in ``skipped_zero_actual`` instead.
    """

    per_instant: tuple[tuple[float, float], ...]
    fraction_below: float
    median_distance: float
    threshold: float
    skipped_zero_actual: int = 0

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "fraction_below": self.fraction_below,
            "median_distance": self.median_distance,
            "skipped_zero_actual": self.skipped_zero_actual,
            "per_instant": [
                {"instant": t, "cosine_distance": d} for t, d in self.per_instant
            ],
        }


def report_vectors(
    instants: Sequence[float],
    actuals,
    predictions,
    threshold: float = DEFAULT_THRESHOLD,
) -> EvalReport:
    """Build an :class:`EvalReport` from aligned actual/predicted vectors."""
    actuals = np.asarray(actuals, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if actuals.shape != predictions.shape:
        raise ValueError(
            f"actuals {actuals.shape} and predictions {predictions.shape} misaligned"
        )
    if len(instants) != actuals.shape[0]:
        raise ValueError("instants misaligned with vectors")
    per_instant = []
    skipped = 0
    for t, actual, predicted in zip(instants, actuals, predictions):
        if not actual.any():
            skipped += 1
            continue
        per_instant.append((float(t), cosine_distance(actual, predicted)))
    distances = [d for _, d in per_instant]
    if distances:
        fraction_below = sum(1 for d in distances if d < threshold) / len(distances)
        median = float(np.median(distances))
    else:
        fraction_below = 0.0
        median = math.nan
    return EvalReport(
        per_instant=tuple(per_instant),
        fraction_below=fraction_below,
        median_distance=median,
        threshold=float(threshold),
        skipped_zero_actual=skipped,
    )


def report(
    series: ProfileSeries,
    predictions,
    threshold: float = DEFAULT_THRESHOLD,
) -> EvalReport:
    """Compare predictions against a profile series.

    ``predictions`` must align one-to-one with the series instants after the
    first (the first instant seeds the filter and has no prediction).
    """
    predictions = np.asarray(predictions, dtype=float)
    expected = len(series) - 1
    if predictions.shape[0] != expected:
        raise ValueError(
            f"expected {expected} predictions (instants after the first), "
            f"got {predictions.shape[0]}"
        )
    return report_vectors(
        series.instants[1:], series.vectors[1:], predictions, threshold
    )


def write_report_csv(fp, rep: EvalReport) -> None:
    """Plot-ready distance trace: one ``instant,cosine_distance`` row per instant."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["instant", "cosine_distance"])
    for t, d in rep.per_instant:
        writer.writerow([format(t, ".12g"), format(d, ".12g")])
