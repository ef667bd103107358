"""Kalman-filter tracking of genre-interest profiles with recommendations.

A user's TV consumption is condensed into a time-indexed interest profile
over genres, tracked as a moving point by a constant-acceleration Kalman
predictor, and the predicted interest shifts are turned into promoted and
demoted genre sets.
"""

from .evaluate import EvalReport, cosine_distance, report
from .kalman import (
    Innovation,
    TrackPoint,
    gain,
    predict_only,
    predict_step,
    run_filter,
    track,
)
from .profiles import (
    GenreVocabulary,
    ProfileSeries,
    ViewingEvent,
    build_series,
    credit,
    load_events,
)
from .recommend import ConceptDelta, Recommendation, classify, deltas, refine
from .statespace import ModelMatrices, ModelParams, StateEstimate, assemble, initial_estimate
from .synth import SynthConfig, generate_events, generate_states

__version__ = "0.1.0"

__all__ = [
    "ConceptDelta",
    "EvalReport",
    "GenreVocabulary",
    "Innovation",
    "ModelMatrices",
    "ModelParams",
    "ProfileSeries",
    "Recommendation",
    "StateEstimate",
    "SynthConfig",
    "TrackPoint",
    "ViewingEvent",
    "__version__",
    "assemble",
    "build_series",
    "classify",
    "cosine_distance",
    "credit",
    "deltas",
    "gain",
    "generate_events",
    "generate_states",
    "initial_estimate",
    "load_events",
    "predict_only",
    "predict_step",
    "refine",
    "report",
    "run_filter",
    "track",
]
