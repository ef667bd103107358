import io
import math

import numpy as np
import pytest

from kalmanrec.evaluate import (
    cosine_distance,
    report,
    report_vectors,
    write_report_csv,
)
from kalmanrec.profiles import ProfileSeries


class TestCosineDistance:
    def test_identical_vectors(self):
        assert cosine_distance([0.3, 0.7], [0.3, 0.7]) == pytest.approx(0.0, abs=1e-15)

    def test_orthogonal_unit_vectors(self):
        assert cosine_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_hand_value(self):
        expected = 1.0 - 1.0 / math.sqrt(2.0)
        assert cosine_distance([1.0, 1.0], [1.0, 0.0]) == pytest.approx(expected, abs=1e-12)

    def test_zero_norm_convention(self):
        assert cosine_distance([0.0, 0.0], [1.0, 0.0]) == 1.0
        assert cosine_distance([1.0, 0.0], [0.0, 0.0]) == 1.0
        assert cosine_distance([0.0], [0.0]) == 1.0

    def test_symmetry_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.uniform(-1, 1, 4)
            b = rng.uniform(-1, 1, 4)
            assert cosine_distance(a, b) == cosine_distance(b, a)

    def test_positive_scaling_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            a = rng.uniform(0.1, 1, 4)
            c = rng.uniform(0.1, 10)
            assert cosine_distance(a, c * a) == pytest.approx(0.0, abs=1e-12)

    def test_range(self):
        assert cosine_distance([1.0], [-1.0]) == pytest.approx(2.0)


def make_series(vectors, user="u"):
    vectors = np.asarray(vectors, dtype=float)
    instants = tuple(float(i + 1) for i in range(vectors.shape[0]))
    return ProfileSeries(user, instants, vectors)


class TestReport:
    def test_perfect_predictions(self):
        series = make_series([[1.0, 0.0], [0.5, 0.5], [0.2, 0.8]])
        rep = report(series, series.vectors[1:], threshold=0.15)
        assert rep.fraction_below == 1.0
        assert all(d == pytest.approx(0.0, abs=1e-15) for _, d in rep.per_instant)
        assert rep.median_distance == pytest.approx(0.0, abs=1e-15)

    def test_single_scored_instant(self):
        series = make_series([[1.0, 0.0], [0.5, 0.5]])
        rep = report(series, [[1.0, 0.0]], threshold=0.15)
        assert len(rep.per_instant) == 1
        assert rep.median_distance == rep.per_instant[0][1]

    def test_misalignment_rejected(self):
        series = make_series([[1.0, 0.0], [0.5, 0.5], [0.2, 0.8]])
        with pytest.raises(ValueError, match="expected 2 predictions"):
            report(series, [[1.0, 0.0]])

    def test_zero_actual_skipped_and_counted(self):
        series = make_series([[1.0, 0.0], [0.0, 0.0], [0.2, 0.8]])
        rep = report(series, [[0.5, 0.5], [0.2, 0.8]], threshold=0.15)
        assert rep.skipped_zero_actual == 1
        assert len(rep.per_instant) == 1
        assert rep.per_instant[0][0] == series.instants[2]

    def test_zero_prediction_scores_maximal(self):
        series = make_series([[1.0, 0.0], [0.5, 0.5]])
        rep = report(series, [[0.0, 0.0]], threshold=0.15)
        assert rep.per_instant[0][1] == 1.0
        assert rep.fraction_below == 0.0

    def test_fraction_recount_matches(self):
        rng = np.random.default_rng(7)
        actuals = rng.uniform(0.01, 1, (21, 3))
        actuals /= actuals.sum(axis=1, keepdims=True)
        series = make_series(actuals)
        preds = np.clip(actuals[1:] + rng.normal(0, 0.1, (20, 3)), 0, 1)
        rep = report(series, preds, threshold=0.15)
        recount = sum(1 for _, d in rep.per_instant if d < rep.threshold)
        assert rep.fraction_below == recount / len(rep.per_instant)

    def test_threshold_is_strict_inequality(self):
        rep = report_vectors([1.0], [[1.0, 0.0]], [[0.0, 1.0]], threshold=1.0)
        assert rep.fraction_below == 0.0

    def test_all_skipped_degenerates(self):
        rep = report_vectors([1.0], [[0.0, 0.0]], [[0.5, 0.5]], threshold=0.15)
        assert rep.skipped_zero_actual == 1
        assert rep.fraction_below == 0.0
        assert math.isnan(rep.median_distance)

    def test_to_dict_round_trip(self):
        series = make_series([[1.0, 0.0], [0.5, 0.5]])
        rep = report(series, [[0.4, 0.6]], threshold=0.15)
        obj = rep.to_dict()
        assert obj["threshold"] == 0.15
        assert len(obj["per_instant"]) == 1
        assert set(obj["per_instant"][0]) == {"instant", "cosine_distance"}


class TestReportCsv:
    def test_header_and_rows(self):
        series = make_series([[1.0, 0.0], [0.5, 0.5], [0.2, 0.8]])
        rep = report(series, series.vectors[1:], threshold=0.15)
        buf = io.StringIO()
        write_report_csv(buf, rep)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "instant,cosine_distance"
        assert len(lines) == 1 + 2
        instant, dist = lines[1].split(",")
        assert float(instant) == series.instants[1]
        assert float(dist) == pytest.approx(0.0, abs=1e-12)
