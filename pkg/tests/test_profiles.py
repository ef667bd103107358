import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kalmanrec.profiles import (
    GenreVocabulary,
    ProfileSeries,
    ViewingEvent,
    build_series,
    credit,
    derive_window,
    group_by_user,
    load_events,
    write_events,
)

GENRES = ("Drama", "Documentary", "News")


def vocab3():
    return GenreVocabulary(GENRES)


def ev(t, genres, fraction, user="u1", program="p"):
    return ViewingEvent(
        user_id=user, timestamp=t, program_id=program,
        genres=tuple(genres), watched_fraction=fraction,
    )


class TestCredit:
    def test_watched_entirely(self):
        assert credit(ev(0, ["Drama"], 1.0)) == 1.0

    def test_not_watched(self):
        assert credit(ev(0, ["Drama"], 0.0)) == 0.0

    def test_mid_band_passthrough(self):
        assert credit(ev(0, ["Drama"], 0.5)) == 0.5

    def test_band_edges(self):
        assert credit(ev(0, ["Drama"], 0.75)) == 1.0
        assert credit(ev(0, ["Drama"], 0.25)) == 0.25
        assert credit(ev(0, ["Drama"], 0.2499)) == 0.0

    def test_custom_thresholds(self):
        e = ev(0, ["Drama"], 0.5)
        assert credit(e, full_threshold=0.4, ignore_threshold=0.1) == 1.0
        assert credit(e, full_threshold=0.9, ignore_threshold=0.6) == 0.0

    @settings(deadline=None, max_examples=80)
    @given(st.floats(0.0, 1.0))
    def test_monotone_and_bounded(self, f):
        c = credit(ev(0, ["Drama"], f))
        assert 0.0 <= c <= 1.0
        higher = credit(ev(0, ["Drama"], min(1.0, f + 0.1)))
        assert higher >= c


class TestEventValidation:
    def test_fraction_out_of_range(self):
        with pytest.raises(ValueError, match="watched_fraction"):
            ev(0, ["Drama"], 1.5)

    def test_empty_genres(self):
        with pytest.raises(ValueError, match="genre"):
            ev(0, [], 0.5)


class TestVocabulary:
    def test_index_bijection(self):
        v = vocab3()
        assert [v.index(name) for name in GENRES] == [0, 1, 2]
        assert len(v) == 3

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            GenreVocabulary(["Drama", "Drama"])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            GenreVocabulary([])

    def test_unknown_lookup(self):
        with pytest.raises(KeyError, match="Sports"):
            vocab3().index("Sports")

    def test_from_file(self, tmp_path):
        path = tmp_path / "genres.txt"
        path.write_text("Drama\nDocumentary\n\nNews\n", encoding="utf-8")
        v = GenreVocabulary.from_file(path)
        assert v.names == GENRES


class TestBuildSeries:
    def test_single_event_unit_vector(self):
        series = build_series([ev(0, ["Drama"], 1.0)], vocab3(), 10.0, 1)
        np.testing.assert_array_equal(series.vectors, [[1.0, 0.0, 0.0]])

    def test_two_events_split(self):
        events = [ev(0, ["Drama"], 1.0), ev(1, ["Documentary"], 1.0)]
        series = build_series(events, vocab3(), 10.0, 1)
        np.testing.assert_array_equal(series.vectors, [[0.5, 0.5, 0.0]])

    def test_empty_window_zero_vector(self):
        events = [ev(0, ["Drama"], 1.0), ev(25, ["News"], 1.0)]
        series = build_series(events, vocab3(), 10.0, 3)
        np.testing.assert_array_equal(
            series.vectors,
            [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        )

    def test_instants_are_window_ends(self):
        events = [ev(100.0, ["Drama"], 1.0)]
        series = build_series(events, vocab3(), 5.0, 3)
        assert series.instants == (105.0, 110.0, 115.0)

    def test_unknown_genre_named(self):
        bad = ViewingEvent("u1", 0, "p", ("Sports",), 1.0)
        with pytest.raises(KeyError, match="Sports"):
            build_series([bad], vocab3(), 10.0, 1)

    def test_empty_events_rejected(self):
        with pytest.raises(ValueError, match="zero events"):
            build_series([], vocab3(), 10.0, 1)

    def test_multi_user_rejected(self):
        events = [ev(0, ["Drama"], 1.0, user="a"), ev(1, ["Drama"], 1.0, user="b")]
        with pytest.raises(ValueError, match="multiple users"):
            build_series(events, vocab3(), 10.0, 1)

    def test_multi_genre_event_credits_each_fully(self):
        series = build_series([ev(0, ["Drama", "News"], 1.0)], vocab3(), 10.0, 1)
        np.testing.assert_array_equal(series.vectors, [[0.5, 0.0, 0.5]])

    def test_event_past_horizon_ignored(self):
        events = [ev(0, ["Drama"], 1.0), ev(100, ["News"], 1.0)]
        series = build_series(events, vocab3(), 10.0, 2)
        np.testing.assert_array_equal(series.vectors[1], [0.0, 0.0, 0.0])

    def test_final_edge_belongs_to_last_window(self):
        events = [ev(0, ["Drama"], 1.0), ev(20.0, ["News"], 1.0)]
        series = build_series(events, vocab3(), 10.0, 2)
        np.testing.assert_array_equal(series.vectors[1], [0.0, 0.0, 1.0])

    def test_sub_threshold_events_leave_zero_vector(self):
        series = build_series([ev(0, ["Drama"], 0.1)], vocab3(), 10.0, 1)
        np.testing.assert_array_equal(series.vectors, [[0.0, 0.0, 0.0]])

    def test_raw_mode_skips_normalization(self):
        events = [ev(0, ["Drama"], 1.0), ev(1, ["Documentary"], 0.5)]
        series = build_series(events, vocab3(), 10.0, 1, normalize=False)
        np.testing.assert_array_equal(series.vectors, [[1.0, 0.5, 0.0]])

    def test_raw_mode_clips_to_unit_interval(self):
        events = [ev(0, ["Drama"], 1.0), ev(1, ["Drama"], 1.0)]
        series = build_series(events, vocab3(), 10.0, 1, normalize=False)
        np.testing.assert_array_equal(series.vectors, [[1.0, 0.0, 0.0]])

    def test_custom_credit_thresholds_forwarded(self):
        series = build_series(
            [ev(0, ["Drama"], 0.5)], vocab3(), 10.0, 1,
            full_threshold=0.4, ignore_threshold=0.1,
        )
        np.testing.assert_array_equal(series.vectors, [[1.0, 0.0, 0.0]])


# Fractions from this grid produce credits whose window sums are exact in
# binary, so order-invariance properties can assert bit equality.
exact_fractions = st.sampled_from([0.0, 0.25, 0.5, 1.0])


@st.composite
def event_batches(draw):
    n = draw(st.integers(1, 25))
    return [
        ev(
            draw(st.floats(0.0, 99.0, allow_nan=False)),
            [GENRES[draw(st.integers(0, 2))]],
            draw(exact_fractions),
            program=f"p{i}",
        )
        for i in range(n)
    ]


class TestSeriesProperties:
    @settings(deadline=None, max_examples=60)
    @given(event_batches())
    def test_l1_norm_one_or_zero(self, events):
        series = build_series(events, vocab3(), 10.0, 10)
        for vec in series.vectors:
            total = vec.sum()
            assert total == 0.0 or abs(total - 1.0) <= 1e-12
            assert vec.min() >= 0.0 and vec.max() <= 1.0

    @settings(deadline=None, max_examples=60)
    @given(event_batches(), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, events, rand):
        base = build_series(events, vocab3(), 10.0, 10)
        shuffled = list(events)
        rand.shuffle(shuffled)
        permuted = build_series(shuffled, vocab3(), 10.0, 10)
        np.testing.assert_array_equal(base.vectors, permuted.vectors)
        assert base.instants == permuted.instants

    @settings(deadline=None, max_examples=60)
    @given(event_batches())
    def test_doubling_credits_keeps_normalized_vectors(self, events):
        base = build_series(events, vocab3(), 10.0, 10)
        doubled = build_series(events + events, vocab3(), 10.0, 10)
        np.testing.assert_array_equal(base.vectors, doubled.vectors)


class TestProfileSeriesType:
    def test_requires_monotone_instants(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            ProfileSeries("u", (1.0, 1.0), np.zeros((2, 2)))

    def test_requires_unit_interval(self):
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            ProfileSeries("u", (1.0,), np.array([[1.5, 0.0]]))

    def test_requires_alignment(self):
        with pytest.raises(ValueError, match="per instant"):
            ProfileSeries("u", (1.0, 2.0), np.zeros((3, 2)))


class TestEventIO:
    def test_round_trip(self, tmp_path):
        events = [
            ev(12.5, ["Drama", "News"], 0.8, user="alice", program="p1"),
            ev(13.0, ["Documentary"], 0.4, user="bob", program="p2"),
        ]
        path = tmp_path / "events.jsonl"
        write_events(path, events)
        assert load_events(path) == events

    def test_malformed_line_reports_location(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text('{"user_id": "u"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            load_events(path)

    def test_group_by_user(self):
        events = [ev(0, ["Drama"], 1.0, user="b"), ev(1, ["Drama"], 1.0, user="a"),
                  ev(2, ["News"], 1.0, user="b")]
        grouped = group_by_user(events)
        assert sorted(grouped) == ["a", "b"]
        assert len(grouped["b"]) == 2

    def test_derive_window(self):
        events = [ev(0.0, ["Drama"], 1.0), ev(70.0, ["Drama"], 1.0)]
        assert derive_window(events, 35) == 2.0
        assert derive_window([ev(5.0, ["Drama"], 1.0)], 35) == 1.0
