"""Feature aggregation, the engagement table, and correlations."""

from __future__ import annotations

import numpy as np
import pytest

from buzzcast.errors import (
    InsufficientDataError,
    RowError,
    SchemaError,
    ValidationError,
)
from buzzcast.events import LabeledEvent, RawPost, Sport
from buzzcast.features import (
    ENGAGEMENT_COLUMNS,
    NUMERIC_FEATURES,
    TARGET_COLUMN,
    Dataset,
    EventEngagement,
    aggregate_event,
    drop_zero_post_events,
    load_engagement_csv,
    pearson_matrix,
    write_engagement_csv,
)
from buzzcast.sentiment import SentimentAnalyzers, score_posts

from test_events import make_spec


def make_row(name="Row", sport=Sport.SUPER_BOWL, **kw) -> EventEngagement:
    base = dict(
        name=name,
        sport=sport,
        total_posts=10,
        total_comments=100,
        total_scores=500,
        avg_polarity=0.2,
        avg_compound=0.3,
        avg_viewers_millions=50.0,
    )
    base.update(kw)
    return EventEngagement(**base)


def make_post(pid, score, comments, title="good game", body=""):
    return RawPost(
        id=pid,
        title=title,
        body=body,
        score=score,
        num_comments=comments,
        created_utc=1000,
        subreddit="baseball",
    )


class TestSchema:
    def test_column_layout(self):
        assert ENGAGEMENT_COLUMNS[0] == "name"
        assert ENGAGEMENT_COLUMNS[1] == "sport"
        assert ENGAGEMENT_COLUMNS[-1] == TARGET_COLUMN
        assert NUMERIC_FEATURES == [
            "total_posts",
            "total_comments",
            "total_scores",
            "avg_polarity",
            "avg_compound",
        ]

    def test_numeric_values_order(self):
        row = make_row()
        assert row.numeric_values() == [10.0, 100.0, 500.0, 0.2, 0.3]


class TestEventEngagementValidation:
    def test_negative_totals_rejected(self):
        with pytest.raises(ValidationError):
            make_row(total_comments=-1)

    def test_sentiment_range_enforced(self):
        with pytest.raises(ValidationError):
            make_row(avg_compound=1.5)

    def test_negative_viewers_rejected(self):
        with pytest.raises(ValidationError):
            make_row(avg_viewers_millions=-0.1)

    def test_blank_name_rejected(self):
        with pytest.raises(ValidationError):
            make_row(name="")


class TestAggregateEvent:
    def test_totals_are_hand_sums(self):
        analyzers = SentimentAnalyzers.default()
        event = LabeledEvent(spec=make_spec(), avg_viewers_millions=14.16)
        posts = [
            make_post("a", score=5, comments=3),
            make_post("b", score=2, comments=0),
            make_post("c", score=0, comments=7),
        ]
        row = aggregate_event(event, posts, analyzers)
        assert row.total_posts == 3
        assert row.total_comments == 10
        assert row.total_scores == 7
        assert row.avg_viewers_millions == 14.16
        pol, comp = score_posts(posts, analyzers)
        assert row.avg_polarity == pol
        assert row.avg_compound == comp

    def test_zero_posts_allowed_at_aggregation(self):
        analyzers = SentimentAnalyzers.default()
        event = LabeledEvent(spec=make_spec(), avg_viewers_millions=1.0)
        row = aggregate_event(event, [], analyzers)
        assert row.total_posts == 0
        assert row.avg_polarity == 0.0
        assert row.avg_compound == 0.0


class TestDropZeroPostEvents:
    def test_drops_and_warns(self):
        rows = [make_row("A"), make_row("B", total_posts=0), make_row("C")]
        with pytest.warns(UserWarning, match="zero-post"):
            kept, dropped = drop_zero_post_events(rows)
        assert [r.name for r in kept] == ["A", "C"]
        assert dropped == ["B"]

    def test_no_drop_no_warning(self):
        rows = [make_row("A"), make_row("B")]
        import warnings as w

        with w.catch_warnings():
            w.simplefilter("error")
            kept, dropped = drop_zero_post_events(rows)
        assert dropped == []
        assert len(kept) == 2

    def test_all_dropped_is_error(self):
        rows = [make_row("A", total_posts=0)]
        with pytest.warns(UserWarning):
            with pytest.raises(InsufficientDataError):
                drop_zero_post_events(rows)


class TestDataset:
    def test_from_rows_shapes(self, sample_rows):
        ds = Dataset.from_rows(sample_rows)
        assert len(ds) == len(sample_rows)
        assert ds.numeric.shape == (len(sample_rows), len(NUMERIC_FEATURES))
        assert ds.viewers.shape == (len(sample_rows),)
        assert ds.names[0] == sample_rows[0].name

    def test_numeric_matches_rows(self, sample_rows):
        ds = Dataset.from_rows(sample_rows)
        for i, row in enumerate(sample_rows):
            assert ds.numeric[i].tolist() == row.numeric_values()
            assert ds.viewers[i] == row.avg_viewers_millions


class TestPearsonMatrix:
    def rows_from_matrix(self, data):
        rows = []
        for i, rec in enumerate(data):
            rows.append(
                make_row(
                    f"R{i}",
                    total_posts=int(rec[0]),
                    total_comments=int(rec[1]),
                    total_scores=int(rec[2]),
                    avg_polarity=float(rec[3]),
                    avg_compound=float(rec[4]),
                    avg_viewers_millions=float(rec[5]),
                )
            )
        return rows

    def test_matches_numpy_corrcoef(self):
        rng = np.random.default_rng(7)
        data = np.column_stack(
            [
                rng.integers(1, 200, 12),
                rng.integers(1, 5000, 12),
                rng.integers(1, 9000, 12),
                rng.uniform(-0.5, 0.5, 12),
                rng.uniform(-0.5, 0.5, 12),
                rng.uniform(1, 120, 12),
            ]
        )
        rows = self.rows_from_matrix(data)
        corr, labels = pearson_matrix(rows)
        stacked = np.array(
            [r.numeric_values() + [r.avg_viewers_millions] for r in rows]
        )
        want = np.corrcoef(stacked, rowvar=False)
        assert labels == NUMERIC_FEATURES + [TARGET_COLUMN]
        assert np.allclose(corr, want, atol=1e-12)

    def test_symmetric_unit_diagonal_bounded(self, sample_rows):
        corr, _ = pearson_matrix(sample_rows)
        assert np.allclose(corr, corr.T)
        assert np.allclose(np.diag(corr), 1.0)
        assert np.all(corr <= 1.0) and np.all(corr >= -1.0)

    def test_zero_variance_column_warns_and_zeroes(self):
        rows = [
            make_row("A", total_posts=5, avg_polarity=0.1, avg_viewers_millions=10),
            make_row("B", total_posts=9, avg_polarity=0.4, avg_viewers_millions=30),
            make_row("C", total_posts=2, avg_polarity=0.2, avg_viewers_millions=20),
        ]
        # total_comments and total_scores and avg_compound are constant here
        with pytest.warns(UserWarning, match="zero variance"):
            corr, labels = pearson_matrix(rows)
        const_idx = labels.index("total_comments")
        off_diag = [corr[const_idx, j] for j in range(len(labels)) if j != const_idx]
        assert off_diag == [0.0] * (len(labels) - 1)
        assert corr[const_idx, const_idx] == 1.0

    def test_fewer_than_two_rows_is_error(self):
        with pytest.raises(InsufficientDataError):
            pearson_matrix([make_row("only")])


class TestEngagementCsv:
    def test_round_trip_exact(self, tmp_path, sample_rows):
        path = tmp_path / "engagement.csv"
        write_engagement_csv(path, sample_rows)
        loaded = load_engagement_csv(path)
        assert loaded == sample_rows

    def test_write_is_deterministic(self, tmp_path, sample_rows):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_engagement_csv(a, sample_rows)
        write_engagement_csv(b, sample_rows)
        assert a.read_bytes() == b.read_bytes()

    def test_bundled_csv_matches_rewrite(self, tmp_path, sample_dir, sample_rows):
        path = tmp_path / "engagement.csv"
        write_engagement_csv(path, sample_rows)
        assert path.read_bytes() == (sample_dir / "engagement.csv").read_bytes()

    def test_floats_survive_exactly(self, tmp_path):
        row = make_row(avg_polarity=0.1234567890123456, avg_compound=-0.987654321)
        path = tmp_path / "engagement.csv"
        write_engagement_csv(path, [row])
        loaded = load_engagement_csv(path)
        assert loaded[0].avg_polarity == row.avg_polarity
        assert loaded[0].avg_compound == row.avg_compound

    def test_wrong_header_is_schema_error(self, tmp_path):
        path = tmp_path / "engagement.csv"
        path.write_text("a,b,c\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_engagement_csv(path)

    def test_bad_row_reports_line(self, tmp_path):
        path = tmp_path / "engagement.csv"
        lines = [
            ",".join(ENGAGEMENT_COLUMNS),
            "A,Super_Bowl,10,100,500,0.1,0.2,50.0",
            "B,Super_Bowl,ten,100,500,0.1,0.2,50.0",
        ]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(RowError) as exc:
            load_engagement_csv(path)
        assert exc.value.line == 3

    def test_short_row_reports_line(self, tmp_path):
        path = tmp_path / "engagement.csv"
        lines = [
            ",".join(ENGAGEMENT_COLUMNS),
            "A,Super_Bowl,10,100",
        ]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(RowError) as exc:
            load_engagement_csv(path)
        assert exc.value.line == 2
