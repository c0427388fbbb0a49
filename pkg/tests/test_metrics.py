"""Evaluation metrics: exact oracle values, invariants, degenerate targets."""

from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buzzcast.errors import R2UndefinedError, ShapeError, ValidationError
from buzzcast.report import (
    Metrics,
    build_summary,
    compute_metrics,
    load_metrics_json,
    write_metrics_json,
)


class TestComputeMetrics:
    def test_hand_computed_example(self):
        # errors (1, -1, 1): MAE 1, RMSE 1, SS_res 3 over SS_tot 2
        y_true = np.array([1.0, 2.0, 3.0])
        y_pred = np.array([2.0, 1.0, 4.0])
        m = compute_metrics(y_true, y_pred)
        assert m.mae == pytest.approx(1.0, abs=1e-15)
        assert m.rmse == pytest.approx(1.0, abs=1e-15)
        assert m.r2 == pytest.approx(-0.5, abs=1e-15)

    def test_perfect_prediction(self):
        y = np.array([3.0, 5.0, 9.0])
        m = compute_metrics(y, y.copy())
        assert m.mae == 0.0
        assert m.rmse == 0.0
        assert m.r2 == 1.0

    def test_mean_predictor_scores_zero(self):
        rng = np.random.default_rng(2)
        y = rng.uniform(1, 100, size=50)
        pred = np.full(50, y.mean())
        m = compute_metrics(y, pred)
        assert m.r2 == pytest.approx(0.0, abs=1e-12)

    def test_r2_capped_at_one(self):
        y = np.array([1.0, 2.0, 3.0])
        m = compute_metrics(y, y + 1e-16)
        assert m.r2 <= 1.0

    def test_constant_truth_is_undefined(self):
        with pytest.raises(R2UndefinedError) as exc:
            compute_metrics([5.0, 5.0, 5.0], [5.0, 6.0, 4.0])
        err = exc.value
        assert err.mae == pytest.approx(2.0 / 3.0)
        assert err.rmse == pytest.approx(np.sqrt(2.0 / 3.0))
        assert "undefined" in str(err).lower() or "variance" in str(err).lower()

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            compute_metrics([1.0, 2.0], [1.0])

    def test_empty_input(self):
        with pytest.raises(ShapeError):
            compute_metrics([], [])

    def test_two_dimensional_rejected(self):
        with pytest.raises(ShapeError):
            compute_metrics(np.zeros((2, 2)), np.zeros((2, 2)))

    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=2,
            max_size=50,
        ),
        st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=300, deadline=None)
    def test_rmse_dominates_mae(self, y_true, seed):
        rng = np.random.default_rng(seed)
        yt = np.array(y_true)
        yp = yt + rng.normal(scale=10.0, size=yt.size)
        try:
            m = compute_metrics(yt, yp)
        except R2UndefinedError as err:
            assert err.rmse >= err.mae - 1e-9
            return
        assert m.rmse >= m.mae - 1e-9

    def test_permutation_invariance(self):
        rng = np.random.default_rng(9)
        yt = rng.uniform(0, 50, 20)
        yp = yt + rng.normal(size=20)
        m1 = compute_metrics(yt, yp)
        perm = rng.permutation(20)
        m2 = compute_metrics(yt[perm], yp[perm])
        assert m1.mae == pytest.approx(m2.mae, abs=1e-12)
        assert m1.rmse == pytest.approx(m2.rmse, abs=1e-12)
        assert m1.r2 == pytest.approx(m2.r2, abs=1e-12)

    def test_scale_equivariance_of_errors(self):
        yt = np.array([1.0, 2.0, 4.0, 8.0])
        yp = np.array([1.5, 1.5, 5.0, 7.0])
        m1 = compute_metrics(yt, yp)
        m2 = compute_metrics(3 * yt, 3 * yp)
        assert m2.mae == pytest.approx(3 * m1.mae, rel=1e-12)
        assert m2.rmse == pytest.approx(3 * m1.rmse, rel=1e-12)
        assert m2.r2 == pytest.approx(m1.r2, rel=1e-12)


class TestMetricsRecord:
    def test_negative_errors_rejected(self):
        with pytest.raises(ValidationError):
            Metrics(mae=-1.0, rmse=1.0, r2=0.5)
        with pytest.raises(ValidationError):
            Metrics(mae=1.0, rmse=-1.0, r2=0.5)

    def test_r2_above_one_rejected(self):
        with pytest.raises(ValidationError):
            Metrics(mae=0.0, rmse=0.0, r2=1.1)

    def test_negative_r2_allowed(self):
        m = Metrics(mae=1.0, rmse=2.0, r2=-4.0)
        assert m.r2 == -4.0


class TestMetricsJson:
    def test_round_trip(self, tmp_path):
        m = Metrics(mae=0.875, rmse=1.25, r2=0.99)
        path = tmp_path / "metrics.json"
        write_metrics_json(path, m, split="test", n=5)
        doc = load_metrics_json(path)
        assert doc == {
            "split": "test",
            "n": 5,
            "mae_millions": 0.875,
            "rmse_millions": 1.25,
            "r2": 0.99,
        }

    def test_extra_fields_merge(self, tmp_path):
        m = Metrics(mae=1.0, rmse=1.0, r2=0.5)
        path = tmp_path / "metrics.json"
        write_metrics_json(path, m, split="full", n=24, extra={"note": "x", "r2": None})
        doc = load_metrics_json(path)
        assert doc["r2"] is None
        assert doc["note"] == "x"

    def test_deterministic_bytes(self, tmp_path):
        m = Metrics(mae=1.0, rmse=1.5, r2=0.25)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_metrics_json(a, m, split="test", n=3)
        write_metrics_json(b, m, split="test", n=3)
        assert a.read_bytes() == b.read_bytes()


class TestSummary:
    def test_contains_core_sections(self):
        text = build_summary(
            n_events=24,
            sport_counts={"Super_Bowl": 6, "World_Series": 5},
            dropped=["Game Z"],
            flagged=["Game Y"],
            best_params={"n_estimators": 200, "max_depth": 3},
            cv_mean_mae=0.0707,
            metrics_docs=[
                {"split": "test", "n": 5, "mae_millions": 0.87, "rmse_millions": 1.3, "r2": 0.999},
                {"split": "full", "n": 24, "mae_millions": 0.19, "rmse_millions": 0.6, "r2": None},
            ],
            importance=[("total_posts", 0.83), ("total_scores", 0.11)],
            figures=["scatter.svg", "heatmap.svg"],
            split_note="one sport appears only in training",
        )
        assert text.startswith("# Viewership model summary")
        assert "Events modeled: 24" in text
        assert "Game Z" in text and "Game Y" in text
        assert "n_estimators: 200" in text
        assert "| test | 5 |" in text
        assert "undefined" in text  # r2 None renders as text, not a number
        assert "1. total_posts: 0.8300" in text
        assert "scatter.svg" in text
        assert "Note: one sport appears only in training" in text

    def test_minimal_summary(self):
        text = build_summary(
            n_events=5,
            sport_counts={},
            dropped=[],
            flagged=[],
            best_params=None,
            cv_mean_mae=None,
            metrics_docs=[],
            importance=[],
            figures=[],
        )
        assert "Events modeled: 5" in text
        assert "hyperparameters" not in text
        assert "| split |" not in text

    def test_json_free_of_nan(self, tmp_path):
        m = Metrics(mae=0.5, rmse=0.5, r2=0.5)
        path = tmp_path / "metrics.json"
        write_metrics_json(path, m, split="test", n=2)
        json.loads(path.read_text())  # strict parse must succeed
