"""Viewer-space evaluation metrics and the run summary document."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import R2UndefinedError, ShapeError, ValidationError


@dataclass(frozen=True)
class Metrics:
    """MAE and RMSE in millions of viewers; R^2 dimensionless, <= 1."""

    mae: float
    rmse: float
    r2: float

    def __post_init__(self):
        if self.mae < 0 or self.rmse < 0:
            raise ValidationError("error metrics cannot be negative")
        if self.r2 > 1.0 + 1e-12:
            raise ValidationError("R^2 cannot exceed 1")


def compute_metrics(y_true: Sequence[float], y_pred: Sequence[float]) -> Metrics:
    """MAE, RMSE, and R^2 = 1 - SS_res/SS_tot.

    Zero-variance y_true makes R^2 undefined; the raised error still
    carries the computed MAE and RMSE.
    """
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    if yt.shape != yp.shape or yt.ndim != 1:
        raise ShapeError(f"shapes {yt.shape} and {yp.shape} do not match")
    if yt.size == 0:
        raise ShapeError("metrics need at least one sample")
    diff = yp - yt
    mae = float(np.mean(np.abs(diff)))
    rmse = float(np.sqrt(np.mean(diff**2)))
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        raise R2UndefinedError(mae, rmse)
    r2 = 1.0 - float(np.sum(diff**2)) / ss_tot
    return Metrics(mae=mae, rmse=rmse, r2=min(r2, 1.0))


def write_metrics_json(
    path: str | Path,
    metrics: Metrics,
    split: str,
    n: int,
    extra: dict | None = None,
) -> None:
    doc = {
        "split": split,
        "n": n,
        "mae_millions": metrics.mae,
        "rmse_millions": metrics.rmse,
        "r2": metrics.r2,
    }
    if extra:
        doc.update(extra)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_metrics_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def build_summary(
    n_events: int,
    sport_counts: dict[str, int],
    dropped: Sequence[str],
    flagged: Sequence[str],
    best_params: dict | None,
    cv_mean_mae: float | None,
    metrics_docs: Sequence[dict],
    importance: Sequence[tuple[str, float]],
    figures: Sequence[str],
    split_note: str | None = None,
) -> str:
    """Markdown run summary stitched from the pipeline artifacts."""
    lines = ["# Viewership model summary", ""]
    lines.append(f"Events modeled: {n_events}")
    if sport_counts:
        parts = ", ".join(f"{k}: {v}" for k, v in sorted(sport_counts.items()))
        lines.append(f"Sport mix: {parts}")
    if dropped:
        lines.append(f"Dropped (zero posts in window): {', '.join(dropped)}")
    if flagged:
        lines.append(f"IQR-flagged outliers: {', '.join(flagged)}")
    lines.append("")
    if best_params is not None:
        lines.append("## Selected hyperparameters")
        lines.append("")
        for key, value in best_params.items():
            lines.append(f"- {key}: {value}")
        if cv_mean_mae is not None:
            lines.append(f"- CV mean MAE (log space): {cv_mean_mae:.4f}")
        lines.append("")
    if metrics_docs:
        lines.append("## Metrics (viewer space, millions)")
        lines.append("")
        lines.append("| split | n | MAE | RMSE | R2 |")
        lines.append("| --- | --- | --- | --- | --- |")
        for doc in metrics_docs:
            r2 = doc.get("r2")
            r2_text = "undefined" if r2 is None else f"{r2:.4f}"
            lines.append(
                f"| {doc['split']} | {doc['n']} | {doc['mae_millions']:.4f} "
                f"| {doc['rmse_millions']:.4f} | {r2_text} |"
            )
        lines.append("")
    if importance:
        lines.append("## Feature importance (mean |phi|, log space)")
        lines.append("")
        for rank, (name, value) in enumerate(importance, start=1):
            lines.append(f"{rank}. {name}: {value:.4f}")
        lines.append("")
    if figures:
        lines.append("## Figures")
        lines.append("")
        for fig in figures:
            lines.append(f"- {fig}")
        lines.append("")
    if split_note:
        lines.append(f"Note: {split_note}")
        lines.append("")
    return "\n".join(lines)


def write_summary(path: str | Path, content: str) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(content, encoding="utf-8")
