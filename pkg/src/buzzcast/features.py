"""Per-event engagement aggregation and the engagement CSV format."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, RowError, SchemaError, ValidationError
from .events import LabeledEvent, RawPost, Sport
from .sentiment import SentimentAnalyzers, score_posts

# Numeric model features, in design-matrix order. One-hot sport columns
# follow these; the target is never part of the matrix.
NUMERIC_FEATURES = [
    "total_posts",
    "total_comments",
    "total_scores",
    "avg_polarity",
    "avg_compound",
]

TARGET_COLUMN = "avg_viewers_millions"

ENGAGEMENT_COLUMNS = ["name", "sport"] + NUMERIC_FEATURES + [TARGET_COLUMN]


@dataclass(frozen=True)
class EventEngagement:
    """One labeled event reduced to engagement features."""

    name: str
    sport: Sport
    total_posts: int
    total_comments: int
    total_scores: int
    avg_polarity: float
    avg_compound: float
    avg_viewers_millions: float

    def __post_init__(self):
        if not self.name:
            raise ValidationError("event name must be non-empty")
        if self.total_posts < 0 or self.total_comments < 0:
            raise ValidationError(f"{self.name}: negative post/comment totals")
        if not -1.0 <= self.avg_polarity <= 1.0:
            raise ValidationError(f"{self.name}: avg_polarity outside [-1, 1]")
        if not -1.0 <= self.avg_compound <= 1.0:
            raise ValidationError(f"{self.name}: avg_compound outside [-1, 1]")
        if self.avg_viewers_millions < 0:
            raise ValidationError(f"{self.name}: negative viewership")

    def numeric_values(self) -> list[float]:
        return [float(getattr(self, k)) for k in NUMERIC_FEATURES]


def aggregate_event(
    event: LabeledEvent, posts: list[RawPost], analyzers: SentimentAnalyzers
) -> EventEngagement:
    """Sum counts/scores over the window's posts and average both sentiments."""
    avg_polarity, avg_compound = score_posts(posts, analyzers)
    return EventEngagement(
        name=event.spec.name,
        sport=event.spec.sport,
        total_posts=len(posts),
        total_comments=sum(p.num_comments for p in posts),
        total_scores=sum(p.score for p in posts),
        avg_polarity=avg_polarity,
        avg_compound=avg_compound,
        avg_viewers_millions=event.avg_viewers_millions,
    )


def drop_zero_post_events(
    rows: list[EventEngagement],
) -> tuple[list[EventEngagement], list[str]]:
    """Remove events with no posts in-window; they carry no signal.

    Returns (kept, dropped_names) and warns when anything was dropped.
    Raises InsufficientDataError if nothing survives.
    """
    kept = [r for r in rows if r.total_posts > 0]
    dropped = [r.name for r in rows if r.total_posts == 0]
    if dropped:
        warnings.warn(
            f"dropping {len(dropped)} zero-post event(s): {', '.join(dropped)}",
            stacklevel=2,
        )
    if not kept:
        raise InsufficientDataError("every event had zero posts in its window")
    return kept, dropped


@dataclass(frozen=True)
class Dataset:
    """Column-major view of engagement rows, ready for preprocessing."""

    names: tuple[str, ...]
    sports: tuple[Sport, ...]
    numeric: np.ndarray  # (n, len(NUMERIC_FEATURES)) float64
    viewers: np.ndarray  # (n,) float64

    def __post_init__(self):
        n = len(self.names)
        if len(self.sports) != n or self.numeric.shape != (n, len(NUMERIC_FEATURES)):
            raise ValidationError("dataset columns disagree on row count")
        if self.viewers.shape != (n,):
            raise ValidationError("dataset columns disagree on row count")

    def __len__(self) -> int:
        return len(self.names)

    @classmethod
    def from_rows(cls, rows: list[EventEngagement]) -> "Dataset":
        if not rows:
            raise InsufficientDataError("no engagement rows")
        return cls(
            names=tuple(r.name for r in rows),
            sports=tuple(r.sport for r in rows),
            numeric=np.array([r.numeric_values() for r in rows], dtype=np.float64),
            viewers=np.array(
                [r.avg_viewers_millions for r in rows], dtype=np.float64
            ),
        )


def pearson_matrix(rows: list[EventEngagement]) -> tuple[np.ndarray, list[str]]:
    """Pearson correlation over numeric features plus the target.

    Zero-variance columns get 0.0 against everything else (diagonal stays
    1.0) with a warning; fewer than 2 rows is an error.
    """
    if len(rows) < 2:
        raise InsufficientDataError("need at least 2 rows for correlations")
    ds = Dataset.from_rows(rows)
    data = np.column_stack([ds.numeric, ds.viewers])
    labels = NUMERIC_FEATURES + [TARGET_COLUMN]
    centered = data - data.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    degenerate = norms == 0.0
    for idx in np.flatnonzero(degenerate):
        warnings.warn(
            f"column {labels[idx]} has zero variance; correlations set to 0",
            stacklevel=2,
        )
    k = data.shape[1]
    corr = np.zeros((k, k), dtype=np.float64)
    safe = ~degenerate
    if safe.any():
        sub = centered[:, safe] / norms[safe]
        corr[np.ix_(safe, safe)] = np.clip(sub.T @ sub, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr, labels


def write_engagement_csv(path: str | Path, rows: list[EventEngagement]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ENGAGEMENT_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.name,
                    r.sport.value,
                    r.total_posts,
                    r.total_comments,
                    r.total_scores,
                    repr(r.avg_polarity),
                    repr(r.avg_compound),
                    repr(r.avg_viewers_millions),
                ]
            )


def load_engagement_csv(path: str | Path) -> list[EventEngagement]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != ENGAGEMENT_COLUMNS:
            raise SchemaError(
                f"{path}: header {header!r} != expected {ENGAGEMENT_COLUMNS!r}"
            )
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(ENGAGEMENT_COLUMNS):
                raise RowError(lineno, f"expected {len(ENGAGEMENT_COLUMNS)} fields")
            try:
                rows.append(
                    EventEngagement(
                        name=record[0],
                        sport=Sport.parse(record[1]),
                        total_posts=int(record[2]),
                        total_comments=int(record[3]),
                        total_scores=int(record[4]),
                        avg_polarity=float(record[5]),
                        avg_compound=float(record[6]),
                        avg_viewers_millions=float(record[7]),
                    )
                )
            except (ValueError, ValidationError) as exc:
                raise RowError(lineno, str(exc)) from exc
    return rows
