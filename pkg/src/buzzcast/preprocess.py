"""Model-ready matrices from engagement rows.

Fixed pipeline order: per-sport IQR screen over the whole dataset (the
screen defines the dataset), then the seeded split, then scaler/encoder
fitted on the training rows only and applied to both sides. The target is
log1p-transformed; predictions invert with expm1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import PreprocessConfig
from .errors import (
    InsufficientDataError,
    ShapeError,
    StateError,
    ValidationError,
)
from .events import Sport
from .features import NUMERIC_FEATURES, Dataset, EventEngagement


def log1p_viewers(x):
    """Natural log of 1+x; rejects negative viewership."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise ValidationError("log1p target transform requires x >= 0")
    out = np.log1p(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def expm1_viewers(y):
    arr = np.asarray(y, dtype=np.float64)
    out = np.expm1(arr)
    return float(out) if np.isscalar(y) or arr.ndim == 0 else out


def tukey_fences(values: Sequence[float], k: float = 1.5) -> tuple[float, float, float, float]:
    """(q1, q3, lower fence, upper fence) with type-7 linear quartiles."""
    arr = np.asarray(values, dtype=np.float64)
    q1, q3 = np.percentile(arr, [25.0, 75.0])
    iqr = q3 - q1
    return float(q1), float(q3), float(q1 - k * iqr), float(q3 + k * iqr)


@dataclass(frozen=True)
class OutlierFlag:
    name: str
    sport: Sport
    feature: str
    value: float
    lower: float
    upper: float


def iqr_screen_by_sport(
    rows: list[EventEngagement], config: PreprocessConfig | None = None
) -> tuple[list[EventEngagement], list[OutlierFlag]]:
    """Flag rows outside per-sport Tukey fences on any numeric feature.

    Sport groups smaller than ``min_group_size`` are exempt. Returns the
    retained rows in original order plus one flag per (row, feature) hit.
    """
    config = config or PreprocessConfig()
    by_sport: dict[Sport, list[EventEngagement]] = {}
    for r in rows:
        by_sport.setdefault(r.sport, []).append(r)
    fences: dict[tuple[Sport, str], tuple[float, float]] = {}
    for sport, group in by_sport.items():
        if len(group) < config.min_group_size:
            continue
        for feat_idx, feat in enumerate(NUMERIC_FEATURES):
            values = [g.numeric_values()[feat_idx] for g in group]
            _, _, lo, hi = tukey_fences(values, config.iqr_k)
            fences[(sport, feat)] = (lo, hi)
    flags: list[OutlierFlag] = []
    flagged_names: set[str] = set()
    for r in rows:
        vals = r.numeric_values()
        for feat_idx, feat in enumerate(NUMERIC_FEATURES):
            bounds = fences.get((r.sport, feat))
            if bounds is None:
                continue
            lo, hi = bounds
            if vals[feat_idx] < lo or vals[feat_idx] > hi:
                flags.append(
                    OutlierFlag(r.name, r.sport, feat, vals[feat_idx], lo, hi)
                )
                flagged_names.add(r.name)
    kept = [r for r in rows if r.name not in flagged_names]
    if flags:
        warnings.warn(
            f"IQR screen flagged {len(flagged_names)} row(s): "
            + ", ".join(sorted(flagged_names)),
            stacklevel=2,
        )
    return kept, flags


class MinMaxScaler:
    """Per-column (x - min) / (max - min); constant columns map to 0.

    Fit on training rows only. Apply never clamps, so unseen data may land
    outside [0, 1].
    """

    def __init__(self):
        self.mins_: np.ndarray | None = None
        self.maxs_: np.ndarray | None = None

    @property
    def fitted(self) -> bool:
        return self.mins_ is not None

    def fit(self, X: np.ndarray) -> "MinMaxScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ShapeError("scaler fit needs a non-empty 2-D matrix")
        self.mins_ = X.min(axis=0)
        self.maxs_ = X.max(axis=0)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if not self.fitted:
            raise StateError("scaler used before fit")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.mins_.shape[0]:
            raise ShapeError(
                f"scaler fitted on {self.mins_.shape[0]} columns, got {X.shape}"
            )
        ranges = self.maxs_ - self.mins_
        constant = ranges == 0.0
        out = (X - self.mins_) / np.where(constant, 1.0, ranges)
        out[:, constant] = 0.0
        return out

    def to_dict(self) -> dict:
        if not self.fitted:
            raise StateError("scaler used before fit")
        return {
            "mins": [float(v) for v in self.mins_],
            "maxs": [float(v) for v in self.maxs_],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MinMaxScaler":
        scaler = cls()
        mins = np.asarray(data["mins"], dtype=np.float64)
        maxs = np.asarray(data["maxs"], dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValidationError("scaler state arrays disagree")
        if np.any(mins > maxs):
            raise ValidationError("scaler state has min > max")
        scaler.mins_ = mins
        scaler.maxs_ = maxs
        return scaler


class OneHotSportEncoder:
    """Alphabetical one-hot over training sports; unknowns get all zeros."""

    def __init__(self):
        self.categories_: tuple[str, ...] | None = None

    @property
    def fitted(self) -> bool:
        return self.categories_ is not None

    def fit(self, sports: Iterable[Sport | str]) -> "OneHotSportEncoder":
        values = {s.value if isinstance(s, Sport) else str(s) for s in sports}
        if not values:
            raise ValidationError("encoder fit needs at least one category")
        self.categories_ = tuple(sorted(values))
        return self

    def feature_names(self) -> list[str]:
        if not self.fitted:
            raise StateError("encoder used before fit")
        return [f"sport={c}" for c in self.categories_]

    def transform(self, sports: Sequence[Sport | str]) -> np.ndarray:
        if not self.fitted:
            raise StateError("encoder used before fit")
        index = {c: i for i, c in enumerate(self.categories_)}
        out = np.zeros((len(sports), len(self.categories_)), dtype=np.float64)
        for row, s in enumerate(sports):
            value = s.value if isinstance(s, Sport) else str(s)
            col = index.get(value)
            if col is None:
                warnings.warn(
                    f"unknown sport {value!r}: encoding as all zeros", stacklevel=2
                )
            else:
                out[row, col] = 1.0
        return out

    def to_dict(self) -> dict:
        if not self.fitted:
            raise StateError("encoder used before fit")
        return {"categories": list(self.categories_)}

    @classmethod
    def from_dict(cls, data: dict) -> "OneHotSportEncoder":
        cats = [str(c) for c in data["categories"]]
        if len(set(cats)) != len(cats) or cats != sorted(cats):
            raise ValidationError("encoder categories must be unique and sorted")
        enc = cls()
        enc.categories_ = tuple(cats)
        return enc


@dataclass(frozen=True)
class SplitIndices:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int

    def __post_init__(self):
        overlap = set(self.train) & set(self.test)
        if overlap:
            raise ValidationError(f"split indices overlap: {sorted(overlap)}")


def split_dataset(n: int, train_ratio: float = 0.8, seed: int = 42) -> SplitIndices:
    """Seeded permutation, then prefix/suffix split with |train| = round(r*n)."""
    if n < 5:
        raise InsufficientDataError(f"need at least 5 rows to split, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(round(train_ratio * n))
    if n_train < 1 or n_train >= n:
        raise InsufficientDataError(
            f"ratio {train_ratio} leaves an empty split for n={n}"
        )
    return SplitIndices(
        train=tuple(int(i) for i in perm[:n_train]),
        test=tuple(int(i) for i in perm[n_train:]),
        seed=seed,
    )


def design_matrix(
    numeric: np.ndarray,
    sports: Sequence[Sport | str],
    scaler: MinMaxScaler,
    encoder: OneHotSportEncoder,
) -> np.ndarray:
    return np.hstack([scaler.transform(numeric), encoder.transform(sports)])


@dataclass(frozen=True)
class PreparedRun:
    """Everything downstream of preprocessing, leakage-safe by construction."""

    dataset: Dataset
    split: SplitIndices
    scaler: MinMaxScaler
    encoder: OneHotSportEncoder
    feature_names: tuple[str, ...]
    X_train: np.ndarray
    y_train_log: np.ndarray
    X_test: np.ndarray
    y_test_log: np.ndarray
    flags: tuple[OutlierFlag, ...] = field(default=())
    dropped_zero_post: tuple[str, ...] = field(default=())

    @property
    def names_train(self) -> list[str]:
        return [self.dataset.names[i] for i in self.split.train]

    @property
    def names_test(self) -> list[str]:
        return [self.dataset.names[i] for i in self.split.test]


def prepare_run(
    rows: list[EventEngagement],
    seed: int = 42,
    config: PreprocessConfig | None = None,
) -> PreparedRun:
    """Screen, split, fit transforms on train, and build both matrices."""
    from .features import drop_zero_post_events  # local to avoid cycle noise

    config = config or PreprocessConfig()
    rows, dropped = drop_zero_post_events(rows)
    kept, flags = iqr_screen_by_sport(rows, config)
    if len(kept) < 5:
        raise InsufficientDataError(
            f"only {len(kept)} rows survive screening; need at least 5"
        )
    dataset = Dataset.from_rows(kept)
    split = split_dataset(len(dataset), config.train_ratio, seed)
    train_idx = np.array(split.train, dtype=np.intp)
    test_idx = np.array(split.test, dtype=np.intp)
    scaler = MinMaxScaler().fit(dataset.numeric[train_idx])
    encoder = OneHotSportEncoder().fit([dataset.sports[i] for i in split.train])
    feature_names = tuple(NUMERIC_FEATURES) + tuple(encoder.feature_names())
    X_train = design_matrix(
        dataset.numeric[train_idx],
        [dataset.sports[i] for i in split.train],
        scaler,
        encoder,
    )
    X_test = design_matrix(
        dataset.numeric[test_idx],
        [dataset.sports[i] for i in split.test],
        scaler,
        encoder,
    )
    return PreparedRun(
        dataset=dataset,
        split=split,
        scaler=scaler,
        encoder=encoder,
        feature_names=feature_names,
        X_train=X_train,
        y_train_log=log1p_viewers(dataset.viewers[train_idx]),
        X_test=X_test,
        y_test_log=log1p_viewers(dataset.viewers[test_idx]),
        flags=tuple(flags),
        dropped_zero_post=tuple(dropped),
    )


def run_metadata(prepared: PreparedRun) -> dict:
    """JSON-ready preprocessing report written alongside the model."""
    sports_of = [s.value for s in prepared.dataset.sports]

    def sport_counts(indices):
        counts: dict[str, int] = {}
        for i in indices:
            counts[sports_of[i]] = counts.get(sports_of[i], 0) + 1
        return dict(sorted(counts.items()))

    return {
        "seed": prepared.split.seed,
        "n_rows": len(prepared.dataset),
        "dropped_zero_post": list(prepared.dropped_zero_post),
        "outlier_flags": [
            {
                "name": f.name,
                "sport": f.sport.value,
                "feature": f.feature,
                "value": f.value,
                "lower": f.lower,
                "upper": f.upper,
            }
            for f in prepared.flags
        ],
        "scaler": prepared.scaler.to_dict(),
        "encoder": prepared.encoder.to_dict(),
        "split": {
            "train_indices": list(prepared.split.train),
            "test_indices": list(prepared.split.test),
            "train_names": prepared.names_train,
            "test_names": prepared.names_test,
            "train_sport_counts": sport_counts(prepared.split.train),
            "test_sport_counts": sport_counts(prepared.split.test),
        },
        "feature_names": list(prepared.feature_names),
        "target_transform": "log1p",
    }
