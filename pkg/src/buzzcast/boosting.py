"""Gradient-boosted regression trees with CV grid search and a JSON model file.

Least-squares boosting: start from the training-target mean (log space),
then repeatedly fit a shallow tree to current residuals and step predictions
by the learning rate. Subsampling draws floor(subsample*n) distinct rows per
round from a seeded generator; subsample = 1.0 draws nothing and uses every
row, so results are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    InsufficientDataError,
    ShapeError,
    StateError,
    ValidationError,
)
from .features import EventEngagement
from .preprocess import MinMaxScaler, OneHotSportEncoder, design_matrix, expm1_viewers
from .tree import TreeNode, fit_tree, predict_tree

MODEL_FORMAT_VERSION = "buzzcast-model/1"

GRID_FIELD_ORDER = (
    "n_estimators",
    "learning_rate",
    "max_depth",
    "min_samples_split",
    "subsample",
)


@dataclass(frozen=True)
class HyperParams:
    n_estimators: int = 100
    learning_rate: float = 0.05
    max_depth: int = 3
    min_samples_split: int = 2
    subsample: float = 1.0

    def __post_init__(self):
        if self.n_estimators < 0:
            raise ValidationError("n_estimators must be >= 0")
        if self.learning_rate < 0:
            raise ValidationError("learning_rate must be >= 0")
        if self.max_depth < 1:
            raise ValidationError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ValidationError("min_samples_split must be >= 2")
        if not 0 < self.subsample <= 1:
            raise ValidationError("subsample must lie in (0, 1]")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in GRID_FIELD_ORDER}

    @classmethod
    def from_dict(cls, data: dict) -> "HyperParams":
        return cls(
            n_estimators=int(data["n_estimators"]),
            learning_rate=float(data["learning_rate"]),
            max_depth=int(data["max_depth"]),
            min_samples_split=int(data["min_samples_split"]),
            subsample=float(data["subsample"]),
        )


def default_grid() -> list[HyperParams]:
    """The default search grid: 2 x 1 x 2 x 2 x 2 = 16 combinations."""
    axes = {
        "n_estimators": [100, 200],
        "learning_rate": [0.05],
        "max_depth": [3, 5],
        "min_samples_split": [2, 5],
        "subsample": [0.8, 1.0],
    }
    return [
        HyperParams(**dict(zip(GRID_FIELD_ORDER, combo)))
        for combo in itertools.product(*(axes[k] for k in GRID_FIELD_ORDER))
    ]


@dataclass(frozen=True)
class GbmEnsemble:
    """Fitted booster plus the preprocessing states needed to serve it.

    ``scaler`` and ``encoder`` are None for bare fits (CV folds); a model
    destined for the model file must carry both.
    """

    init_value: float
    learning_rate: float
    trees: tuple[TreeNode, ...]
    feature_names: tuple[str, ...] | None = None
    scaler: MinMaxScaler | None = None
    encoder: OneHotSportEncoder | None = None
    target_transform: str = "log1p"
    hyperparams: HyperParams | None = None
    seed: int | None = None
    loss_trace: tuple[float, ...] = field(default=(), compare=False)

    def _check_width(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ShapeError("prediction expects a 2-D matrix")
        if self.feature_names is not None and X.shape[1] != len(self.feature_names):
            raise ShapeError(
                f"matrix has {X.shape[1]} columns, model expects "
                f"{len(self.feature_names)}"
            )
        return X

    def predict_log(self, X: np.ndarray) -> np.ndarray:
        X = self._check_width(X)
        out = np.full(X.shape[0], self.init_value, dtype=np.float64)
        for tree in self.trees:
            out += self.learning_rate * predict_tree(tree, X)
        return out

    def predict_viewers(self, X: np.ndarray) -> np.ndarray:
        viewers = expm1_viewers(self.predict_log(X))
        negative = viewers < 0
        if np.any(negative):
            warnings.warn(
                f"{int(negative.sum())} prediction(s) below zero clamped to 0",
                stacklevel=2,
            )
            viewers = np.where(negative, 0.0, viewers)
        return viewers

    def predict_event(self, row: EventEngagement) -> float:
        """Viewership prediction for one engagement row, millions."""
        if self.scaler is None or self.encoder is None:
            raise StateError("ensemble lacks scaler/encoder states")
        X = design_matrix(
            np.array([row.numeric_values()]), [row.sport], self.scaler, self.encoder
        )
        return float(self.predict_viewers(X)[0])

    def with_states(
        self,
        feature_names: Sequence[str],
        scaler: MinMaxScaler,
        encoder: OneHotSportEncoder,
    ) -> "GbmEnsemble":
        return replace(
            self,
            feature_names=tuple(feature_names),
            scaler=scaler,
            encoder=encoder,
        )


def fit_gbm(
    X: np.ndarray,
    y_log: np.ndarray,
    params: HyperParams,
    seed,
) -> GbmEnsemble:
    """Fit the booster on log-space targets; records a per-round MSE trace.

    ``seed`` feeds numpy's default_rng and may be an int or a sequence (the
    CV loop derives per-fit seeds that way).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y_log, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"matrix {X.shape} does not match targets {y.shape}")
    n = X.shape[0]
    if n < 2:
        raise ValidationError(f"fit needs at least 2 rows, got {n}")
    rng = np.random.default_rng(seed)
    init = float(y.mean())
    pred = np.full(n, init, dtype=np.float64)
    trees: list[TreeNode] = []
    trace: list[float] = []
    for _ in range(params.n_estimators):
        residuals = y - pred
        if params.subsample < 1.0:
            k = max(1, math.floor(params.subsample * n))
            idx = rng.choice(n, size=k, replace=False)
            tree = fit_tree(
                X[idx], residuals[idx], params.max_depth, params.min_samples_split
            )
        else:
            tree = fit_tree(X, residuals, params.max_depth, params.min_samples_split)
        trees.append(tree)
        pred += params.learning_rate * predict_tree(tree, X)
        trace.append(float(np.mean((y - pred) ** 2)))
    return GbmEnsemble(
        init_value=init,
        learning_rate=params.learning_rate,
        trees=tuple(trees),
        hyperparams=params,
        seed=seed if isinstance(seed, int) else None,
        loss_trace=tuple(trace),
    )


@dataclass(frozen=True)
class CvResult:
    params: HyperParams
    fold_maes: tuple[float, ...]
    mean_mae: float
    rank: int


def cv_folds(n: int, k: int, seed: int) -> list[np.ndarray]:
    """k near-equal contiguous blocks of one seeded permutation of range(n)."""
    if n < k:
        raise InsufficientDataError(f"cannot make {k} folds from {n} rows")
    perm = np.random.default_rng(seed).permutation(n)
    base, rem = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        folds.append(perm[start : start + size])
        start += size
    return folds


def grid_search_cv(
    X: np.ndarray,
    y_log: np.ndarray,
    grid: Sequence[HyperParams] | None = None,
    k: int = 5,
    seed: int = 42,
) -> tuple[HyperParams, list[CvResult]]:
    """Mean held-out MAE (log space) per combination over shared seeded folds.

    Best = smallest mean MAE; exact ties keep the earlier grid entry. Each
    fold fit gets its own derived seed so subsampling never couples folds.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y_log, dtype=np.float64)
    grid = list(grid) if grid is not None else default_grid()
    if not grid:
        raise ValidationError("grid must contain at least one combination")
    folds = cv_folds(X.shape[0], k, seed)
    all_idx = np.arange(X.shape[0])
    scored: list[tuple[HyperParams, tuple[float, ...], float]] = []
    for combo_idx, params in enumerate(grid):
        fold_maes = []
        for fold_idx, held in enumerate(folds):
            train = np.setdiff1d(all_idx, held, assume_unique=False)
            model = fit_gbm(
                X[train], y[train], params, seed=[seed, combo_idx, fold_idx]
            )
            pred = model.predict_log(X[held])
            fold_maes.append(float(np.mean(np.abs(pred - y[held]))))
        fold_maes = tuple(fold_maes)
        scored.append((params, fold_maes, float(np.mean(fold_maes))))
    order = sorted(range(len(scored)), key=lambda i: (scored[i][2], i))
    ranks = {pos: r + 1 for r, pos in enumerate(order)}
    results = [
        CvResult(params=p, fold_maes=fm, mean_mae=mm, rank=ranks[i])
        for i, (p, fm, mm) in enumerate(scored)
    ]
    best = results[order[0]].params
    return best, results


def write_cv_table(path: str | Path, results: Sequence[CvResult]) -> None:
    """cv_table.csv sorted by rank; floats use repr for exact round-trips."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    k = len(results[0].fold_maes) if results else 0
    header = (
        ["rank"]
        + list(GRID_FIELD_ORDER)
        + [f"fold{i + 1}_mae" for i in range(k)]
        + ["mean_mae"]
    )
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for res in sorted(results, key=lambda r: r.rank):
            p = res.params
            writer.writerow(
                [res.rank]
                + [p.n_estimators, repr(p.learning_rate), p.max_depth,
                   p.min_samples_split, repr(p.subsample)]
                + [repr(m) for m in res.fold_maes]
                + [repr(res.mean_mae)]
            )


def save_model(path: str | Path, ensemble: GbmEnsemble) -> None:
    if ensemble.feature_names is None or ensemble.scaler is None or ensemble.encoder is None:
        raise StateError("model file requires feature names and fitted states")
    if ensemble.hyperparams is None:
        raise StateError("model file requires hyperparameters")
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "init_value": ensemble.init_value,
        "learning_rate": ensemble.learning_rate,
        "trees": [t.to_dict() for t in ensemble.trees],
        "feature_names": list(ensemble.feature_names),
        "scaler": ensemble.scaler.to_dict(),
        "encoder": ensemble.encoder.to_dict(),
        "target_transform": ensemble.target_transform,
        "hyperparams": ensemble.hyperparams.to_dict(),
        "seed": ensemble.seed,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def load_model(path: str | Path) -> GbmEnsemble:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValidationError(
            f"{path}: expected model format {MODEL_FORMAT_VERSION!r}, "
            f"got {doc.get('version')!r}"
        )
    if doc.get("target_transform") != "log1p":
        raise ValidationError(f"{path}: unsupported target transform")
    try:
        scaler = MinMaxScaler.from_dict(doc["scaler"])
        encoder = OneHotSportEncoder.from_dict(doc["encoder"])
        feature_names = tuple(str(f) for f in doc["feature_names"])
        ensemble = GbmEnsemble(
            init_value=float(doc["init_value"]),
            learning_rate=float(doc["learning_rate"]),
            trees=tuple(TreeNode.from_dict(t) for t in doc["trees"]),
            feature_names=feature_names,
            scaler=scaler,
            encoder=encoder,
            target_transform="log1p",
            hyperparams=HyperParams.from_dict(doc["hyperparams"]),
            seed=doc.get("seed"),
        )
    except KeyError as exc:
        raise ValidationError(f"{path}: missing model field {exc}") from exc
    width = scaler.mins_.shape[0] + len(encoder.categories_)
    if width != len(feature_names):
        raise ValidationError(
            f"{path}: states imply {width} features, file lists {len(feature_names)}"
        )
    return ensemble
