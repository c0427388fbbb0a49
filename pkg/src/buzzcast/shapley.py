"""Exact Shapley attributions for the boosted ensemble.

Interventional value function: v(S) is the mean model output over the
background with the instance's values spliced in on coalition S. Every
2^d coalition is enumerated (d <= 16), so the numbers are exact up to
float summation; no sampling, no tree-path shortcut.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .boosting import GbmEnsemble
from .errors import FeasibilityError, ShapeError, ValidationError

MAX_EXACT_FEATURES = 16

# Coalition chunk size: bounds composite-matrix memory while keeping
# prediction calls batched.
_CHUNK = 512


@dataclass(frozen=True)
class Attribution:
    """Per-feature log-space attributions for one instance."""

    base_value: float
    values: tuple[float, ...]
    feature_names: tuple[str, ...]
    instance_name: str | None = None

    def prediction_log(self) -> float:
        return self.base_value + sum(self.values)

    def phi_display(self) -> tuple[float, ...]:
        """Viewer-scale deltas: expm1(base + phi) - expm1(base), display only."""
        base = math.expm1(self.base_value)
        return tuple(math.expm1(self.base_value + v) - base for v in self.values)

    def ranks(self) -> tuple[int, ...]:
        """Rank per feature by |phi_log| descending; ties keep feature order."""
        order = sorted(
            range(len(self.values)), key=lambda j: (-abs(self.values[j]), j)
        )
        ranks = [0] * len(self.values)
        for pos, j in enumerate(order):
            ranks[j] = pos + 1
        return tuple(ranks)


def prepare_background(
    X_train: np.ndarray, cap: int = 100, seed: int = 42
) -> np.ndarray:
    """Training rows as background, seeded-sampled down to ``cap`` if larger."""
    X_train = np.asarray(X_train, dtype=np.float64)
    if X_train.ndim != 2 or X_train.shape[0] == 0:
        raise ValidationError("background must be a non-empty 2-D matrix")
    if X_train.shape[0] <= cap:
        return X_train
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(X_train.shape[0], size=cap, replace=False))
    return X_train[idx]


def _subset_values(
    ensemble: GbmEnsemble, instance: np.ndarray, background: np.ndarray
) -> np.ndarray:
    """v(S) for every coalition bitmask 0..2^d-1."""
    d = instance.shape[0]
    m = background.shape[0]
    n_subsets = 1 << d
    v = np.empty(n_subsets, dtype=np.float64)
    for start in range(0, n_subsets, _CHUNK):
        masks = range(start, min(start + _CHUNK, n_subsets))
        composite = np.tile(background, (len(masks), 1))
        for block, mask in enumerate(masks):
            if mask == 0:
                continue
            cols = [j for j in range(d) if mask >> j & 1]
            composite[block * m : (block + 1) * m, cols] = instance[cols]
        preds = ensemble.predict_log(composite).reshape(len(masks), m)
        v[start : start + len(masks)] = preds.mean(axis=1)
    return v


def shapley_values(
    ensemble: GbmEnsemble,
    instance: np.ndarray,
    background: np.ndarray,
    feature_names: Sequence[str] | None = None,
    instance_name: str | None = None,
) -> Attribution:
    """Exact Shapley attribution of the log-space prediction.

    phi_j sums w(|S|) * (v(S + j) - v(S)) over coalitions S without j, with
    w(s) = s!(d-s-1)!/d!. base_value = v(empty) = mean background prediction.
    """
    instance = np.asarray(instance, dtype=np.float64).reshape(-1)
    background = np.asarray(background, dtype=np.float64)
    if background.ndim != 2 or background.shape[0] == 0:
        raise ValidationError("background must be a non-empty 2-D matrix")
    d = instance.shape[0]
    if background.shape[1] != d:
        raise ShapeError(
            f"instance has {d} features, background has {background.shape[1]}"
        )
    if d > MAX_EXACT_FEATURES:
        raise FeasibilityError(
            f"{d} features exceeds the exact-enumeration bound "
            f"{MAX_EXACT_FEATURES}; group features (e.g. collapse one-hot "
            "columns) before attribution"
        )
    if feature_names is None:
        feature_names = ensemble.feature_names or tuple(
            f"x{j}" for j in range(d)
        )
    if len(feature_names) != d:
        raise ShapeError("feature_names length does not match instance width")
    v = _subset_values(ensemble, instance, background)
    all_masks = np.arange(1 << d)
    popcount = np.zeros(1 << d, dtype=np.int64)
    for bit in range(d):
        popcount += (all_masks >> bit) & 1
    fact = [math.factorial(i) for i in range(d + 1)]
    weights = np.array(
        [fact[s] * fact[d - s - 1] / fact[d] for s in range(d)], dtype=np.float64
    )
    phis = []
    for j in range(d):
        without = all_masks[(all_masks >> j) & 1 == 0]
        gains = v[without | (1 << j)] - v[without]
        phis.append(float(np.sum(weights[popcount[without]] * gains)))
    return Attribution(
        base_value=float(v[0]),
        values=tuple(phis),
        feature_names=tuple(feature_names),
        instance_name=instance_name,
    )


@dataclass(frozen=True)
class GlobalImportance:
    """Mean |phi| per feature over a dataset, with descending ranks."""

    feature_names: tuple[str, ...]
    values: tuple[float, ...]

    def ranks(self) -> tuple[int, ...]:
        order = sorted(
            range(len(self.values)), key=lambda j: (-self.values[j], j)
        )
        ranks = [0] * len(self.values)
        for pos, j in enumerate(order):
            ranks[j] = pos + 1
        return tuple(ranks)

    def ordered(self) -> list[tuple[str, float]]:
        pairs = list(zip(self.feature_names, self.values))
        return sorted(pairs, key=lambda p: (-p[1], self.feature_names.index(p[0])))


def global_importance(
    ensemble: GbmEnsemble,
    X: np.ndarray,
    background: np.ndarray,
    feature_names: Sequence[str] | None = None,
) -> GlobalImportance:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("need at least one row to rank importance")
    totals = np.zeros(X.shape[1], dtype=np.float64)
    names: tuple[str, ...] | None = None
    for row in X:
        attr = shapley_values(ensemble, row, background, feature_names)
        names = attr.feature_names
        totals += np.abs(np.array(attr.values))
    return GlobalImportance(
        feature_names=names, values=tuple(totals / X.shape[0])
    )


def write_attribution_csv(path: str | Path, attribution: Attribution) -> None:
    """First row carries base_value, then feature,phi_log,phi_display,rank."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    display = attribution.phi_display()
    ranks = attribution.ranks()
    order = sorted(range(len(ranks)), key=lambda j: ranks[j])
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["base_value", repr(attribution.base_value)])
        writer.writerow(["feature", "phi_log", "phi_display", "rank"])
        for j in order:
            writer.writerow(
                [
                    attribution.feature_names[j],
                    repr(attribution.values[j]),
                    repr(display[j]),
                    ranks[j],
                ]
            )
