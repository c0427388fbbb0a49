"""Regression tree for least-squares boosting.

Greedy recursive splitting on squared-error gain (equivalently variance
reduction). Candidate thresholds are midpoints between consecutive distinct
sorted feature values; routing is x[feature] <= threshold to the left. Ties
in gain resolve to the lowest feature index, then the lowest threshold, so
fitting is fully deterministic.

A node with equal residuals everywhere becomes a leaf. An impure node
splits whenever any candidate threshold exists, even at zero gain; that is
what lets depth-2 trees untangle XOR-patterned residuals, where the first
cut is gainless but enables the second.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature, threshold, left, right) or leaf (value)."""

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float | None = None

    def __post_init__(self):
        if self.value is not None:
            if not (self.feature is None and self.left is None and self.right is None):
                raise ValidationError("leaf nodes carry only a value")
            if not np.isfinite(self.value):
                raise ValidationError("leaf value must be finite")
        else:
            if None in (self.feature, self.threshold, self.left, self.right):
                raise ValidationError("internal nodes need feature/threshold/children")

    @property
    def is_leaf(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        if "value" in data:
            return cls(value=float(data["value"]))
        return cls(
            feature=int(data["feature"]),
            threshold=float(data["threshold"]),
            left=cls.from_dict(data["left"]),
            right=cls.from_dict(data["right"]),
        )


def find_best_split(X: np.ndarray, y: np.ndarray) -> tuple[int, float] | None:
    """Best (feature, midpoint threshold) by squared-error gain, or None.

    For a boundary putting the first i sorted rows left, the split score is
    L^2/i + R^2/(n-i) with L, R the side sums; maximizing it minimizes the
    children's summed squared error. Scanning feature-major makes argmax's
    first-hit rule implement the documented tie-break.
    """
    n, d = X.shape
    if n < 2:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    left_sum = np.cumsum(ys, axis=0)[:-1]
    total = ys.sum(axis=0)
    left_cnt = np.arange(1, n, dtype=np.float64)[:, None]
    right_sum = total - left_sum
    score = left_sum**2 / left_cnt + right_sum**2 / (n - left_cnt)
    score[~valid] = -np.inf
    flat = int(np.argmax(score.T))
    feature, boundary = divmod(flat, n - 1)
    threshold = (xs[boundary, feature] + xs[boundary + 1, feature]) / 2.0
    return int(feature), float(threshold)


def _grow(X, y, depth, max_depth, min_samples_split) -> TreeNode:
    if (
        depth >= max_depth
        or y.shape[0] < min_samples_split
        or np.all(y == y[0])
    ):
        return TreeNode(value=float(y.mean()))
    split = find_best_split(X, y)
    if split is None:
        return TreeNode(value=float(y.mean()))
    feature, threshold = split
    mask = X[:, feature] <= threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        left=_grow(X[mask], y[mask], depth + 1, max_depth, min_samples_split),
        right=_grow(X[~mask], y[~mask], depth + 1, max_depth, min_samples_split),
    )


def fit_tree(
    X: np.ndarray, residuals: np.ndarray, max_depth: int, min_samples_split: int
) -> TreeNode:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(residuals, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"matrix {X.shape} does not match residuals {y.shape}")
    if X.shape[0] == 0:
        raise ValidationError("fit_tree needs at least one sample")
    if max_depth < 1:
        raise ValidationError("max_depth must be >= 1")
    if min_samples_split < 2:
        raise ValidationError("min_samples_split must be >= 2")
    return _grow(X, y, 0, max_depth, min_samples_split)


def predict_tree(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Batch prediction by iterative index masking."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("predict_tree expects a 2-D matrix")
    out = np.empty(X.shape[0], dtype=np.float64)
    stack: list[tuple[TreeNode, np.ndarray]] = [
        (node, np.arange(X.shape[0], dtype=np.intp))
    ]
    while stack:
        nd, idx = stack.pop()
        if idx.size == 0:
            continue
        if nd.is_leaf:
            out[idx] = nd.value
        else:
            mask = X[idx, nd.feature] <= nd.threshold
            stack.append((nd.left, idx[mask]))
            stack.append((nd.right, idx[~mask]))
    return out


def tree_depth(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def leaf_count(node: TreeNode) -> int:
    if node.is_leaf:
        return 1
    return leaf_count(node.left) + leaf_count(node.right)
