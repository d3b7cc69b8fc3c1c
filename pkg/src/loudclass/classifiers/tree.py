"""Binary CART trees shared by the tree, forest, and boosting classifiers.

Split search is exhaustive over midpoints between consecutive distinct
feature values. Equal-gain ties resolve to the lowest feature index, then
the lowest threshold, which makes every build deterministic. Classification
uses entropy gain on 0/1 targets; regression uses squared-error reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ConfigurationError


@dataclass
class TreeNode:
    """Internal node (feature/threshold set) or leaf (value set)."""

    value: float
    n_samples: int
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_jsonable(self) -> dict:
        if self.is_leaf:
            return {"value": self.value, "n": self.n_samples}
        return {
            "value": self.value,
            "n": self.n_samples,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_jsonable(),
            "right": self.right.to_jsonable(),
        }

    @classmethod
    def from_jsonable(cls, payload: dict) -> "TreeNode":
        node = cls(value=payload["value"], n_samples=payload["n"])
        if "feature" in payload:
            node.feature = payload["feature"]
            node.threshold = payload["threshold"]
            node.left = cls.from_jsonable(payload["left"])
            node.right = cls.from_jsonable(payload["right"])
        return node


_GAIN_EPS = 1e-12


def _entropy_from_counts(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    p = np.divide(pos, total, out=np.zeros_like(pos, dtype=np.float64), where=total > 0)
    q = 1.0 - p
    h = np.zeros_like(p)
    mask = p > 0
    h[mask] -= p[mask] * np.log2(p[mask])
    mask = q > 0
    h[mask] -= q[mask] * np.log2(q[mask])
    return h


def _best_split_entropy(x: np.ndarray, y: np.ndarray):
    """Best (gain, threshold) for one feature, or None if unsplittable."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    boundary = np.flatnonzero(np.diff(xs) != 0)  # split after these positions
    if boundary.size == 0:
        return None
    n = len(xs)
    pos_cum = np.cumsum(ys)
    n_left = (boundary + 1).astype(np.float64)
    n_right = n - n_left
    pos_left = pos_cum[boundary]
    pos_right = pos_cum[-1] - pos_left
    h_parent = _entropy_from_counts(np.array([pos_cum[-1]]), np.array([float(n)]))[0]
    h_left = _entropy_from_counts(pos_left, n_left)
    h_right = _entropy_from_counts(pos_right, n_right)
    gains = h_parent - (n_left * h_left + n_right * h_right) / n
    best = int(np.argmax(gains))  # first maximum = lowest threshold
    if gains[best] <= _GAIN_EPS:
        return None
    threshold = (xs[boundary[best]] + xs[boundary[best] + 1]) / 2.0
    return float(gains[best]), float(threshold)


def _best_split_mse(x: np.ndarray, y: np.ndarray):
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    boundary = np.flatnonzero(np.diff(xs) != 0)
    if boundary.size == 0:
        return None
    n = len(xs)
    s_cum = np.cumsum(ys)
    s2_cum = np.cumsum(ys * ys)
    n_left = (boundary + 1).astype(np.float64)
    n_right = n - n_left
    s_left = s_cum[boundary]
    s_right = s_cum[-1] - s_left
    sse_left = s2_cum[boundary] - s_left * s_left / n_left
    sse_right = (s2_cum[-1] - s2_cum[boundary]) - s_right * s_right / n_right
    sse_parent = s2_cum[-1] - s_cum[-1] * s_cum[-1] / n
    gains = sse_parent - (sse_left + sse_right)
    best = int(np.argmax(gains))
    if gains[best] <= _GAIN_EPS:
        return None
    threshold = (xs[boundary[best]] + xs[boundary[best] + 1]) / 2.0
    return float(gains[best]), float(threshold)


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    criterion: str,
    min_samples_split: int = 2,
    max_depth: int | None = None,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
    leaf_value: Callable[[np.ndarray], float] | None = None,
) -> TreeNode:
    """Grow a tree on ``(X, y)``.

    ``max_features`` draws that many candidate features per split from
    ``rng`` (the forest's subsampling); both default to using every feature.
    ``leaf_value`` maps the sample indices of a leaf to its payload and
    defaults to the target mean (positive fraction on 0/1 targets).
    """
    if criterion == "entropy":
        split_fn = _best_split_entropy
    elif criterion == "mse":
        split_fn = _best_split_mse
    else:
        raise ConfigurationError(f"criterion must be 'entropy' or 'mse', got {criterion!r}")
    if max_features is not None and rng is None:
        raise ConfigurationError("feature subsampling needs an rng")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if leaf_value is None:
        leaf_value = lambda idx: float(y[idx].mean())
    indices = np.arange(len(y))
    return _grow(
        X, y, indices, split_fn, min_samples_split, max_depth, max_features, rng,
        leaf_value, depth=0,
    )


def _grow(X, y, indices, split_fn, min_samples_split, max_depth, max_features, rng,
          leaf_value, depth) -> TreeNode:
    node = TreeNode(value=leaf_value(indices), n_samples=len(indices))
    if len(indices) < min_samples_split:
        return node
    if max_depth is not None and depth >= max_depth:
        return node

    if max_features is None:
        candidates = range(X.shape[1])
    else:
        k = min(max_features, X.shape[1])
        # Sorted so the lowest-index tie-break is independent of draw order.
        candidates = np.sort(rng.choice(X.shape[1], size=k, replace=False))

    best = None  # (gain, feature, threshold)
    y_node = y[indices]
    for f in candidates:
        found = split_fn(X[indices, f], y_node)
        if found is None:
            continue
        gain, threshold = found
        if best is None or gain > best[0]:
            best = (gain, int(f), threshold)
    if best is None:
        return node

    _, feature, threshold = best
    mask = X[indices, feature] <= threshold
    left_idx = indices[mask]
    right_idx = indices[~mask]
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X, y, left_idx, split_fn, min_samples_split, max_depth,
                      max_features, rng, leaf_value, depth + 1)
    node.right = _grow(X, y, right_idx, split_fn, min_samples_split, max_depth,
                       max_features, rng, leaf_value, depth + 1)
    return node


def tree_predict(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Leaf value per row."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(len(X), dtype=np.float64)
    _route(node, X, np.arange(len(X)), out)
    return out


def _route(node: TreeNode, X, indices, out) -> None:
    if node.is_leaf:
        out[indices] = node.value
        return
    mask = X[indices, node.feature] <= node.threshold
    _route(node.left, X, indices[mask], out)
    _route(node.right, X, indices[~mask], out)


class DecisionTreeBinary:
    """Entropy CART for one one-vs-rest problem; score = leaf positive fraction."""

    def __init__(self, *, min_samples_split: int = 5, seed: int = 0):
        self.min_samples_split = min_samples_split
        self.seed = seed  # kept for interface parity; growth is deterministic
        self.tree_: TreeNode | None = None

    def fit(self, X, y01) -> "DecisionTreeBinary":
        self.tree_ = build_tree(
            X, y01, criterion="entropy", min_samples_split=self.min_samples_split
        )
        return self

    def predict_score(self, X) -> np.ndarray:
        if self.tree_ is None:
            raise ConfigurationError("tree is not fitted")
        return tree_predict(self.tree_, X)

    def to_jsonable(self) -> dict:
        return {
            "min_samples_split": self.min_samples_split,
            "seed": self.seed,
            "tree": self.tree_.to_jsonable(),
        }

    @classmethod
    def from_jsonable(cls, payload: dict) -> "DecisionTreeBinary":
        model = cls(min_samples_split=payload["min_samples_split"], seed=payload["seed"])
        model.tree_ = TreeNode.from_jsonable(payload["tree"])
        return model
