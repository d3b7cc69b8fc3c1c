"""Post-hoc explainability: exact Shapley values and permutation importance.

With 12 features the 2^12 = 4096 coalitions are enumerated outright, so
Shapley values are exact (no sampling) and the additivity, symmetry, and
null-player axioms hold to floating-point precision. The value function
is the interventional expectation over a background sample: features in
the coalition come from the explained record, the rest from each
background row in turn, and model outputs are averaged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .classifiers import TrainedModel
from .errors import ConfigurationError, ShapeError
from .loudness import FEATURE_NAMES
from .metrics import accuracy, balanced_accuracy

# 2^16 coalition evaluations is the ceiling before enumeration cost
# stops being "feasible by construction".
_MAX_EXACT_FEATURES = 16

PERMUTATION_METRICS = ("balanced_accuracy", "accuracy")


def default_feature_names(n_features: int) -> list[str]:
    if n_features == len(FEATURE_NAMES):
        return list(FEATURE_NAMES)
    return [f"x{i}" for i in range(n_features)]


@dataclass(frozen=True)
class ShapExplanation:
    """Per-record, per-feature signed contributions in model-output units."""

    feature_names: tuple[str, ...]
    values: np.ndarray
    base_values: np.ndarray
    feature_values: np.ndarray

    def __post_init__(self) -> None:
        for name in ("values", "base_values", "feature_values"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n, d = self.values.shape
        if self.feature_values.shape != (n, d):
            raise ShapeError("feature_values must match the values matrix")
        if self.base_values.shape != (n,):
            raise ShapeError("base_values must have one entry per record")
        if len(self.feature_names) != d:
            raise ShapeError("feature_names must match the feature count")

    @property
    def n_records(self) -> int:
        return self.values.shape[0]


@lru_cache(maxsize=4)
def _coalition_tables(d: int):
    """Masks plus, per feature, the paired coalition indices and weights."""
    n_masks = 1 << d
    masks = ((np.arange(n_masks)[:, None] >> np.arange(d)) & 1).astype(bool)
    sizes = masks.sum(axis=1)
    fact = [math.factorial(s) for s in range(d + 1)]
    size_weight = np.array(
        [fact[s] * fact[d - 1 - s] / fact[d] for s in range(d)]
    )
    per_feature = []
    for i in range(d):
        without = np.flatnonzero(~masks[:, i])
        per_feature.append((without, without + (1 << i), size_weight[sizes[without]]))
    return masks, per_feature


def _coalition_values(f, record: np.ndarray, background: np.ndarray) -> np.ndarray:
    """v(S) for every coalition: shape (2^d,) or (2^d, C) for vector f."""
    d = record.shape[0]
    masks, _ = _coalition_tables(d)
    composites = np.where(masks[:, None, :], record, background[None, :, :])
    out = np.asarray(f(composites.reshape(-1, d)), dtype=np.float64)
    n_bg = background.shape[0]
    if out.ndim == 1:
        return out.reshape(len(masks), n_bg).mean(axis=1)
    return out.reshape(len(masks), n_bg, out.shape[1]).mean(axis=1)


def _phi_from_values(v: np.ndarray, d: int) -> np.ndarray:
    """Weighted marginal contributions; works on (2^d,) or (2^d, C) values."""
    _, per_feature = _coalition_tables(d)
    phi = [weights @ (v[with_i] - v[without]) for without, with_i, weights in per_feature]
    return np.array(phi)


def _check_shapley_inputs(record, background):
    record = np.asarray(record, dtype=np.float64)
    background = np.asarray(background, dtype=np.float64)
    if record.ndim != 1:
        raise ShapeError("record must be a 1-d feature vector")
    if background.ndim != 2 or background.shape[1] != record.shape[0]:
        raise ShapeError("background must be 2-d with the record's feature count")
    if background.shape[0] == 0:
        raise ConfigurationError("background set must be non-empty")
    if record.shape[0] > _MAX_EXACT_FEATURES:
        raise ConfigurationError(
            f"exact enumeration supports at most {_MAX_EXACT_FEATURES} features"
        )
    return record, background


def exact_shapley(f, record, background) -> tuple[np.ndarray, float]:
    """Exact Shapley values of a scalar output function for one record.

    Returns (phi, base) where base is the expected output over the
    background (the empty coalition) and base + phi.sum() equals the mean
    output on the full record.
    """
    record, background = _check_shapley_inputs(record, background)
    v = _coalition_values(f, record, background)
    return _phi_from_values(v, record.shape[0]), float(v[0])


def class_agnostic_shapley(model: TrainedModel, record, background):
    """Shapley values per OvR class score, plus their across-class mean.

    Returns (mean_phi, mean_base, per_class) with per_class mapping each
    class label to its (phi, base) pair.
    """
    record, background = _check_shapley_inputs(record, background)
    v = _coalition_values(model.predict_proba, record, background)
    phi = _phi_from_values(v, record.shape[0])
    per_class = {
        cls: (phi[:, ci].copy(), float(v[0, ci]))
        for ci, cls in enumerate(model.classes)
    }
    return phi.mean(axis=1), float(v[0].mean()), per_class


def explain_model(
    model: TrainedModel, X, background, *, feature_names=None
) -> tuple[ShapExplanation, dict]:
    """Explain every row of X; returns the class-agnostic explanation and a
    per-class dict of explanations sharing the same feature values."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("expected a 2-d feature matrix")
    n, d = X.shape
    names = tuple(feature_names) if feature_names else tuple(default_feature_names(d))
    classes = list(model.classes)
    n_classes = len(classes)

    agnostic_values = np.empty((n, d))
    agnostic_base = np.empty(n)
    class_values = np.empty((n_classes, n, d))
    class_base = np.empty((n_classes, n))
    for r in range(n):
        mean_phi, mean_base, per_class = class_agnostic_shapley(
            model, X[r], background
        )
        agnostic_values[r] = mean_phi
        agnostic_base[r] = mean_base
        for ci, cls in enumerate(classes):
            phi, base = per_class[cls]
            class_values[ci, r] = phi
            class_base[ci, r] = base

    agnostic = ShapExplanation(names, agnostic_values, agnostic_base, X.copy())
    by_class = {
        cls: ShapExplanation(names, class_values[ci], class_base[ci], X.copy())
        for ci, cls in enumerate(classes)
    }
    return agnostic, by_class


def beeswarm_ranking(explanation: ShapExplanation) -> list[int]:
    """Feature indices by mean |value| descending, names ascending on ties."""
    mean_abs = np.abs(explanation.values).mean(axis=0)
    return sorted(
        range(len(explanation.feature_names)),
        key=lambda i: (-mean_abs[i], explanation.feature_names[i]),
    )


def beeswarm_export(explanation: ShapExplanation, record_ids=None) -> list[dict]:
    """Long-format plot rows: one per (record, feature), importance-ranked."""
    n = explanation.n_records
    if record_ids is None:
        record_ids = list(range(n))
    record_ids = list(record_ids)
    if len(record_ids) != n:
        raise ShapeError("record_ids must match the record count")
    rows = []
    for rank, fi in enumerate(beeswarm_ranking(explanation), start=1):
        for r in range(n):
            rows.append(
                {
                    "record_id": record_ids[r],
                    "feature": explanation.feature_names[fi],
                    "shap_value": float(explanation.values[r, fi]),
                    "feature_value": float(explanation.feature_values[r, fi]),
                    "rank": rank,
                }
            )
    return rows


@dataclass(frozen=True)
class SplitImportance:
    """Permutation results for one split: baseline and per-feature decreases."""

    split: str
    metric: str
    baseline: float
    decreases: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.decreases, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "decreases", arr)

    def median_decrease(self) -> np.ndarray:
        return np.median(self.decreases, axis=1)


@dataclass(frozen=True)
class PermutationImportanceReport:
    feature_names: tuple[str, ...]
    metric: str
    splits: tuple[SplitImportance, ...]

    def split(self, name: str) -> SplitImportance:
        for s in self.splits:
            if s.split == name:
                return s
        raise KeyError(name)


def _score(model: TrainedModel, X, y, metric: str) -> float:
    predicted = model.predict(X)
    if metric == "balanced_accuracy":
        return balanced_accuracy(y, predicted)
    return accuracy(y, predicted)


def permutation_importance(
    model: TrainedModel,
    X,
    y,
    *,
    repeats: int = 10,
    metric: str = "balanced_accuracy",
    seed: int = 0,
    split: str = "test",
) -> SplitImportance:
    """Per-feature score drop when that column is shuffled, repeated.

    Shuffle streams are keyed by (seed, feature, repeat), so results do
    not depend on evaluation order. Negative decreases are legitimate:
    shuffling can accidentally help.
    """
    if metric not in PERMUTATION_METRICS:
        raise ConfigurationError(
            f"metric must be one of {', '.join(PERMUTATION_METRICS)}"
        )
    if repeats < 1:
        raise ConfigurationError("repeats must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("expected a 2-d feature matrix")
    y = list(y)
    if len(y) != X.shape[0]:
        raise ShapeError(f"{X.shape[0]} feature rows but {len(y)} labels")

    baseline = _score(model, X, y, metric)
    n, d = X.shape
    decreases = np.empty((d, repeats))
    for fi in range(d):
        for rep in range(repeats):
            rng = np.random.default_rng(np.random.SeedSequence([seed, fi, rep]))
            shuffled = X.copy()
            shuffled[:, fi] = X[rng.permutation(n), fi]
            decreases[fi, rep] = baseline - _score(model, shuffled, y, metric)
    return SplitImportance(split, metric, baseline, decreases)


def importance_report(
    model: TrainedModel,
    X_train,
    y_train,
    X_test,
    y_test,
    *,
    repeats: int = 10,
    metric: str = "balanced_accuracy",
    seed: int = 0,
    feature_names=None,
) -> PermutationImportanceReport:
    """Permutation importance on the training and test splits."""
    d = np.asarray(X_train).shape[1]
    names = tuple(feature_names) if feature_names else tuple(default_feature_names(d))
    train = permutation_importance(
        model, X_train, y_train, repeats=repeats, metric=metric, seed=seed,
        split="train",
    )
    test = permutation_importance(
        model, X_test, y_test, repeats=repeats, metric=metric, seed=seed,
        split="test",
    )
    return PermutationImportanceReport(names, metric, (train, test))
