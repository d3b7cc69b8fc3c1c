"""Cross-validation experiment runner and the roving sweep.

One experiment = one shared fold plan, all requested classifier variants
fitted per fold, train/test balanced accuracy and weighted F1 collected,
plus confusion/ROC/PR detail for a designated classifier pooled over its
out-of-fold predictions. Pairwise t-tests compare classifiers on the
paired per-fold test scores, which is only valid because the fold plan
is shared.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .classifiers import VARIANTS, ClassifierSpec, TrainedModel, fit
from .errors import ConfigurationError, LoudclassError
from .explain import (
    PERMUTATION_METRICS,
    PermutationImportanceReport,
    importance_report,
)
from .loudness import FEATURE_NAMES
from .metrics import (
    ConfusionMatrix,
    balanced_accuracy,
    confusion,
    f1_per_class,
    micro_average_ovr,
    paired_t_test,
    pr_curve,
    roc_curve,
    weighted_f1,
)
from .pipeline import (
    RovingConfig,
    SyntheticConfig,
    apply_roving,
    feature_matrix,
    generate_synthetic,
    labels_of,
    load_labeled_json,
)

DEFAULT_ROVING_CONDITIONS = (
    (0.0, 0.0),
    (5.0, 5.0),
    (5.0, 10.0),
    (10.0, 5.0),
    (10.0, 10.0),
)


def default_classifier_specs() -> tuple[ClassifierSpec, ...]:
    return tuple(ClassifierSpec(variant) for variant in VARIANTS)


@dataclass(frozen=True)
class FoldPlan:
    """Fold index per record; sizes balanced to within one record."""

    k: int
    stratified: bool
    seed: int
    assignments: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.assignments, dtype=np.intp)
        arr.setflags(write=False)
        object.__setattr__(self, "assignments", arr)

    def fold_indices(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, test

    def __iter__(self):
        for fold in range(self.k):
            yield self.fold_indices(fold)


def kfold_split(labels, k: int = 10, stratified: bool = True, seed: int = 0) -> FoldPlan:
    """Deal records into k folds, cyclically per class when stratified.

    The dealing offset carries over from one class to the next, so the
    leftover records of each class land on different folds and overall
    fold sizes stay within 1 of each other, as do per-class counts.
    """
    labels = list(labels)
    n = len(labels)
    if k < 2:
        raise ConfigurationError("k must be >= 2")
    if n < k:
        raise ConfigurationError(f"need at least k={k} records, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    assignments = np.empty(n, dtype=np.intp)
    if not stratified:
        order = rng.permutation(n)
        assignments[order] = np.arange(n) % k
        return FoldPlan(k, stratified, seed, assignments)

    try:
        classes = sorted(set(labels))
    except TypeError:
        classes = sorted(set(labels), key=str)
    offset = 0
    for cls in classes:
        idx = np.flatnonzero(np.array([label == cls for label in labels]))
        idx = idx[rng.permutation(len(idx))]
        assignments[idx] = (offset + np.arange(len(idx))) % k
        offset = (offset + len(idx)) % k
    return FoldPlan(k, stratified, seed, assignments)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; the master seed fixes all derived streams."""

    synthetic: SyntheticConfig | None = None
    data_path: str | None = None
    roving: RovingConfig | None = None
    classifiers: tuple[ClassifierSpec, ...] = field(
        default_factory=default_classifier_specs
    )
    k: int = 10
    stratified: bool = True
    repeats: int = 1
    designated: str = "lr"
    seed: int = 0
    rove_seed: int = 0
    perm_repeats: int = 10
    perm_metric: str = "balanced_accuracy"

    def __post_init__(self) -> None:
        object.__setattr__(self, "classifiers", tuple(self.classifiers))
        if not self.classifiers:
            raise ConfigurationError("at least one classifier is required")
        if self.k < 2:
            raise ConfigurationError("k must be >= 2")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1")
        if self.perm_metric not in PERMUTATION_METRICS:
            raise ConfigurationError(
                f"perm_metric must be one of {', '.join(PERMUTATION_METRICS)}"
            )


def classifier_names(specs) -> list[str]:
    """Unique display names; duplicate variants get #2, #3 suffixes."""
    counts: Counter[str] = Counter()
    names = []
    for spec in specs:
        counts[spec.variant] += 1
        n = counts[spec.variant]
        names.append(spec.variant if n == 1 else f"{spec.variant}#{n}")
    return names


@dataclass(frozen=True)
class ClassifierResult:
    """Per-fold scores for one classifier, folds ordered plan-major."""

    name: str
    variant: str
    train_ba: tuple[float, ...]
    test_ba: tuple[float, ...]
    train_wf1: tuple[float, ...]
    test_wf1: tuple[float, ...]
    per_class_f1: dict

    def mean_sd(self, values: tuple[float, ...]) -> tuple[float, float]:
        arr = np.asarray(values)
        sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        return float(arr.mean()), sd


@dataclass(frozen=True)
class DesignatedDetail:
    """Pooled out-of-fold detail for the designated classifier (first
    repetition only when CV is repeated)."""

    name: str
    classes: tuple
    confusion_counts: ConfusionMatrix
    confusion_by_predicted: ConfusionMatrix
    roc_curves: dict
    roc_auc: dict
    pr_curves: dict
    pr_ap: dict

    @property
    def micro_auc(self) -> float:
        return self.roc_auc["micro"]

    @property
    def micro_ap(self) -> float:
        return self.pr_ap["micro"]


@dataclass(frozen=True)
class MetricsReport:
    config: ExperimentConfig
    classes: tuple
    fold_plans: tuple[FoldPlan, ...]
    results: tuple[ClassifierResult, ...]
    designated: DesignatedDetail
    t_tests: dict

    def result(self, name: str) -> ClassifierResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _with_stage(stage: str, exc: LoudclassError) -> LoudclassError:
    note = f"stage: {stage}"
    if hasattr(exc, "add_note"):
        exc.add_note(note)
    else:  # pre-3.11: mirror the __notes__ convention by hand
        notes = getattr(exc, "__notes__", None)
        if notes is None:
            notes = []
            exc.__notes__ = notes
        notes.append(note)
    return exc


def resolve_records(cfg: ExperimentConfig, records=None) -> list:
    """Explicit records win; otherwise generate synthetic or load a file."""
    if records is not None:
        return list(records)
    if cfg.synthetic is not None:
        return generate_synthetic(cfg.synthetic)
    if cfg.data_path is not None:
        return load_labeled_json(cfg.data_path)
    raise ConfigurationError(
        "no data source: provide records, a synthetic config, or a data path"
    )


def _plan_seed(seed: int, repeat: int) -> int:
    return int(np.random.SeedSequence([seed, repeat]).generate_state(1)[0])


def make_fold_plans(cfg: ExperimentConfig, labels) -> tuple[FoldPlan, ...]:
    return tuple(
        kfold_split(labels, cfg.k, cfg.stratified, seed=_plan_seed(cfg.seed, r))
        for r in range(cfg.repeats)
    )


def _designated_detail(name, classes, y, proba, predicted) -> DesignatedDetail:
    counts = confusion(y, predicted, classes=classes, normalize="none")
    normalized = confusion(y, predicted, classes=classes, normalize="by_predicted")
    roc_curves: dict = {}
    roc_auc: dict = {}
    pr_curves: dict = {}
    pr_ap: dict = {}
    for ci, cls in enumerate(classes):
        y_bin = [1 if label == cls else 0 for label in y]
        scores = proba[:, ci]
        roc_curves[cls], roc_auc[cls] = roc_curve(y_bin, scores)
        pr_curves[cls], pr_ap[cls] = pr_curve(y_bin, scores)
    roc_curves["micro"], roc_auc["micro"] = micro_average_ovr(
        y, proba, classes, kind="roc"
    )
    pr_curves["micro"], pr_ap["micro"] = micro_average_ovr(
        y, proba, classes, kind="pr"
    )
    return DesignatedDetail(
        name, tuple(classes), counts, normalized,
        roc_curves, roc_auc, pr_curves, pr_ap,
    )


def run_experiment(cfg: ExperimentConfig, records=None, plans=None) -> MetricsReport:
    """Cross-validate every configured classifier on one shared fold plan.

    ``records`` bypasses the config's data source; ``plans`` bypasses fold
    construction (the roving sweep passes both so conditions differ only
    in the offsets). When CV is repeated, scores concatenate plan-major.
    """
    try:
        records = resolve_records(cfg, records)
        if cfg.roving is not None:
            records = apply_roving(records, cfg.roving)
        X = feature_matrix(records)
        y = labels_of(records)
    except LoudclassError as exc:
        raise _with_stage("data", exc)

    try:
        classes = sorted(set(y))
    except TypeError:
        classes = sorted(set(y), key=str)
    classes = tuple(classes)

    try:
        if plans is None:
            plans = make_fold_plans(cfg, y)
        else:
            plans = tuple(plans)
    except LoudclassError as exc:
        raise _with_stage("fold-plan", exc)

    names = classifier_names(cfg.classifiers)
    if cfg.designated not in names:
        raise ConfigurationError(
            f"designated classifier {cfg.designated!r} is not among: "
            + ", ".join(names)
        )

    n = len(y)
    results = []
    designated_detail = None
    for name, spec in zip(names, cfg.classifiers):
        train_ba, test_ba, train_wf1, test_wf1 = [], [], [], []
        per_class_f1: dict = {cls: [] for cls in classes}
        pooled_proba = np.empty((n, len(classes)))
        pooled_pred: list = [None] * n
        try:
            for plan_index, plan in enumerate(plans):
                for train_idx, test_idx in plan:
                    model = fit(spec, X[train_idx], [y[i] for i in train_idx],
                                classes=classes)
                    y_train = [y[i] for i in train_idx]
                    y_test = [y[i] for i in test_idx]
                    pred_train = model.predict(X[train_idx])
                    pred_test = model.predict(X[test_idx])
                    train_ba.append(balanced_accuracy(y_train, pred_train))
                    test_ba.append(balanced_accuracy(y_test, pred_test))
                    train_wf1.append(weighted_f1(y_train, pred_train))
                    test_wf1.append(weighted_f1(y_test, pred_test))
                    for cls in classes:
                        per_class_f1[cls].append(f1_per_class(y_test, pred_test, cls))
                    if name == cfg.designated and plan_index == 0:
                        proba_test = model.predict_proba(X[test_idx])
                        for pos, idx in enumerate(test_idx):
                            pooled_proba[idx] = proba_test[pos]
                            pooled_pred[idx] = pred_test[pos]
        except LoudclassError as exc:
            raise _with_stage(f"classifier {name}", exc)
        results.append(
            ClassifierResult(
                name,
                spec.variant,
                tuple(train_ba),
                tuple(test_ba),
                tuple(train_wf1),
                tuple(test_wf1),
                {cls: tuple(v) for cls, v in per_class_f1.items()},
            )
        )
        if name == cfg.designated:
            try:
                designated_detail = _designated_detail(
                    name, classes, y, pooled_proba, pooled_pred
                )
            except LoudclassError as exc:
                raise _with_stage("designated detail", exc)

    t_tests: dict = {}
    for i, a in enumerate(results):
        for b in results[i + 1 :]:
            t_tests[(a.name, b.name)] = {
                "balanced_accuracy": paired_t_test(a.test_ba, b.test_ba),
                "weighted_f1": paired_t_test(a.test_wf1, b.test_wf1),
            }

    return MetricsReport(
        cfg, classes, plans, tuple(results), designated_detail, t_tests
    )


@dataclass(frozen=True)
class SweepReport:
    """One experiment per roving condition over identical base data."""

    conditions: tuple[tuple[float, float], ...]
    reports: tuple[MetricsReport, ...]
    importance: tuple[PermutationImportanceReport, ...]

    def micro_auc_by_condition(self) -> dict:
        return {
            cond: report.designated.micro_auc
            for cond, report in zip(self.conditions, self.reports)
        }


def _designated_spec(cfg: ExperimentConfig) -> ClassifierSpec:
    names = classifier_names(cfg.classifiers)
    return cfg.classifiers[names.index(cfg.designated)]


def roving_sweep(
    cfg: ExperimentConfig,
    conditions: tuple[tuple[float, float], ...] = DEFAULT_ROVING_CONDITIONS,
    records=None,
) -> SweepReport:
    """Repeat the experiment per (mean, sd) offset condition.

    Base records and fold plans are resolved once and shared, so the
    conditions differ only in the participant offsets; (0, 0) is
    bit-identical to a plain run. Permutation importance is computed per
    condition for the designated classifier on the first fold's split.
    """
    if cfg.roving is not None:
        raise ConfigurationError(
            "sweep config must leave roving unset; conditions supply it"
        )
    base = resolve_records(cfg, records)
    y = labels_of(base)
    plans = make_fold_plans(cfg, y)
    spec = _designated_spec(cfg)

    reports = []
    importances = []
    for mean, sd in conditions:
        rcfg = RovingConfig(mean, sd, cfg.rove_seed)
        report = run_experiment(replace(cfg, roving=rcfg), records=base, plans=plans)
        reports.append(report)

        roved = apply_roving(base, rcfg)
        X = feature_matrix(roved)
        train_idx, test_idx = plans[0].fold_indices(0)
        model: TrainedModel = fit(
            spec, X[train_idx], [y[i] for i in train_idx], classes=report.classes
        )
        importances.append(
            importance_report(
                model,
                X[train_idx],
                [y[i] for i in train_idx],
                X[test_idx],
                [y[i] for i in test_idx],
                repeats=cfg.perm_repeats,
                metric=cfg.perm_metric,
                seed=cfg.seed,
                feature_names=FEATURE_NAMES,
            )
        )
    return SweepReport(tuple(conditions), tuple(reports), tuple(importances))
