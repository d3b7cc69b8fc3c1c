"""Loudness-feature hearing-profile classification toolkit."""

from ._version import __version__
from .bisgaard import (
    Audiogram,
    BisgaardClass,
    StandardAudiogram,
    classify,
    load_profiles,
    pta,
)
from .classifiers import (
    ClassifierSpec,
    OvrModel,
    fit,
    load_model,
    predict,
    predict_proba,
    save_model,
)
from .errors import (
    ConfigurationError,
    DataError,
    DegenerateFeatureError,
    DegenerateLabelError,
    DomainError,
    LoudclassError,
    NumericError,
    ParameterError,
    ParseError,
    RangeError,
    SchemaError,
    ShapeError,
    UndefinedMetricError,
)
from .explain import exact_shapley, explain_model, importance_report
from .harness import (
    ExperimentConfig,
    FoldPlan,
    kfold_split,
    roving_sweep,
    run_experiment,
)
from .loudness import (
    FEATURE_NAMES,
    FrequencyFeatures,
    LoudnessFeatureVector,
    LoudnessFunction,
    derive_features,
)
from .pca import PcaModel, fit_pca, standardize, transform
from .pipeline import (
    LabeledRecord,
    RovingConfig,
    SyntheticConfig,
    apply_roving,
    feature_matrix,
    generate_synthetic,
    labels_of,
    load_labeled_json,
    preprocess,
    write_labeled_json,
)

__all__ = [
    "__version__",
    "Audiogram",
    "BisgaardClass",
    "ClassifierSpec",
    "ConfigurationError",
    "DataError",
    "DegenerateFeatureError",
    "DegenerateLabelError",
    "DomainError",
    "ExperimentConfig",
    "FEATURE_NAMES",
    "FoldPlan",
    "FrequencyFeatures",
    "LabeledRecord",
    "LoudclassError",
    "LoudnessFeatureVector",
    "LoudnessFunction",
    "NumericError",
    "OvrModel",
    "ParameterError",
    "ParseError",
    "PcaModel",
    "RangeError",
    "RovingConfig",
    "SchemaError",
    "ShapeError",
    "StandardAudiogram",
    "SyntheticConfig",
    "UndefinedMetricError",
    "apply_roving",
    "classify",
    "derive_features",
    "exact_shapley",
    "explain_model",
    "feature_matrix",
    "fit",
    "fit_pca",
    "generate_synthetic",
    "importance_report",
    "kfold_split",
    "labels_of",
    "load_labeled_json",
    "load_model",
    "load_profiles",
    "predict",
    "predict_proba",
    "preprocess",
    "pta",
    "roving_sweep",
    "run_experiment",
    "save_model",
    "standardize",
    "transform",
    "write_labeled_json",
]
