"""Command-line interface.

Every subcommand writes its outputs plus a manifest.json recording the
command, the fully resolved options (with absolute input paths), input
checksums, and library versions. `loudclass replay --manifest M` re-runs
the recorded command into a fresh directory and reproduces every output
byte-for-byte, including the manifest itself (the output directory is
never part of the recorded options).

Exit codes: 0 success, 2 usage or configuration, 3 data, 4 numeric.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bisgaard import class_from_name
from .classifiers import VARIANTS, ClassifierSpec, fit, save_model
from .errors import (
    ConfigurationError,
    LoudclassError,
    NumericError,
    SchemaError,
)
from .explain import PERMUTATION_METRICS, explain_model, importance_report
from .harness import ExperimentConfig, kfold_split, roving_sweep, run_experiment
from .loudness import FEATURE_NAMES
from .pca import fit_pca, standardize, transform
from .pipeline import (
    DEFAULT_MIN_CLASS_COUNT,
    DEFAULT_MIN_CLASS_FRACTION,
    DEFAULT_MIN_PTA,
    DEFAULT_SYNTHETIC_CLASSES,
    RovingConfig,
    SyntheticConfig,
    apply_roving,
    feature_matrix,
    generate_synthetic_full,
    labels_of,
    load_csv,
    load_labeled_json,
    prepare_combined,
    preprocess,
    write_csv,
    write_labeled_json,
)
from .reporting import (
    dump_json,
    importance_meta_jsonable,
    make_figures,
    write_beeswarm_csv,
    write_importance_csv,
    write_manifest,
    write_pca_outputs,
    write_report,
    write_sweep,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

COMMANDS = (
    "generate", "preprocess", "rove", "pca", "train",
    "evaluate", "explain", "sweep", "report", "replay",
)

# Sub-stream key for the background subsample so it cannot collide with
# the fold-plan streams keyed by (seed, repeat).
_BACKGROUND_STREAM = 101

_DEFAULT_CLASS_NAMES = [c.name for c in DEFAULT_SYNTHETIC_CLASSES]
_DEFAULT_CONDITIONS = [[0.0, 0.0], [5.0, 5.0], [5.0, 10.0], [10.0, 5.0], [10.0, 10.0]]

# One table per subcommand: every recognized option with its default.
# None means "required or derived later"; booleans must default here
# since argparse flags cannot distinguish absent from False otherwise.
_DEFAULTS: dict[str, dict] = {
    "generate": {
        "per_class": 150,
        "classes": _DEFAULT_CLASS_NAMES,
        "seed": 0,
        "jitter_sd": 4.0,
        "l2_5_offset_mean": 5.0,
        "l2_5_offset_sd": 3.0,
        "l_cut_noise_sd": 2.0,
        "csv": False,
    },
    "preprocess": {
        "audiogram_csv": None,
        "loudness_csv": None,
        "combined_csv": None,
        "min_pta": DEFAULT_MIN_PTA,
        "min_class_fraction": DEFAULT_MIN_CLASS_FRACTION,
        "min_class_count": DEFAULT_MIN_CLASS_COUNT,
    },
    "rove": {"data": None, "mean": 0.0, "sd": 0.0, "seed": 0},
    "pca": {"data": None, "components": 2},
    "train": {
        "data": None,
        "classifier": "lr",
        "classifier_seed": None,
        "params": {},
        "model_out": "model.json",
    },
    "evaluate": {
        "data": None,
        "classifier": "lr",
        "classifier_seed": None,
        "params": {},
        "only": list(VARIANTS),
        "k": 10,
        "stratified": True,
        "repeats": 1,
        "seed": 0,
        "rove_mean": None,
        "rove_sd": None,
        "rove_seed": 0,
    },
    "explain": {
        "data": None,
        "classifier": None,
        "classifier_seed": None,
        "params": {},
        "k": 10,
        "seed": 0,
        "background": 100,
        "max_records": 50,
        "perm_repeats": 10,
        "metric": "balanced_accuracy",
    },
    "sweep": {
        "data": None,
        "classifier": "lr",
        "classifier_seed": None,
        "params": {},
        "only": list(VARIANTS),
        "conditions": _DEFAULT_CONDITIONS,
        "k": 10,
        "stratified": True,
        "repeats": 1,
        "seed": 0,
        "rove_seed": 0,
        "perm_repeats": 10,
        "metric": "balanced_accuracy",
    },
    "report": {"in_dir": None},
}

# Options whose value is a filesystem path, made absolute before the
# manifest records them so replay works from any working directory.
_PATH_OPTIONS = ("data", "audiogram_csv", "loudness_csv", "combined_csv", "in_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loudclass",
        description="Loudness-feature hearing-profile classification toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out-dir", default=".",
                       help="directory receiving outputs and manifest.json")
        if name != "replay":
            p.add_argument("--config", default=None,
                           help="JSON file supplying values for flags not given")
        return p

    def classifier_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
        p.add_argument("--classifier", choices=VARIANTS, default=None,
                       required=required, help="classifier variant")
        p.add_argument("--classifier-seed", type=int, default=None,
                       help="seed override for the selected classifier")
        p.add_argument("--param", action="append", default=None, metavar="KEY=VALUE",
                       help="hyperparameter override for the selected classifier, "
                            "repeatable; values parse as JSON literals")

    p = command("generate", "write a synthetic labeled dataset")
    p.add_argument("--per-class", type=int, default=None,
                   help="labeled records to aim for per class")
    p.add_argument("--classes", default=None,
                   help="comma-separated audiogram class names")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jitter-sd", type=float, default=None,
                   help="sd of the per-frequency threshold jitter in dB")
    p.add_argument("--l2-5-offset-mean", type=float, default=None,
                   help="mean gap between threshold and the L2.5 level")
    p.add_argument("--l2-5-offset-sd", type=float, default=None)
    p.add_argument("--l-cut-noise-sd", type=float, default=None,
                   help="sd of the reported-L_cut decorrelation noise")
    p.add_argument("--csv", action="store_true", default=None,
                   help="also write participants.csv in the combined schema")

    p = command("preprocess", "run the labeling cascade on raw CSV data")
    p.add_argument("--audiogram-csv", default=None,
                   help="per-participant audiogram dataset")
    p.add_argument("--loudness-csv", default=None,
                   help="per-participant loudness-feature dataset")
    p.add_argument("--combined-csv", default=None,
                   help="single dataset carrying both sides per row")
    p.add_argument("--min-pta", type=float, default=None,
                   help="exclude ears with pure-tone average below this")
    p.add_argument("--min-class-fraction", type=float, default=None,
                   help="prune classes under this share of records")
    p.add_argument("--min-class-count", type=int, default=None,
                   help="prune classes under this record count")

    p = command("rove", "apply participant-level calibration offsets")
    p.add_argument("--data", default=None, help="labeled records JSON")
    p.add_argument("--mean", "--rove-mean", dest="mean", type=float, default=None)
    p.add_argument("--sd", "--rove-sd", dest="sd", type=float, default=None)
    p.add_argument("--seed", "--rove-seed", dest="seed", type=int, default=None)

    p = command("pca", "principal components of the standardized features")
    p.add_argument("--data", default=None, help="labeled records JSON")
    p.add_argument("--components", type=int, default=None)

    p = command("train", "fit one classifier on the full dataset")
    p.add_argument("--data", default=None, help="labeled records JSON")
    classifier_flags(p)
    p.add_argument("--model-out", default=None,
                   help="model file name (relative paths land in --out-dir)")

    p = command("evaluate", "cross-validated comparison of classifiers")
    p.add_argument("--data", default=None, help="labeled records JSON")
    classifier_flags(p)
    p.add_argument("--only", default=None,
                   help="comma-separated subset of variants to evaluate")
    p.add_argument("--k", type=int, default=None, help="fold count")
    p.add_argument("--repeats", type=int, default=None,
                   help="repetitions of the full cross-validation")
    p.add_argument("--no-stratify", action="store_true", default=None,
                   help="plain instead of class-stratified folds")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rove-mean", type=float, default=None,
                   help="apply roving with this offset mean before evaluating")
    p.add_argument("--rove-sd", type=float, default=None)
    p.add_argument("--rove-seed", type=int, default=None)

    p = command("explain", "Shapley values and permutation importance")
    p.add_argument("--data", default=None, help="labeled records JSON")
    classifier_flags(p, required=False)
    p.add_argument("--k", type=int, default=None,
                   help="fold count; fold 0 provides the train/test split")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--background", type=int, default=None,
                   help="background sample size for the value function")
    p.add_argument("--max-records", type=int, default=None,
                   help="test records to explain")
    p.add_argument("--perm-repeats", type=int, default=None)
    p.add_argument("--metric", choices=("balanced-accuracy", "accuracy"),
                   default=None, help="permutation-importance metric")

    p = command("sweep", "repeat the evaluation across roving conditions")
    p.add_argument("--data", default=None, help="labeled records JSON")
    classifier_flags(p)
    p.add_argument("--only", default=None)
    p.add_argument("--conditions", default=None,
                   help="comma-separated mean:sd pairs, e.g. 0:0,10:5")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--no-stratify", action="store_true", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rove-seed", type=int, default=None)
    p.add_argument("--perm-repeats", type=int, default=None)
    p.add_argument("--metric", choices=("balanced-accuracy", "accuracy"),
                   default=None)

    p = command("report", "collect run outputs into plot-ready figure CSVs")
    p.add_argument("--in-dir", default=None,
                   help="directory holding evaluate and/or sweep outputs")

    p = command("replay", "re-run a recorded manifest into a new directory")
    p.add_argument("--manifest", required=True, help="manifest.json of a prior run")

    return parser


def _parse_param(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigurationError(f"--param needs KEY=VALUE, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _config_section(path: str | None, cmd: str, allowed) -> dict:
    if path is None:
        return {}
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigurationError("config file must hold a JSON object")
    flat = {}
    section = {}
    for key, value in payload.items():
        if key in COMMANDS:
            if not isinstance(value, dict):
                raise ConfigurationError(f"config section {key!r} must be an object")
            if key == cmd:
                section = dict(value)
        else:
            flat[key] = value
    merged = {**flat, **section}
    unknown = set(merged) - set(allowed)
    if unknown:
        raise ConfigurationError(
            f"unknown config keys for {cmd}: {', '.join(sorted(unknown))}"
        )
    return merged


def _as_name_list(value, what: str) -> list[str]:
    if isinstance(value, str):
        items = [chunk.strip() for chunk in value.split(",") if chunk.strip()]
    elif isinstance(value, (list, tuple)):
        items = [str(v) for v in value]
    else:
        raise ConfigurationError(f"{what} must be a list or comma-separated string")
    if not items:
        raise ConfigurationError(f"{what} must not be empty")
    return items


def _as_conditions(value) -> list[list[float]]:
    pairs: list[list[float]] = []
    if isinstance(value, str):
        for chunk in value.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(":")
            if len(parts) != 2:
                raise ConfigurationError(
                    f"condition {chunk!r} must be mean:sd, e.g. 10:5"
                )
            try:
                pairs.append([float(parts[0]), float(parts[1])])
            except ValueError as exc:
                raise ConfigurationError(f"condition {chunk!r}: {exc}") from exc
    elif isinstance(value, (list, tuple)):
        for item in value:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ConfigurationError("each condition must be a [mean, sd] pair")
            pairs.append([float(item[0]), float(item[1])])
    else:
        raise ConfigurationError("conditions must be a list or mean:sd string")
    if not pairs:
        raise ConfigurationError("at least one roving condition is required")
    return pairs


def _resolve_options(cmd: str, args: argparse.Namespace) -> dict:
    """Merge CLI values over config-file values over built-in defaults."""
    defaults = _DEFAULTS[cmd]
    cli_values = {
        key: getattr(args, key)
        for key in defaults
        if getattr(args, key, None) is not None
    }
    if getattr(args, "no_stratify", None):
        cli_values["stratified"] = False
    config = _config_section(getattr(args, "config", None), cmd, defaults)
    options = {
        key: cli_values.get(key, config.get(key, default))
        for key, default in defaults.items()
    }

    if "params" in defaults:
        base = options["params"] if options["params"] else {}
        if not isinstance(base, dict):
            raise ConfigurationError("params must be an object of KEY: VALUE")
        merged = dict(base)
        for text in getattr(args, "param", None) or []:
            key, value = _parse_param(text)
            merged[key] = value
        options["params"] = merged

    out_dir = Path(args.out_dir)
    if "data" in options and options["data"] is None:
        options["data"] = str(out_dir / "labeled.json")
    if cmd == "report" and options["in_dir"] is None:
        options["in_dir"] = str(out_dir)
    for key in _PATH_OPTIONS:
        if options.get(key) is not None:
            options[key] = str(Path(options[key]).resolve())

    if "classes" in options:
        options["classes"] = _as_name_list(options["classes"], "classes")
    if "only" in options:
        options["only"] = _as_name_list(options["only"], "only")
        unknown = set(options["only"]) - set(VARIANTS)
        if unknown:
            raise ConfigurationError(
                f"unknown classifier variants: {', '.join(sorted(unknown))}"
            )
    if "conditions" in options:
        options["conditions"] = _as_conditions(options["conditions"])
    if "metric" in options:
        metric = str(options["metric"]).replace("-", "_")
        if metric not in PERMUTATION_METRICS:
            raise ConfigurationError(
                f"metric must be one of {', '.join(PERMUTATION_METRICS)}"
            )
        options["metric"] = metric

    if cmd == "preprocess":
        combined = options["combined_csv"] is not None
        split_pair = (
            options["audiogram_csv"] is not None
            or options["loudness_csv"] is not None
        )
        if combined and split_pair:
            raise ConfigurationError(
                "--combined-csv excludes --audiogram-csv/--loudness-csv"
            )
        if not combined and not (
            options["audiogram_csv"] and options["loudness_csv"]
        ):
            raise ConfigurationError(
                "preprocess needs --combined-csv or both "
                "--audiogram-csv and --loudness-csv"
            )
    if cmd == "explain" and not options["classifier"]:
        raise ConfigurationError("explain requires an explicit --classifier")
    if cmd in ("evaluate", "sweep") and options["classifier"] not in options["only"]:
        raise ConfigurationError(
            f"designated classifier {options['classifier']!r} must appear in --only"
        )
    return options


def _run_generate(options: dict, out_dir: Path) -> None:
    cfg = SyntheticConfig(
        records_per_class=int(options["per_class"]),
        classes=tuple(class_from_name(name) for name in options["classes"]),
        seed=int(options["seed"]),
        jitter_sd=float(options["jitter_sd"]),
        l2_5_offset_mean=float(options["l2_5_offset_mean"]),
        l2_5_offset_sd=float(options["l2_5_offset_sd"]),
        l_cut_noise_sd=float(options["l_cut_noise_sd"]),
    )
    participants, labeled = generate_synthetic_full(cfg)
    write_labeled_json(labeled, out_dir / "labeled.json")
    if options["csv"]:
        write_csv(participants, out_dir / "participants.csv")
    write_manifest(out_dir, "generate", options, [])


def _run_preprocess(options: dict, out_dir: Path) -> None:
    kwargs = dict(
        min_pta=float(options["min_pta"]),
        min_fraction=float(options["min_class_fraction"]),
        min_count=int(options["min_class_count"]),
    )
    if options["combined_csv"]:
        records, summary = prepare_combined(load_csv(options["combined_csv"]), **kwargs)
        inputs = [options["combined_csv"]]
    else:
        records, summary = preprocess(
            load_csv(options["audiogram_csv"]),
            load_csv(options["loudness_csv"]),
            **kwargs,
        )
        inputs = [options["audiogram_csv"], options["loudness_csv"]]
    write_labeled_json(records, out_dir / "labeled.json")
    dump_json(summary.as_dict(), out_dir / "preprocess_summary.json")
    write_manifest(out_dir, "preprocess", options, inputs)


def _run_rove(options: dict, out_dir: Path) -> None:
    records = load_labeled_json(options["data"])
    cfg = RovingConfig(float(options["mean"]), float(options["sd"]),
                       int(options["seed"]))
    write_labeled_json(apply_roving(records, cfg), out_dir / "labeled_roved.json")
    write_manifest(out_dir, "rove", options, [options["data"]])


def _run_pca(options: dict, out_dir: Path) -> None:
    records = load_labeled_json(options["data"])
    Z, means, sds = standardize(feature_matrix(records))
    model = fit_pca(Z, int(options["components"]), means=means, sds=sds)
    scores = transform(model, Z)
    ids = [f"{r.participant_id}:{r.ear}" for r in records]
    write_pca_outputs(model, scores, ids, out_dir, FEATURE_NAMES)
    write_manifest(out_dir, "pca", options, [options["data"]])


def _classifier_spec(options: dict) -> ClassifierSpec:
    return ClassifierSpec(
        options["classifier"],
        seed=options.get("classifier_seed"),
        params=dict(options.get("params") or {}),
    )


def _run_train(options: dict, out_dir: Path) -> None:
    records = load_labeled_json(options["data"])
    model = fit(_classifier_spec(options), feature_matrix(records), labels_of(records))
    model_path = Path(options["model_out"])
    if not model_path.is_absolute():
        model_path = out_dir / model_path
    save_model(model, model_path)
    write_manifest(out_dir, "train", options, [options["data"]])


def _experiment_config(options: dict) -> ExperimentConfig:
    designated = options["classifier"]
    specs = tuple(
        _classifier_spec(options) if variant == designated else ClassifierSpec(variant)
        for variant in options["only"]
    )
    roving = None
    if options.get("rove_mean") is not None or options.get("rove_sd") is not None:
        roving = RovingConfig(
            float(options.get("rove_mean") or 0.0),
            float(options.get("rove_sd") or 0.0),
            int(options.get("rove_seed") or 0),
        )
    return ExperimentConfig(
        data_path=options["data"],
        roving=roving,
        classifiers=specs,
        k=int(options["k"]),
        stratified=bool(options["stratified"]),
        repeats=int(options["repeats"]),
        designated=designated,
        seed=int(options["seed"]),
        rove_seed=int(options.get("rove_seed") or 0),
        perm_repeats=int(options.get("perm_repeats") or 10),
        perm_metric=str(options.get("metric") or "balanced_accuracy"),
    )


def _run_evaluate(options: dict, out_dir: Path) -> None:
    report = run_experiment(_experiment_config(options))
    write_report(report, out_dir)
    write_manifest(out_dir, "evaluate", options, [options["data"]])


def _run_explain(options: dict, out_dir: Path) -> None:
    records = load_labeled_json(options["data"])
    X = feature_matrix(records)
    y = labels_of(records)
    plan = kfold_split(y, k=int(options["k"]), stratified=True,
                       seed=int(options["seed"]))
    train_idx, test_idx = plan.fold_indices(0)
    y_train = [y[i] for i in train_idx]
    y_test = [y[i] for i in test_idx]
    model = fit(_classifier_spec(options), X[train_idx], y_train,
                classes=sorted(set(y)))

    size = min(int(options["background"]), len(train_idx))
    if size < 1:
        raise ConfigurationError("background size must be >= 1")
    rng = np.random.default_rng(
        np.random.SeedSequence([int(options["seed"]), _BACKGROUND_STREAM])
    )
    chosen = np.sort(rng.choice(len(train_idx), size=size, replace=False))
    background = X[train_idx[chosen]]

    count = min(int(options["max_records"]), len(test_idx))
    if count < 1:
        raise ConfigurationError("max-records must be >= 1")
    explained = test_idx[:count]
    agnostic, _ = explain_model(model, X[explained], background,
                                feature_names=FEATURE_NAMES)
    ids = [f"{records[i].participant_id}:{records[i].ear}" for i in explained]
    write_beeswarm_csv(agnostic, ids, out_dir / "shap_beeswarm.csv")

    imp = importance_report(
        model, X[train_idx], y_train, X[test_idx], y_test,
        repeats=int(options["perm_repeats"]), metric=options["metric"],
        seed=int(options["seed"]), feature_names=FEATURE_NAMES,
    )
    write_importance_csv(imp, out_dir / "perm_importance.csv")
    dump_json(importance_meta_jsonable(imp), out_dir / "perm_importance_meta.json")
    write_manifest(out_dir, "explain", options, [options["data"]])


def _run_sweep(options: dict, out_dir: Path) -> None:
    cfg = _experiment_config(options)
    conditions = tuple((m, sd) for m, sd in options["conditions"])
    sweep = roving_sweep(cfg, conditions)
    write_sweep(sweep, out_dir)
    write_manifest(out_dir / "sweep", "sweep", options, [options["data"]])


def _run_report(options: dict, out_dir: Path) -> None:
    in_dir = Path(options["in_dir"])
    figures_dir = out_dir / "figures"
    make_figures(in_dir, figures_dir)
    consumed = [
        p
        for p in (
            in_dir / "report.json",
            *sorted(in_dir.glob("roc_*.csv")),
            *sorted(in_dir.glob("pr_*.csv")),
            in_dir / "sweep" / "auc_summary.csv",
            in_dir / "sweep" / "perm_importance.csv",
        )
        if p.exists()
    ]
    write_manifest(figures_dir, "report", options, consumed)


_RUNNERS = {
    "generate": _run_generate,
    "preprocess": _run_preprocess,
    "rove": _run_rove,
    "pca": _run_pca,
    "train": _run_train,
    "evaluate": _run_evaluate,
    "explain": _run_explain,
    "sweep": _run_sweep,
    "report": _run_report,
}


def _load_replay(args: argparse.Namespace) -> tuple[str, dict]:
    path = Path(args.manifest)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"manifest not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"manifest is not valid JSON: {exc}") from exc
    cmd = payload.get("command")
    if cmd not in _RUNNERS:
        raise SchemaError(f"manifest names unknown command {cmd!r}")
    options = payload.get("options")
    if not isinstance(options, dict):
        raise SchemaError("manifest has no options object")
    return cmd, options


def _fail(cmd: str, exc: BaseException, code: int) -> int:
    print(f"loudclass {cmd}: error: {exc}", file=sys.stderr)
    for note in getattr(exc, "__notes__", None) or []:
        print(f"  {note}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; surface the
        # code instead of terminating the host process.
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    cmd = args.command
    out_dir = Path(args.out_dir)
    try:
        if cmd == "replay":
            cmd, options = _load_replay(args)
        else:
            options = _resolve_options(cmd, args)
        out_dir.mkdir(parents=True, exist_ok=True)
        _RUNNERS[cmd](options, out_dir)
    except ConfigurationError as exc:
        return _fail(cmd, exc, EXIT_USAGE)
    except NumericError as exc:
        return _fail(cmd, exc, EXIT_NUMERIC)
    except np.linalg.LinAlgError as exc:
        return _fail(cmd, exc, EXIT_NUMERIC)
    except LoudclassError as exc:
        return _fail(cmd, exc, EXIT_DATA)
    except OSError as exc:
        return _fail(cmd, exc, EXIT_DATA)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
