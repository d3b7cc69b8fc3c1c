import json

import numpy as np
import pytest

from loudclass.bisgaard import BisgaardClass
from loudclass.classifiers import (
    DEFAULT_PARAMS,
    DEFAULT_SEEDS,
    VARIANTS,
    ClassifierSpec,
    DecisionTreeBinary,
    GradientBoostingBinary,
    KnnModel,
    LogisticRegressionBinary,
    NeuralNetBinary,
    RandomForestBinary,
    StandardScaler,
    SvmBinary,
    fit,
    load_model,
    logistic_loss_and_grad,
    model_from_jsonable,
    model_to_jsonable,
    predict,
    predict_proba,
    save_model,
)
from loudclass.errors import (
    ConfigurationError,
    DataError,
    DegenerateLabelError,
    SchemaError,
    ShapeError,
)


def blobs(rng, centers, n_per, spread=0.5):
    """Gaussian clusters; returns (X, labels as ints)."""
    X = np.vstack([
        rng.normal(c, spread, size=(n_per, len(c))) for c in centers
    ])
    y = np.repeat(np.arange(len(centers)), n_per)
    return X, y


def two_blobs(rng, n_per=20, spread=0.5, gap=4.0):
    X, y = blobs(rng, [(-gap / 2, 0.0), (gap / 2, 0.0)], n_per, spread)
    return X, y.astype(float)


# --- scaler -------------------------------------------------------------------

def test_scaler_standardizes(rng):
    X = rng.normal(5.0, 3.0, size=(30, 4))
    scaler = StandardScaler().fit(X)
    Z = scaler.transform(X)
    assert Z.mean(axis=0) == pytest.approx(np.zeros(4), abs=1e-12)
    assert Z.std(axis=0, ddof=1) == pytest.approx(np.ones(4), abs=1e-12)


def test_scaler_constant_column_passes_through(rng):
    X = rng.normal(size=(10, 2))
    X[:, 1] = 4.0
    Z = StandardScaler().fit(X).transform(X)
    assert np.all(Z[:, 1] == 0.0)  # centered, scale forced to 1


def test_scaler_errors(rng):
    with pytest.raises(ConfigurationError):
        StandardScaler().transform(np.zeros((2, 2)))
    scaler = StandardScaler().fit(np.zeros((3, 2)) + rng.normal(size=(3, 2)))
    with pytest.raises(ShapeError):
        scaler.transform(np.zeros((2, 3)))


def test_scaler_jsonable_round_trip(rng):
    X = rng.normal(size=(10, 3))
    scaler = StandardScaler().fit(X)
    clone = StandardScaler.from_jsonable(scaler.to_jsonable())
    assert np.array_equal(clone.transform(X), scaler.transform(X))


# --- decision tree -----------------------------------------------------------

def test_tree_separates_blobs(rng):
    X, y = two_blobs(rng)
    model = DecisionTreeBinary().fit(X, y)
    assert np.array_equal(model.predict_score(X) > 0.5, y.astype(bool))


def test_tree_min_samples_split():
    # Four samples < min_samples_split=5: the root must stay a leaf.
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    stump = DecisionTreeBinary(min_samples_split=5).fit(X, y)
    assert stump.tree_.is_leaf
    assert np.all(stump.predict_score(X) == 0.5)  # positive fraction at leaf
    grown = DecisionTreeBinary(min_samples_split=2).fit(X, y)
    assert not grown.tree_.is_leaf


def test_tree_scores_are_leaf_fractions():
    X = np.array([[0.0], [0.1], [0.2], [5.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    # Entropy best gain splits the pure right point first; left leaf keeps
    # a 1/3 positive fraction once depth is exhausted by purity.
    model = DecisionTreeBinary(min_samples_split=4).fit(X, y)
    scores = model.predict_score(X)
    assert set(np.round(scores, 6)) <= {0.0, 1.0, round(1 / 3, 6), 0.5}


def test_tree_deterministic(rng):
    X, y = two_blobs(rng)
    a = DecisionTreeBinary().fit(X, y).predict_score(X)
    b = DecisionTreeBinary().fit(X, y).predict_score(X)
    assert np.array_equal(a, b)


# --- random forest -----------------------------------------------------------

def test_forest_votes(rng):
    X, y = two_blobs(rng, n_per=30)
    model = RandomForestBinary(seed_key=(0, 0)).fit(X, y)
    assert len(model.trees_) == 10
    scores = model.predict_score(X)
    assert np.all((scores >= 0) & (scores <= 1))
    assert np.mean((scores > 0.5) == y.astype(bool)) >= 0.95


def test_forest_seed_determinism(rng):
    X, y = two_blobs(rng, n_per=15, spread=1.5)
    a = RandomForestBinary(seed_key=(1, 2)).fit(X, y).predict_score(X)
    b = RandomForestBinary(seed_key=(1, 2)).fit(X, y).predict_score(X)
    c = RandomForestBinary(seed_key=(9, 9)).fit(X, y).predict_score(X)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# --- gradient boosting ---------------------------------------------------------

def test_boosting_loss_never_increases(rng):
    X, y = two_blobs(rng, n_per=25, spread=1.8, gap=2.0)
    model = GradientBoostingBinary().fit(X, y)
    losses = np.asarray(model.train_losses_)
    assert len(losses) == 101  # base-rate loss plus one entry per stage
    assert np.all(np.diff(losses) <= 1e-12)


def test_boosting_fits_separable(rng):
    X, y = two_blobs(rng, n_per=25)
    model = GradientBoostingBinary(n_estimators=30).fit(X, y)
    scores = model.predict_score(X)
    assert np.all((scores > 0) & (scores < 1))
    assert np.array_equal(scores > 0.5, y.astype(bool))


def test_boosting_handles_xor(rng):
    # Depth-2 trees can express the interaction a single stump cannot.
    X = rng.uniform(-1, 1, size=(200, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(float)
    model = GradientBoostingBinary(n_estimators=50).fit(X, y)
    assert np.mean((model.predict_score(X) > 0.5) == y.astype(bool)) > 0.95


# --- logistic regression -------------------------------------------------------

def test_logistic_gradient_matches_finite_differences(rng):
    X = rng.normal(size=(12, 3))
    y = (rng.uniform(size=12) > 0.5).astype(float)
    theta = rng.normal(size=4)
    _, grad = logistic_loss_and_grad(theta, X, y)
    h = 1e-6
    for i in range(len(theta)):
        probe = theta.copy()
        probe[i] += h
        up, _ = logistic_loss_and_grad(probe, X, y)
        probe[i] -= 2 * h
        down, _ = logistic_loss_and_grad(probe, X, y)
        assert grad[i] == pytest.approx((up - down) / (2 * h), abs=1e-6)


def test_logistic_fits_separable(rng):
    X, y = two_blobs(rng)
    model = LogisticRegressionBinary().fit(X, y)
    assert np.array_equal(model.predict_score(X) > 0.5, y.astype(bool))
    decision = model.decision(X)
    assert np.array_equal(decision > 0, y.astype(bool))


def test_logistic_label_symmetry(rng):
    # Swapping the binary labels negates the unregularized optimum.
    X, y = two_blobs(rng, spread=1.5, gap=2.0)
    a = LogisticRegressionBinary().fit(X, y)
    b = LogisticRegressionBinary().fit(X, 1.0 - y)
    assert a.decision(X) == pytest.approx(-b.decision(X), abs=1e-3)


# --- neural net ----------------------------------------------------------------

def test_nn_gradient_matches_finite_differences(rng):
    X = rng.normal(size=(9, 5))
    y = (rng.uniform(size=9) > 0.5).astype(float)
    net = NeuralNetBinary(5, hidden=(4, 3))
    theta = net.initial_parameters() + 0.05 * rng.normal(
        size=net.initial_parameters().shape
    )
    _, grad = net.loss_and_grad(theta, X, y)
    h = 1e-6
    numeric = np.zeros_like(theta)
    for i in range(len(theta)):
        probe = theta.copy()
        probe[i] += h
        up, _ = net.loss_and_grad(probe, X, y)
        probe[i] -= 2 * h
        down, _ = net.loss_and_grad(probe, X, y)
        numeric[i] = (up - down) / (2 * h)
    scale = max(1.0, float(np.linalg.norm(grad)))
    assert np.linalg.norm(numeric - grad) / scale < 1e-5


def test_nn_fits_separable(rng):
    X, y = two_blobs(rng)
    model = NeuralNetBinary(2, hidden=(8,), max_iter=500).fit(X, y)
    assert np.mean((model.predict_score(X) > 0.5) == y.astype(bool)) == 1.0


def test_nn_seed_determinism(rng):
    X, y = two_blobs(rng, spread=1.2, gap=2.0)
    a = NeuralNetBinary(2, hidden=(4,), max_iter=50, seed_key=(1,))
    b = NeuralNetBinary(2, hidden=(4,), max_iter=50, seed_key=(1,))
    assert np.array_equal(a.initial_parameters(), b.initial_parameters())
    c = NeuralNetBinary(2, hidden=(4,), max_iter=50, seed_key=(2,))
    assert not np.array_equal(a.initial_parameters(), c.initial_parameters())


def test_nn_validation():
    with pytest.raises(ConfigurationError):
        NeuralNetBinary(3, hidden=(0,))
    with pytest.raises(ConfigurationError):
        NeuralNetBinary(3).decision(np.zeros((1, 3)))


# --- SVM -----------------------------------------------------------------------

def test_svm_separates_blobs(rng):
    X, y = two_blobs(rng)
    model = SvmBinary().fit(X, y)
    assert np.array_equal(model.decision(X) > 0, y.astype(bool))
    scores = model.predict_score(X)
    assert np.all((scores > 0) & (scores < 1))


def test_svm_margin_kkt_at_tight_tolerance(rng):
    # Unbounded support vectors must sit on the +-1 margin. The default
    # tolerance leaves visible slack, so tighten it for this check.
    X, y = two_blobs(rng, n_per=25, spread=0.9, gap=3.0)
    model = SvmBinary(C=10.0, tol=1e-6).fit(X, y)
    on_margin = model.sv_alpha_y_[np.abs(np.abs(model.sv_alpha_y_) - 0.0) > 0]
    decisions = model.decision(model.sv_X_)
    signs = np.sign(model.sv_alpha_y_)
    free = np.abs(model.sv_alpha_y_) < 10.0 - 1e-8
    assert free.any()
    margins = decisions[free] * signs[free]
    assert np.abs(margins - 1.0).max() < 1e-3


def test_svm_gamma_default(rng):
    X, y = two_blobs(rng)
    model = SvmBinary().fit(X, y)
    assert model.gamma_ == pytest.approx(1.0 / (X.shape[1] * X.var()))
    fixed = SvmBinary(gamma=0.25).fit(X, y)
    assert fixed.gamma_ == 0.25


def test_svm_validation():
    with pytest.raises(ConfigurationError):
        SvmBinary(C=0.0)
    with pytest.raises(ConfigurationError):
        SvmBinary(tol=-1.0)


# --- one-vs-rest wrapper --------------------------------------------------------

def six_class_data(rng, n_per=8):
    centers = [(i * 3.0, (i % 2) * 3.0, -i) for i in range(6)]
    X, y_int = blobs(rng, centers, n_per, spread=0.4)
    labels = [f"c{i}" for i in y_int]
    return X, labels


def test_spec_defaults_cover_every_variant():
    assert set(DEFAULT_PARAMS) == set(VARIANTS)
    assert set(DEFAULT_SEEDS) == set(VARIANTS)
    assert DEFAULT_SEEDS["nn"] == 1
    assert DEFAULT_PARAMS["dt"]["min_samples_split"] == 5
    assert DEFAULT_PARAMS["gb"]["n_estimators"] == 100
    assert DEFAULT_PARAMS["gb"]["learning_rate"] == 1.0
    assert DEFAULT_PARAMS["knn"]["k"] == 2
    assert DEFAULT_PARAMS["rf"]["n_trees"] == 10
    assert DEFAULT_PARAMS["svm"]["C"] == 1000.0


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        ClassifierSpec("xgboost")
    with pytest.raises(ConfigurationError):
        ClassifierSpec("lr", params={"bogus_knob": 3}).resolved()
    seed, params = ClassifierSpec("dt", params={"min_samples_split": 9}).resolved()
    assert seed == 0
    assert params["min_samples_split"] == 9


@pytest.mark.parametrize("variant", VARIANTS)
def test_ovr_fit_predict_all_variants(rng, variant):
    X, labels = six_class_data(rng)
    spec = ClassifierSpec(variant)
    if variant == "nn":
        spec = ClassifierSpec(variant, params={"max_iter": 200})
    model = fit(spec, X, labels)
    proba = predict_proba(model, X)
    assert proba.shape == (len(labels), 6)
    assert np.all(proba >= 0) and np.all(proba <= 1)
    predictions = predict(model, X)
    assert np.mean([p == t for p, t in zip(predictions, labels)]) >= 0.9
    assert model.classes == tuple(sorted(set(labels)))


def test_ovr_fit_validations(rng):
    X, labels = six_class_data(rng, n_per=3)
    with pytest.raises(DegenerateLabelError):
        fit(ClassifierSpec("dt"), X[:4], ["a"] * 4)
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(DataError):
        fit(ClassifierSpec("dt"), bad, labels)
    with pytest.raises(DataError):
        fit(ClassifierSpec("dt"), X, labels, classes=["c0", "c1"])
    with pytest.raises(DataError):
        # 18 records but 10 classes listed: below 2 per class.
        fit(ClassifierSpec("dt"), X, labels,
            classes=[f"c{i}" for i in range(10)])
    with pytest.raises(ShapeError):
        fit(ClassifierSpec("dt"), X, labels[:-1])


def test_ovr_two_class_lr_columns_complement(rng):
    X, y = two_blobs(rng, spread=1.5, gap=2.0)
    labels = ["neg" if v == 0 else "pos" for v in y]
    model = fit(ClassifierSpec("lr"), X, labels)
    proba = predict_proba(model, X)
    # Unregularized LR on flipped labels learns the negated decision, so
    # the two one-vs-rest columns must (nearly) sum to one.
    assert proba.sum(axis=1) == pytest.approx(np.ones(len(y)), abs=1e-3)


def test_ovr_prediction_tie_breaks_by_class_order(rng):
    X, labels = six_class_data(rng)
    model = fit(ClassifierSpec("dt"), X, labels)
    tied = np.full((2, 6), 0.5)
    winner = [model.classes[i] for i in np.argmax(tied, axis=1)]
    assert winner == [model.classes[0], model.classes[0]]


def test_ovr_seed_changes_stochastic_variants(rng):
    X, labels = six_class_data(rng, n_per=6)
    a = fit(ClassifierSpec("rf", seed=0), X, labels)
    b = fit(ClassifierSpec("rf", seed=0), X, labels)
    c = fit(ClassifierSpec("rf", seed=5), X, labels)
    assert np.array_equal(predict_proba(a, X), predict_proba(b, X))
    assert not np.array_equal(predict_proba(a, X), predict_proba(c, X))


# --- k nearest neighbors ---------------------------------------------------------

def test_knn_tie_breaks_toward_nearer_neighbor():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    labels = ["a", "a", "b", "b"]
    model = fit(ClassifierSpec("knn"), X, labels)
    assert predict(model, np.array([[0.5]])) == ["a"]
    assert predict(model, np.array([[10.5]])) == ["b"]
    # Between the clusters the two nearest neighbors are one a and one b,
    # a 1:1 vote; the class of the nearer one must win. The cluster
    # midpoint is 5.5, so 5.4 leans a and 5.6 leans b.
    assert predict(model, np.array([[5.4]])) == ["a"]
    assert predict(model, np.array([[5.6]])) == ["b"]


def test_knn_proba_fractions(rng):
    X, labels = six_class_data(rng)
    model = fit(ClassifierSpec("knn"), X, labels)
    proba = predict_proba(model, X)
    assert proba.sum(axis=1) == pytest.approx(np.ones(len(labels)), abs=1e-12)
    assert set(np.unique(proba)) <= {0.0, 0.5, 1.0}


def test_knn_k_validation(rng):
    X, labels = six_class_data(rng, n_per=2)
    with pytest.raises(ConfigurationError):
        fit(ClassifierSpec("knn", params={"k": 0}), X, labels)
    with pytest.raises(ConfigurationError):
        fit(ClassifierSpec("knn", params={"k": 13}), X, labels)


def test_knn_scaler_applied():
    # Without scaling, the wide second feature would dominate distances.
    X = np.array([[0.0, 0.0], [1.0, 1000.0], [0.1, 900.0], [1.1, 100.0]])
    labels = ["a", "a", "b", "b"]
    model = fit(ClassifierSpec("knn"), X, labels)
    assert isinstance(model, KnnModel)
    assert model.scaler.scale_ is not None


# --- persistence -----------------------------------------------------------------

@pytest.mark.parametrize("variant", VARIANTS)
def test_model_round_trip(rng, variant, tmp_path):
    X, labels = six_class_data(rng, n_per=4)
    spec = ClassifierSpec(variant)
    if variant == "nn":
        spec = ClassifierSpec(variant, params={"max_iter": 60})
    if variant == "gb":
        spec = ClassifierSpec(variant, params={"n_estimators": 10})
    model = fit(spec, X, labels)
    path = tmp_path / f"{variant}.json"
    save_model(model, path)
    clone = load_model(path)
    assert clone.variant == variant
    assert clone.classes == model.classes
    assert np.array_equal(predict_proba(clone, X), predict_proba(model, X))


def test_model_json_is_versioned_and_sorted(rng, tmp_path):
    X, labels = six_class_data(rng, n_per=4)
    model = fit(ClassifierSpec("dt"), X, labels)
    path = tmp_path / "model.json"
    save_model(model, path)
    payload = json.loads(path.read_text())
    assert payload["format_version"] == 1
    assert payload["variant"] == "dt"
    save_model(model, path)
    again = path.read_bytes()
    save_model(model, path)
    assert path.read_bytes() == again


def test_model_round_trip_bisgaard_labels(separable_xy, tmp_path):
    X, y = separable_xy
    model = fit(ClassifierSpec("dt"), X, y)
    path = tmp_path / "model.json"
    save_model(model, path)
    clone = load_model(path)
    assert clone.classes == model.classes
    assert all(isinstance(c, BisgaardClass) for c in clone.classes)
    assert predict(clone, X[:5]) == predict(model, X[:5])


def test_model_schema_errors(rng, tmp_path):
    X, labels = six_class_data(rng, n_per=4)
    model = fit(ClassifierSpec("dt"), X, labels)
    payload = model_to_jsonable(model)
    broken = dict(payload, format_version=99)
    with pytest.raises(SchemaError):
        model_from_jsonable(broken)
    missing = {k: v for k, v in payload.items() if k != "classes"}
    with pytest.raises(SchemaError):
        model_from_jsonable(missing)
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        load_model(path)
