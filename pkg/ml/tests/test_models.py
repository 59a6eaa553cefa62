from dataclasses import replace
from itertools import product
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import sparse
from scipy.special import logsumexp
from sklearn.metrics import f1_score

from speechacts.config import MODEL_MAGIC
from speechacts.evaluation import confusion_matrix, f1_scores
from speechacts.exceptions import (
    DimensionMismatchError, FingerprintMismatchError, ModelFormatError, NumericalError,
)
from speechacts.features import FeatureMatrix, SparseBinaryVector
from speechacts.models import (
    ClassifierConfig, load_model, predict, predict_scores, save_model, softmax_objective,
    train_baseline, train_lr, train_model, train_nb, train_svm,
)

FINGERPRINT = 'f' * 64


@pytest.fixture
def separable():
    """Feature j fires only for class j; feature 6 is noise"""
    rng = np.random.default_rng(3)
    y = np.repeat(np.arange(6), 10)
    X = np.zeros((60, 7))
    X[np.arange(60), y] = 1.0
    X[:, 6] = rng.integers(0, 2, 60)
    return sparse.csr_matrix(X), y


# ============================================================================
# BASELINE
# ============================================================================

def test_baseline_predicts_modal_class():
    y = np.array([2, 2, 2, 0, 5])
    model = train_baseline(np.zeros((5, 3)), y)

    np.testing.assert_allclose(predict_scores(model, np.zeros((2, 3)))[0], [.2, 0, .6, 0, 0, .2])
    assert predict(model, np.zeros((4, 3))).tolist() == [2, 2, 2, 2]


def test_baseline_ties_go_to_lowest_code():
    model = train_baseline(np.zeros((4, 1)), np.array([4, 1, 4, 1]))
    assert predict(model, np.zeros((1, 1))).tolist() == [1]


@pytest.mark.parametrize('seed', range(5))
def test_baseline_f1_closed_form(seed):
    rng = np.random.default_rng(seed)
    y = rng.choice(6, size=int(rng.integers(20, 200)), p=rng.dirichlet(np.ones(6)))
    model = train_baseline(np.zeros((len(y), 1)), y)
    predicted = predict(model, np.zeros((len(y), 1)))

    mode = int(np.bincount(y, minlength=6).argmax())
    p = np.mean(y == mode)
    scores = f1_scores(confusion_matrix(y, predicted))

    expected = np.zeros(6)
    expected[mode] = 2 * p / (1 + p)
    np.testing.assert_allclose(scores.f1, expected, atol=1e-12)
    np.testing.assert_allclose(scores.f1, f1_score(y, predicted, labels=range(6), average=None,
                                                   zero_division=0), atol=1e-12)

# ============================================================================
# NAIVE BAYES
# ============================================================================

def test_nb_matches_brute_force_bayes():
    X = np.array([
        [1, 0, 1, 0],
        [1, 1, 0, 0],
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 0, 1],
    ], dtype=float)
    y = np.array([0, 0, 0, 1, 1, 2, 2])
    alpha = 1.0
    model = train_nb(X, y, alpha=alpha)

    inputs = np.array(list(product([0, 1], repeat=4)), dtype=float)
    scores = predict_scores(model, inputs)

    for row, x in enumerate(inputs):
        joint = []
        for c in range(6):
            members = X[y == c]
            n_c = len(members)
            log_p = np.log((n_c + 1) / (len(y) + 6))
            for j in range(4):
                p1 = (members[:, j].sum() + alpha) / (n_c + 2 * alpha)
                log_p += np.log(p1 if x[j] else 1 - p1)
            joint.append(log_p)
        expected = np.array(joint) - logsumexp(joint)
        np.testing.assert_allclose(scores[row], expected, rtol=0, atol=1e-12)


def test_nb_scores_are_log_posteriors(separable):
    X, y = separable
    scores = predict_scores(train_nb(X, y), X)
    np.testing.assert_allclose(np.exp(scores).sum(axis=1), 1.0)
    assert (predict(train_nb(X, y), X) == y).all()


def test_nb_with_uniform_labels_and_empty_rows_predicts_first_code():
    y = np.repeat(np.arange(6), 2)
    model = train_nb(np.zeros((12, 3)), y)

    scores = predict_scores(model, np.zeros((1, 3)))
    np.testing.assert_allclose(scores, np.log(np.full((1, 6), 1 / 6)))
    assert predict(model, np.zeros((1, 3))).tolist() == [0]

# ============================================================================
# LOGISTIC REGRESSION
# ============================================================================

def test_softmax_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    X = sparse.random(50, 30, density=0.2, format='csr', random_state=12)
    X.data[:] = 1.0
    y = rng.integers(0, 6, 50)
    l2 = 0.1
    eps = 1e-5

    for _ in range(10):
        W = rng.normal(size=(6, 30))
        b = rng.normal(size=6)
        _, grad_W, grad_b = softmax_objective(W, b, X, y, l2)

        numeric_W = np.zeros_like(W)
        for index in np.ndindex(W.shape):
            step = np.zeros_like(W)
            step[index] = eps
            numeric_W[index] = (softmax_objective(W + step, b, X, y, l2)[0]
                                - softmax_objective(W - step, b, X, y, l2)[0]) / (2 * eps)
        numeric_b = np.zeros_like(b)
        for k in range(6):
            step = np.zeros(6)
            step[k] = eps
            numeric_b[k] = (softmax_objective(W, b + step, X, y, l2)[0]
                            - softmax_objective(W, b - step, X, y, l2)[0]) / (2 * eps)

        for analytic, numeric in ((grad_W, numeric_W), (grad_b, numeric_b)):
            relative = np.abs(analytic - numeric) / np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-3)
            assert relative.max() < 1e-6


def test_lr_learns_separable_problem(separable):
    X, y = separable
    model = train_lr(X, y, FINGERPRINT)

    trace = model.training_info['loss_trace']
    assert all(later <= earlier for earlier, later in zip(trace, trace[1:]))
    assert model.training_info['status'] in ('converged', 'max_iter', 'stalled')
    assert (predict(model, X) == y).all()
    np.testing.assert_allclose(np.exp(predict_scores(model, X)).sum(axis=1), 1.0)


def test_lr_converges_with_strong_regularization(separable):
    X, y = separable
    model = train_lr(X, y, l2=1.0, tol=1e-6, max_iter=2000)
    assert model.training_info['status'] == 'converged'


def test_lr_reports_non_finite_loss():
    X = np.array([[np.inf, 1.0], [0.0, 1.0]])
    with pytest.raises(NumericalError):
        train_lr(X, np.array([0, 1]))


def test_lr_strong_regularization_falls_back_to_priors():
    rng = np.random.default_rng(8)
    y = np.array([3] * 30 + [0, 1, 2, 4, 5] * 6)
    X = rng.integers(0, 2, (60, 5)).astype(float)

    strong = train_lr(X, y, l2=1e4)
    weak = train_lr(X, y, l2=1e-2)

    assert np.abs(strong.arrays['weights']).max() < 1e-3
    assert np.abs(strong.arrays['weights']).max() < np.abs(weak.arrays['weights']).max()
    every_input = np.array(list(product([0, 1], repeat=5)), dtype=float)
    assert set(predict(strong, every_input).tolist()) == {3}

# ============================================================================
# LINEAR SVM
# ============================================================================

def test_svm_separates_and_is_seeded(separable):
    X, y = separable
    first = train_svm(X, y, seed=5)
    second = train_svm(X, y, seed=5)

    assert (predict(first, X) == y).all()
    np.testing.assert_array_equal(first.arrays['weights'], second.arrays['weights'])
    np.testing.assert_array_equal(first.arrays['bias'], second.arrays['bias'])
    assert first.training_info['steps'] == 60 * first.hyperparameters['epochs']


def test_svm_requires_positive_l2(separable):
    X, y = separable
    with pytest.raises(ValueError):
        train_svm(X, y, l2=0.0)


def test_svm_trained_on_one_class_always_predicts_it():
    X = np.random.default_rng(9).integers(0, 2, (20, 4)).astype(float)
    model = train_svm(X, np.full(20, 3))

    every_input = np.array(list(product([0, 1], repeat=4)), dtype=float)
    assert set(predict(model, every_input).tolist()) == {3}


@pytest.mark.parametrize('shift', [-50.0, 3.0, 100.0])
def test_constant_score_shift_keeps_predictions(separable, shift):
    X, y = separable
    model = train_svm(X, y, FINGERPRINT)
    shifted = replace(model, arrays={**model.arrays, 'bias': model.arrays['bias'] + shift})
    inputs = sparse.random(100, 7, density=0.4, format='csr', random_state=10)
    inputs.data[:] = 1.0

    np.testing.assert_allclose(predict_scores(shifted, inputs), predict_scores(model, inputs) + shift)
    np.testing.assert_array_equal(predict(shifted, inputs), predict(model, inputs))

# ============================================================================
# DISPATCH, COMPATIBILITY AND PERSISTENCE
# ============================================================================

@pytest.mark.parametrize('kind', ['baseline', 'naive_bayes', 'logistic_regression', 'linear_svm'])
def test_model_file_round_trip(kind, separable, tmp_path):
    X, y = separable
    model = train_model(ClassifierConfig(kind=kind), X, y, FINGERPRINT)
    path = save_model(model, tmp_path / 'model.bin')

    loaded = load_model(path)

    assert loaded.kind == kind and loaded.dimension == 7
    assert loaded.vocab_fingerprint == FINGERPRINT
    np.testing.assert_array_equal(predict_scores(loaded, X), predict_scores(model, X))
    assert save_model(loaded, tmp_path / 'again.bin').read_bytes() == path.read_bytes()


def test_unknown_kind_is_rejected():
    with pytest.raises(ValueError):
        ClassifierConfig(kind='random_forest')


def test_compatibility_checks(separable):
    X, y = separable
    model = train_nb(X, y, FINGERPRINT)

    with pytest.raises(FingerprintMismatchError):
        predict_scores(model, X, SimpleNamespace(fingerprint='0' * 64))
    with pytest.raises(DimensionMismatchError):
        predict_scores(model, np.zeros((1, 8)))
    assert predict_scores(model, X, SimpleNamespace(fingerprint=FINGERPRINT)).shape == (60, 6)


def test_tagged_features_from_another_vocabulary_are_refused(separable):
    X, y = separable
    model = train_nb(X, y, FINGERPRINT)

    with pytest.raises(FingerprintMismatchError):
        predict(model, FeatureMatrix(X, '0' * 64))
    with pytest.raises(FingerprintMismatchError):
        predict_scores(model, SparseBinaryVector((0, 6), 7, '0' * 64))
    assert predict(model, FeatureMatrix(X, FINGERPRINT)).tolist() == predict(model, X).tolist()
    assert predict(model, SparseBinaryVector((2,), 7, FINGERPRINT)).tolist() == [2]


def test_training_takes_the_fingerprint_from_tagged_features(separable):
    X, y = separable
    tagged = FeatureMatrix(X, FINGERPRINT)

    assert train_nb(tagged, y).vocab_fingerprint == FINGERPRINT
    with pytest.raises(FingerprintMismatchError):
        train_lr(tagged, y, '0' * 64)


def test_model_without_fingerprint_cannot_be_saved(separable, tmp_path):
    X, y = separable
    with pytest.raises(ModelFormatError):
        save_model(train_baseline(X, y), tmp_path / 'model.bin')


def test_corrupt_model_files(separable, tmp_path):
    X, y = separable
    path = save_model(train_lr(X, y, FINGERPRINT, max_iter=5), tmp_path / 'model.bin')
    payload = path.read_bytes()

    cases = {
        'magic': b'NOT-A-MODEL\n' + payload[len(MODEL_MAGIC):],
        'truncated': payload[:-8],
        'trailing': payload + b'\x00',
        'version': payload.replace(b'"format_version":1', b'"format_version":9'),
    }
    for name, content in cases.items():
        broken = tmp_path / f'{name}.bin'
        broken.write_bytes(content)
        with pytest.raises(ModelFormatError):
            load_model(broken)
