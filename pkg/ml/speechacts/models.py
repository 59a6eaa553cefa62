"""
Models Module
=============
Multi-class classifiers over sparse binary feature matrices:

- baseline: always the most frequent training class
- naive_bayes: Bernoulli naive Bayes, Laplace smoothing
- logistic_regression: softmax regression, full-batch gradient descent
  with backtracking line search
- linear_svm: one-vs-rest hinge loss, Pegasos stochastic subgradient

Scores are (n, 6) arrays; prediction is the argmax with ties going to the
lowest class code.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .config import (
    CLASSIFIER_KINDS, DEFAULT_SEED, LINE_SEARCH_ARMIJO, LINE_SEARCH_MIN_STEP,
    LINE_SEARCH_SHRINK, LR_PARAMS, MODEL_FORMAT_VERSION, MODEL_MAGIC, NB_PARAMS,
    SVM_PARAMS,
)
from .corpus import NUM_CLASSES, SpeechAct
from .exceptions import (
    DimensionMismatchError, FingerprintMismatchError, ModelFormatError, NumericalError,
)

logger = logging.getLogger(__name__)

ARRAY_DTYPE = '<f8'

# ============================================================================
# MODEL CONTAINER
# ============================================================================

@dataclass(frozen=True)
class ClassifierConfig:
    """Classifier kind plus every hyperparameter (l2=None means 1/n_train)"""

    kind: str = 'logistic_regression'
    l2: Optional[float] = None
    tol: float = LR_PARAMS['tol']
    max_iter: int = LR_PARAMS['max_iter']
    epochs: int = SVM_PARAMS['epochs']
    alpha: float = NB_PARAMS['alpha']
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier kind '{self.kind}' (expected one of {CLASSIFIER_KINDS})")
        if self.l2 is not None and self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")

    def resolved_l2(self, n_train: int) -> float:
        return float(self.l2) if self.l2 is not None else 1.0 / n_train


@dataclass(frozen=True, eq=False)
class TrainedModel:
    kind: str
    vocab_fingerprint: str
    dimension: int
    hyperparameters: Dict[str, object]
    arrays: Dict[str, np.ndarray]
    training_info: Dict[str, object] = field(default_factory=dict)
    classes: Tuple[int, ...] = tuple(int(act) for act in SpeechAct)

# ============================================================================
# HELPERS
# ============================================================================

def _untag(X) -> Tuple[object, str]:
    """Raw rows of X and the vocabulary fingerprint it is tagged with ('' if untagged)"""
    fingerprint = getattr(X, 'vocab_fingerprint', '')
    if hasattr(X, 'rows') and sparse.issparse(X.rows):
        X = X.rows
    elif hasattr(X, 'indices') and hasattr(X, 'to_dense') and not sparse.issparse(X):
        X = X.to_dense()
    return X, fingerprint


def _check_fingerprints(expected: str, tagged: str):
    if expected and tagged and expected != tagged:
        raise FingerprintMismatchError(
            f"model was trained against vocabulary {expected[:12]}, features come from {tagged[:12]}"
        )


def _as_csr(X) -> sparse.csr_matrix:
    X, _ = _untag(X)
    if sparse.issparse(X):
        return sparse.csr_matrix(X, dtype=np.float64)
    return sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))


def _check_training_data(X, y, vocab_fingerprint: str = '') -> Tuple[sparse.csr_matrix, np.ndarray, str]:
    X, tagged = _untag(X)
    _check_fingerprints(vocab_fingerprint, tagged)
    X = _as_csr(X)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("training set is empty")
    if X.shape[0] != len(y):
        raise ValueError(f"{X.shape[0]} rows but {len(y)} labels")
    if y.min() < 0 or y.max() >= NUM_CLASSES:
        raise ValueError("labels must be class codes 0-5")
    return X, y, vocab_fingerprint or tagged


def _check_finite(name: str, *arrays):
    for array in arrays:
        if not np.all(np.isfinite(array)):
            raise NumericalError(f"{name}: non-finite parameters")

# ============================================================================
# BASELINE
# ============================================================================

def train_baseline(X, y, vocab_fingerprint: str = '') -> TrainedModel:
    """Majority class; scores are training class frequencies"""
    X, y, vocab_fingerprint = _check_training_data(X, y, vocab_fingerprint)
    frequencies = np.bincount(y, minlength=NUM_CLASSES) / len(y)
    mode = int(np.argmax(frequencies))
    logger.debug(f"baseline: modal class {SpeechAct(mode).label} ({frequencies[mode]:.3f})")
    return TrainedModel('baseline', vocab_fingerprint, X.shape[1], {},
                        {'class_frequencies': frequencies},
                        {'modal_class': mode, 'n_train': int(len(y))})

# ============================================================================
# BERNOULLI NAIVE BAYES
# ============================================================================

def train_nb(X, y, vocab_fingerprint: str = '', alpha: float = NB_PARAMS['alpha']) -> TrainedModel:
    """
    Bernoulli naive Bayes

    P(f=1|c) = (F_c + alpha) / (N_c + 2 alpha), prior (N_c + 1) / (N + 6).
    """
    X, y, vocab_fingerprint = _check_training_data(X, y, vocab_fingerprint)
    Y = np.eye(NUM_CLASSES)[y]                                   # (n, 6)
    class_counts = Y.sum(axis=0)                                 # N_c
    feature_counts = np.asarray((X.T @ Y).T)                     # (6, d) F_c

    denominator = (class_counts + 2 * alpha)[:, None]
    log_p1 = np.log(feature_counts + alpha) - np.log(denominator)
    log_p0 = np.log(class_counts[:, None] - feature_counts + alpha) - np.log(denominator)
    log_prior = np.log(class_counts + 1) - np.log(len(y) + NUM_CLASSES)

    return TrainedModel('naive_bayes', vocab_fingerprint, X.shape[1], {'alpha': float(alpha)},
                        {'log_prior': log_prior, 'log_p1': log_p1, 'log_p0': log_p0},
                        {'n_train': int(len(y))})

# ============================================================================
# LOGISTIC REGRESSION
# ============================================================================

def softmax_objective(W: np.ndarray, b: np.ndarray, X, y, l2: float):
    """
    Mean cross-entropy of softmax regression plus (l2/2)||W||^2

    Args:
        W: (6, d) weights
        b: (6,) bias, not regularized
        X: (n, d) features
        y: (n,) class codes
        l2: regularization strength

    Returns:
        (loss, grad_W, grad_b)
    """
    n = X.shape[0]
    rows = np.arange(n)
    Z = np.asarray(X @ W.T) + b
    log_norm = logsumexp(Z, axis=1)
    loss = float(np.mean(log_norm - Z[rows, y]) + 0.5 * l2 * np.sum(W * W))

    P = np.exp(Z - log_norm[:, None])
    P[rows, y] -= 1.0
    grad_W = np.asarray(X.T @ P).T / n + l2 * W
    grad_b = P.mean(axis=0)
    return loss, grad_W, grad_b


def train_lr(X, y, vocab_fingerprint: str = '', l2: Optional[float] = None,
             tol: float = LR_PARAMS['tol'], max_iter: int = LR_PARAMS['max_iter']) -> TrainedModel:
    """
    Softmax regression by gradient descent with Armijo backtracking

    Stops when the gradient max-norm drops below ``tol`` (converged), after
    ``max_iter`` steps (max_iter), or when no step size decreases the loss
    (stalled). The step size doubles after every accepted step.
    """
    X, y, vocab_fingerprint = _check_training_data(X, y, vocab_fingerprint)
    n, d = X.shape
    l2 = float(l2) if l2 is not None else 1.0 / n
    if l2 < 0:
        raise ValueError(f"l2 must be >= 0, got {l2}")

    W = np.zeros((NUM_CLASSES, d))
    b = np.zeros(NUM_CLASSES)
    loss, grad_W, grad_b = softmax_objective(W, b, X, y, l2)
    if not np.isfinite(loss):
        raise NumericalError(f"logistic regression: non-finite initial loss (l2={l2})")

    trace = [loss]
    step = 1.0
    status = 'max_iter'
    iterations = 0

    while True:
        gradient_norm = max(np.abs(grad_W).max(initial=0.0), np.abs(grad_b).max())
        if gradient_norm < tol:
            status = 'converged'
            break
        if iterations >= max_iter:
            break

        squared_norm = np.sum(grad_W * grad_W) + np.sum(grad_b * grad_b)
        while step >= LINE_SEARCH_MIN_STEP:
            W_new = W - step * grad_W
            b_new = b - step * grad_b
            new_loss, new_grad_W, new_grad_b = softmax_objective(W_new, b_new, X, y, l2)
            if np.isfinite(new_loss) and new_loss <= loss - LINE_SEARCH_ARMIJO * step * squared_norm:
                break
            step *= LINE_SEARCH_SHRINK
        else:
            status = 'stalled'
            break

        W, b, loss, grad_W, grad_b = W_new, b_new, new_loss, new_grad_W, new_grad_b
        trace.append(loss)
        iterations += 1
        step *= 2.0

    _check_finite('logistic regression', W, b)
    logger.debug(f"logistic regression: {status} after {iterations} iterations, loss {loss:.6f}")

    return TrainedModel('logistic_regression', vocab_fingerprint, d,
                        {'l2': l2, 'tol': float(tol), 'max_iter': int(max_iter)},
                        {'weights': W, 'bias': b},
                        {'status': status, 'iterations': iterations,
                         'final_loss': loss, 'loss_trace': trace, 'n_train': int(n)})

# ============================================================================
# LINEAR SVM
# ============================================================================

RESCALE_THRESHOLD = 1e-9


def train_svm(X, y, vocab_fingerprint: str = '', l2: Optional[float] = None,
              epochs: int = SVM_PARAMS['epochs'], seed: int = DEFAULT_SEED) -> TrainedModel:
    """
    One-vs-rest linear SVM trained with Pegasos

    All six binary problems share one sample order per epoch (a permutation
    from ``seed``) and the step size 1/(l2 t). The bias is the weight of a
    constant feature and is regularized with the rest. Weights are kept as
    scale * V so the shrink step is O(1).
    """
    X, y, vocab_fingerprint = _check_training_data(X, y, vocab_fingerprint)
    n, d = X.shape
    l2 = float(l2) if l2 is not None else 1.0 / n
    if l2 <= 0:
        raise ValueError(f"l2 must be > 0 for the SVM, got {l2}")

    rng = np.random.default_rng(seed)
    V = np.zeros((NUM_CLASSES, d + 1))
    scale = 1.0
    t = 0
    violations = 0

    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (l2 * t)
            start, end = X.indptr[i], X.indptr[i + 1]
            columns = np.append(X.indices[start:end], d)
            values = np.append(X.data[start:end], 1.0)

            targets = np.full(NUM_CLASSES, -1.0)
            targets[y[i]] = 1.0
            margins = targets * scale * (V[:, columns] @ values)
            violated = margins < 1.0

            # 1 - eta * l2
            shrink = 1.0 - 1.0 / t
            if shrink <= 0.0:
                V[:] = 0.0
                scale = 1.0
            else:
                scale *= shrink

            if violated.any():
                violations += int(violated.sum())
                rows = np.flatnonzero(violated)
                V[np.ix_(rows, columns)] += np.outer(eta * targets[rows] / scale, values)

            if scale < RESCALE_THRESHOLD:
                V *= scale
                scale = 1.0

    W = V[:, :d] * scale
    b = V[:, d] * scale
    _check_finite('linear svm', W, b)
    logger.debug(f"linear svm: {t} steps, {violations} margin violations")

    return TrainedModel('linear_svm', vocab_fingerprint, d,
                        {'l2': l2, 'epochs': int(epochs), 'seed': int(seed)},
                        {'weights': W, 'bias': b},
                        {'steps': t, 'n_train': int(n)})

# ============================================================================
# DISPATCH AND PREDICTION
# ============================================================================

def train_model(config: ClassifierConfig, X, y, vocab_fingerprint: str = '') -> TrainedModel:
    """Train the classifier named by ``config.kind``"""
    if config.kind == 'baseline':
        return train_baseline(X, y, vocab_fingerprint)
    if config.kind == 'naive_bayes':
        return train_nb(X, y, vocab_fingerprint, alpha=config.alpha)
    if config.kind == 'logistic_regression':
        return train_lr(X, y, vocab_fingerprint, l2=config.l2, tol=config.tol, max_iter=config.max_iter)
    return train_svm(X, y, vocab_fingerprint, l2=config.l2, epochs=config.epochs, seed=config.seed)


def _check_compatible(model: TrainedModel, X, vocab=None) -> sparse.csr_matrix:
    if vocab is not None and vocab.fingerprint != model.vocab_fingerprint:
        raise FingerprintMismatchError(
            f"model was trained against vocabulary {model.vocab_fingerprint[:12]}, "
            f"got {vocab.fingerprint[:12]}"
        )
    X, tagged = _untag(X)
    _check_fingerprints(model.vocab_fingerprint, tagged)
    X = _as_csr(X)
    if X.shape[1] != model.dimension:
        raise DimensionMismatchError(f"vectors have {X.shape[1]} columns, model expects {model.dimension}")
    return X


def predict_scores(model: TrainedModel, X, vocab=None) -> np.ndarray:
    """
    Per-class scores, shape (n, 6) (one row for a single vector)

    Log-posteriors for naive Bayes and logistic regression, margins for the
    SVM, training class frequencies for the baseline.
    """
    X = _check_compatible(model, X, vocab)
    arrays = model.arrays

    if model.kind == 'baseline':
        return np.tile(arrays['class_frequencies'], (X.shape[0], 1))

    if model.kind == 'naive_bayes':
        log_p1, log_p0 = arrays['log_p1'], arrays['log_p0']
        joint = np.asarray(X @ (log_p1 - log_p0).T) + log_p0.sum(axis=1) + arrays['log_prior']
        return joint - logsumexp(joint, axis=1, keepdims=True)

    Z = np.asarray(X @ arrays['weights'].T) + arrays['bias']
    if model.kind == 'logistic_regression':
        return Z - logsumexp(Z, axis=1, keepdims=True)
    return Z


def predict(model: TrainedModel, X, vocab=None) -> np.ndarray:
    """Class codes, argmax of scores with ties to the lowest code"""
    return np.argmax(predict_scores(model, X, vocab), axis=1)

# ============================================================================
# PERSISTENCE
# ============================================================================

def save_model(model: TrainedModel, path) -> Path:
    """
    Write a model file

    Layout: MODEL_MAGIC, one line of JSON header (sorted keys: format
    version, kind, vocabulary fingerprint, classes, dimension,
    hyperparameters, training info, array specs), then each array's
    little-endian float64 bytes in header order.
    """
    if not model.vocab_fingerprint:
        raise ModelFormatError("cannot save a model without a vocabulary fingerprint")

    names = sorted(model.arrays)
    arrays = [np.ascontiguousarray(model.arrays[name], dtype=ARRAY_DTYPE) for name in names]
    header = {
        'format_version': MODEL_FORMAT_VERSION,
        'kind': model.kind,
        'vocab_fingerprint': model.vocab_fingerprint,
        'classes': list(model.classes),
        'dimension': model.dimension,
        'hyperparameters': model.hyperparameters,
        'training_info': model.training_info,
        'arrays': [{'name': name, 'shape': list(a.shape), 'dtype': ARRAY_DTYPE}
                   for name, a in zip(names, arrays)],
    }

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as handle:
        handle.write(MODEL_MAGIC)
        handle.write(json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8'))
        handle.write(b'\n')
        for array in arrays:
            handle.write(array.tobytes())
    return path


def load_model(path) -> TrainedModel:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")
    payload = path.read_bytes()

    if not payload.startswith(MODEL_MAGIC):
        raise ModelFormatError(f"{path}: not a model file (bad magic)")
    end = payload.find(b'\n', len(MODEL_MAGIC))
    if end < 0:
        raise ModelFormatError(f"{path}: truncated header")
    try:
        header = json.loads(payload[len(MODEL_MAGIC):end].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: unreadable header ({exc})") from exc

    if header.get('format_version') != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"{path}: format version {header.get('format_version')} "
                               f"(supported: {MODEL_FORMAT_VERSION})")
    if not header.get('vocab_fingerprint'):
        raise ModelFormatError(f"{path}: missing vocabulary fingerprint")
    if header.get('kind') not in CLASSIFIER_KINDS:
        raise ModelFormatError(f"{path}: unknown model kind {header.get('kind')!r}")

    arrays = {}
    offset = end + 1
    for block in header.get('arrays', []):
        shape = tuple(block['shape'])
        count = int(np.prod(shape, dtype=np.int64))
        size = count * np.dtype(ARRAY_DTYPE).itemsize
        if offset + size > len(payload):
            raise ModelFormatError(f"{path}: truncated parameter block '{block['name']}'")
        arrays[block['name']] = np.frombuffer(payload, dtype=ARRAY_DTYPE, count=count,
                                             offset=offset).reshape(shape).copy()
        offset += size
    if offset != len(payload):
        raise ModelFormatError(f"{path}: {len(payload) - offset} unexpected trailing bytes")

    return TrainedModel(
        kind=header['kind'],
        vocab_fingerprint=header['vocab_fingerprint'],
        dimension=int(header['dimension']),
        hyperparameters=header.get('hyperparameters', {}),
        arrays=arrays,
        training_info=header.get('training_info', {}),
        classes=tuple(header.get('classes', range(NUM_CLASSES))),
    )
