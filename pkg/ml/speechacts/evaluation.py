"""
Evaluation Module
=================
K-fold cross-validation with a pooled confusion matrix, per-class and
support-weighted F1, the granularity experiment (Twitter-wide, per topic
type, per topic) and the semantic/syntactic feature ablation.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.metrics import confusion_matrix as sk_confusion_matrix

from .config import (
    DEFAULT_FOLDS, DEFAULT_SEED, GRANULARITIES, REPORT_COLUMNS, SCORE_DECIMALS,
    STRATIFIED_FOLDS,
)
from .corpus import NUM_CLASSES, Corpus, SpeechAct, partition_by
from .exceptions import EvaluationError
from .features import (
    FeatureVocabulary, TweetAnalysis, VocabularyConfig, analyze_corpus, build_vocabulary,
    vectorize_analyses,
)
from .models import ClassifierConfig, predict, train_model
from .text import LexiconBundle

logger = logging.getLogger(__name__)

# Report column -> class, in published table order
COLUMN_CLASSES = {
    'As': SpeechAct.ASSERTION,
    'Ex': SpeechAct.EXPRESSION,
    'Qu': SpeechAct.QUESTION,
    'Rc': SpeechAct.RECOMMENDATION,
    'Rq': SpeechAct.REQUEST,
    'Mis': SpeechAct.MISCELLANEOUS,
}

# ============================================================================
# FOLDS
# ============================================================================

def fold_assignments(labels: Sequence[int], k: int = DEFAULT_FOLDS,
                     stratified: bool = STRATIFIED_FOLDS, seed: int = DEFAULT_SEED) -> np.ndarray:
    """
    Fold number of every tweet

    Tweets are shuffled (within each class when stratified, classes laid out
    in code order) and dealt round-robin to the k folds, so fold sizes differ
    by at most one and every class is spread as evenly as its size allows.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    if k < 2:
        raise EvaluationError(f"need at least 2 folds, got {k}")
    if n < k:
        raise EvaluationError(f"cannot split {n} tweets into {k} folds")

    rng = np.random.default_rng(seed)
    if stratified:
        order = np.concatenate([rng.permutation(np.flatnonzero(labels == code))
                                for code in range(NUM_CLASSES)])
    else:
        order = rng.permutation(n)

    folds = np.empty(n, dtype=np.int64)
    folds[order] = np.arange(n) % k
    return folds


def kfold_split(corpus: Corpus, k: int = DEFAULT_FOLDS, stratified: bool = STRATIFIED_FOLDS,
                seed: int = DEFAULT_SEED) -> List[Tuple[List[str], List[str]]]:
    """
    Train/test id lists per fold

    Args:
        corpus: corpus (labeled when stratified)
        k: number of folds
        stratified: keep class proportions per fold
        seed: shuffling seed

    Returns:
        list of (train ids, test ids), ids in corpus order
    """
    labels = corpus.labels() if stratified else np.zeros(len(corpus), dtype=np.int64)
    folds = fold_assignments(labels, k, stratified, seed)
    ids = np.array(corpus.ids, dtype=object)
    return [(list(ids[folds != f]), list(ids[folds == f])) for f in range(k)]

# ============================================================================
# SCORES
# ============================================================================

def confusion_matrix(y_true, y_pred) -> np.ndarray:
    """6x6 counts, rows true class, columns predicted"""
    return sk_confusion_matrix(y_true, y_pred, labels=list(range(NUM_CLASSES)))


@dataclass(frozen=True)
class ClassScores:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    weighted_f1: float


def f1_scores(cm) -> ClassScores:
    """
    Per-class precision/recall/F1 and the support-weighted F1

    Classes with P + R = 0 get F1 = 0; classes with zero support carry zero
    weight.
    """
    cm = np.asarray(cm, dtype=np.float64)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise ValueError(f"confusion matrix must be square, got shape {cm.shape}")
    if cm.sum() <= 0:
        raise ValueError("confusion matrix is empty")

    true_positive = np.diag(cm)
    predicted = cm.sum(axis=0)
    support = cm.sum(axis=1)
    precision = np.divide(true_positive, predicted, out=np.zeros_like(true_positive), where=predicted > 0)
    recall = np.divide(true_positive, support, out=np.zeros_like(true_positive), where=support > 0)
    total = precision + recall
    f1 = np.divide(2 * precision * recall, total, out=np.zeros_like(total), where=total > 0)
    weighted = float(np.dot(support, f1) / support.sum()) if support.sum() > 0 else 0.0
    return ClassScores(precision, recall, f1, support.astype(np.int64), weighted)

# ============================================================================
# REPORTS
# ============================================================================

@dataclass
class EvalReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    weighted_f1: float
    confusion: np.ndarray
    config: Dict[str, object] = field(default_factory=dict)
    folds: List[Dict[str, object]] = field(default_factory=list)
    partitions: List[Dict[str, object]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @classmethod
    def from_confusion(cls, cm, **extra) -> 'EvalReport':
        scores = f1_scores(cm)
        return cls(scores.precision, scores.recall, scores.f1, scores.support,
                   scores.weighted_f1, np.asarray(cm, dtype=np.int64), **extra)

    def row(self) -> Dict[str, float]:
        """F1 per published column (As, Ex, Qu, Rc, Rq, Mis) plus Avg"""
        row = {column: float(self.f1[act]) for column, act in COLUMN_CLASSES.items()}
        row['Avg'] = float(self.weighted_f1)
        return row

    def to_dict(self) -> dict:
        return {
            'config': self.config,
            'row': self.row(),
            'per_class': {
                act.label: {
                    'precision': float(self.precision[act]),
                    'recall': float(self.recall[act]),
                    'f1': float(self.f1[act]),
                    'support': int(self.support[act]),
                }
                for act in SpeechAct
            },
            'weighted_f1': float(self.weighted_f1),
            'confusion_matrix': self.confusion.tolist(),
            'folds': self.folds,
            'partitions': self.partitions,
            'warnings': self.warnings,
        }


def aggregate_reports(reports: Sequence[EvalReport], **extra) -> EvalReport:
    """
    Support-weighted combination of per-partition reports

    Per-class precision/recall/F1 are averaged over partitions with weights
    equal to each partition's class support; the weighted F1 then follows
    from the combined per-class values and supports.
    """
    if not reports:
        raise EvaluationError("no reports to aggregate")

    supports = np.array([r.support for r in reports], dtype=np.float64)       # (p, 6)
    totals = supports.sum(axis=0)

    def weighted(metric: str) -> np.ndarray:
        values = np.array([getattr(r, metric) for r in reports])
        return np.divide((supports * values).sum(axis=0), totals,
                         out=np.zeros(NUM_CLASSES), where=totals > 0)

    f1 = weighted('f1')
    weighted_f1 = float(np.dot(totals, f1) / totals.sum())
    confusion = np.sum([r.confusion for r in reports], axis=0)
    return EvalReport(weighted('precision'), weighted('recall'), f1,
                      totals.astype(np.int64), weighted_f1, confusion, **extra)


def results_table(reports: Dict[str, EvalReport], decimals: int = SCORE_DECIMALS) -> pd.DataFrame:
    """Rows = configurations, columns = As/Ex/Qu/Rc/Rq/Mis/Avg"""
    frame = pd.DataFrame.from_dict({name: report.row() for name, report in reports.items()},
                                   orient='index', columns=list(REPORT_COLUMNS))
    return frame.round(decimals)

# ============================================================================
# CROSS-VALIDATION
# ============================================================================

def _run_fold(fold: int, train: np.ndarray, test: np.ndarray, corpus: Corpus,
              analyses: Sequence[TweetAnalysis], labels: np.ndarray, lexicons: LexiconBundle,
              classifier: ClassifierConfig, vocab_config: VocabularyConfig, feature_subset: str,
              shared_vocab: Optional[FeatureVocabulary]):
    train_analyses = [analyses[i] for i in train]
    if shared_vocab is None:
        vocab = build_vocabulary(corpus.take(train), lexicons, vocab_config, train_analyses)
    else:
        vocab = shared_vocab
    selection_fingerprint = vocab.fingerprint
    vocab = vocab.restrict(feature_subset)

    X_train = vectorize_analyses(train_analyses, vocab)
    X_test = vectorize_analyses([analyses[i] for i in test], vocab)
    model = train_model(classifier, X_train, labels[train], vocab.fingerprint)
    predictions = predict(model, X_test)

    record = {
        'fold': fold,
        'n_train': int(len(train)),
        'n_test': int(len(test)),
        'dimension': vocab.dimension,
        'vocab_fingerprint': selection_fingerprint,
    }
    if 'status' in model.training_info:
        record['optimizer_status'] = model.training_info['status']
    return test, predictions, record


def cross_validate(corpus: Corpus, lexicons: LexiconBundle,
                   classifier: ClassifierConfig = ClassifierConfig(),
                   vocab_config: VocabularyConfig = VocabularyConfig(),
                   feature_subset: str = 'all', selection_mode: str = 'per_fold',
                   k: int = DEFAULT_FOLDS, stratified: bool = STRATIFIED_FOLDS,
                   seed: int = DEFAULT_SEED, jobs: int = 1,
                   analyses: Optional[Sequence[TweetAnalysis]] = None) -> EvalReport:
    """
    K-fold cross-validation with one pooled confusion matrix

    Args:
        corpus: labeled corpus with at least k tweets
        lexicons: lexicon bundle
        classifier: classifier kind and hyperparameters
        vocab_config: caps, thresholds, blocklist
        feature_subset: 'all', 'semantic' or 'syntactic'
        selection_mode: 'per_fold' (vocabulary from each training split) or
                        'whole_corpus' (one vocabulary from every tweet)
        k: number of folds
        stratified: stratify folds by class
        seed: fold shuffling seed
        jobs: folds run concurrently (joblib); results do not depend on it
        analyses: precomputed analyses aligned with ``corpus``

    Returns:
        EvalReport
    """
    if selection_mode not in ('per_fold', 'whole_corpus'):
        raise ValueError(f"unknown selection mode '{selection_mode}'")
    if feature_subset not in ('all', 'semantic', 'syntactic'):
        raise ValueError(f"unknown feature subset '{feature_subset}'")

    labels = corpus.labels()
    folds = fold_assignments(labels, k, stratified, seed)
    if analyses is None:
        analyses = analyze_corpus(corpus, lexicons, vocab_config.n_max, vocab_config.include_siblings)

    shared_vocab = None
    if selection_mode == 'whole_corpus':
        shared_vocab = build_vocabulary(corpus, lexicons, vocab_config, analyses)

    splits = [(np.flatnonzero(folds != f), np.flatnonzero(folds == f)) for f in range(k)]
    results = Parallel(n_jobs=jobs)(
        delayed(_run_fold)(f, train, test, corpus, analyses, labels, lexicons,
                           classifier, vocab_config, feature_subset, shared_vocab)
        for f, (train, test) in enumerate(splits)
    )

    predicted = np.empty(len(labels), dtype=np.int64)
    records = []
    for test, predictions, record in results:
        predicted[test] = predictions
        records.append(record)

    report = EvalReport.from_confusion(
        confusion_matrix(labels, predicted),
        config={
            'classifier': classifier.kind,
            'feature_subset': feature_subset,
            'selection_mode': selection_mode,
            'folds': k,
            'stratified': stratified,
            'seed': seed,
            'n_tweets': len(corpus),
        },
        folds=records,
    )
    if corpus.unparsed_count:
        report.warnings.append(f"{corpus.unparsed_count} tweets without a parse")
    logger.info(f"{classifier.kind} / {feature_subset}: weighted F1 {report.weighted_f1:.3f} "
                f"over {len(corpus)} tweets")
    return report

# ============================================================================
# GRANULARITY EXPERIMENT
# ============================================================================

def granularity_experiment(corpus: Corpus, lexicons: LexiconBundle,
                           classifier: ClassifierConfig = ClassifierConfig(),
                           vocab_config: VocabularyConfig = VocabularyConfig(),
                           granularities: Sequence[str] = GRANULARITIES,
                           feature_subset: str = 'all', selection_mode: str = 'per_fold',
                           k: int = DEFAULT_FOLDS, stratified: bool = STRATIFIED_FOLDS,
                           seed: int = DEFAULT_SEED, jobs: int = 1) -> Dict[str, EvalReport]:
    """
    Cross-validate within every partition of each granularity

    Partitions smaller than k are skipped with a warning; the remaining
    partition reports are combined with aggregate_reports. A granularity
    whose partitions are all skipped is left out of the result.

    Returns:
        dict granularity -> aggregated EvalReport
    """
    analyses = analyze_corpus(corpus, lexicons, vocab_config.n_max, vocab_config.include_siblings)
    position = {tweet_id: i for i, tweet_id in enumerate(corpus.ids)}
    reports = {}

    for granularity in granularities:
        partition_reports = []
        partitions = []
        warnings = []
        for key, part in partition_by(corpus, granularity):
            if len(part) < k:
                message = f"{granularity}: partition '{key}' has {len(part)} tweets (< {k} folds), skipped"
                logger.warning(message)
                warnings.append(message)
                partitions.append({'key': key, 'n_tweets': len(part), 'skipped': True})
                continue
            part_analyses = [analyses[position[t.id]] for t in part]
            report = cross_validate(part, lexicons, classifier, vocab_config, feature_subset,
                                    selection_mode, k, stratified, seed, jobs, part_analyses)
            partition_reports.append(report)
            partitions.append({'key': key, 'n_tweets': len(part), 'skipped': False,
                               'weighted_f1': report.weighted_f1})

        if not partition_reports:
            logger.warning(f"{granularity}: every partition has fewer than {k} tweets, granularity left out")
            continue

        config = dict(partition_reports[0].config, granularity=granularity, n_tweets=len(corpus))
        reports[granularity] = aggregate_reports(partition_reports, config=config,
                                                 partitions=partitions, warnings=warnings)

    if not reports:
        raise EvaluationError(f"no granularity has a partition with at least {k} tweets")
    return reports
