"""
Speech Act Toolkit Command Line
===============================
Subcommands:
    train      build a vocabulary and train one classifier
    predict    label tweets with a trained model
    evaluate   cross-validation tables (classifiers, feature subsets, granularities)
    features   dump the selected vocabulary with selection scores
    synth      write a synthetic labeled corpus with parses

Usage:
    cd ml
    python -m speechacts synth --out data/tweets.jsonl --parses-out data/tweets.parses
    python -m speechacts evaluate --corpus data/tweets.jsonl --parses data/tweets.parses --classifier all

Exit codes: 0 success, 2 usage, 3 data/format error, 4 numerical error.
"""

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .config import (
    CLASSIFIER_KINDS, CLASSIFIER_LABELS, CONSOLE_WIDTH, CORPUS_FILE, CUE_MODES, DEFAULT_FOLDS,
    DEFAULT_SEED, EXIT_DATA_ERROR, EXIT_NUMERICAL_ERROR, EXIT_OK, EXIT_USAGE, FEATURE_SUBSETS,
    GRANULARITIES, INCLUDE_SIBLING_SUBTREES, LOG_DATE_FORMAT, LOG_FORMAT, LR_PARAMS,
    MIN_CANDIDATE_COUNT, MIN_SYNTHETIC_SIZE, MODELS_DIR, NGRAM_CAP, PARSES_FILE, REPORTS_DIR,
    SUBTREE_CAP, SVM_PARAMS, ensure_output_dirs, get_model_filename, get_report_filename,
    get_vocabulary_filename,
)
from .corpus import Corpus, SpeechAct, load_corpus
from .evaluation import EvalReport, cross_validate, granularity_experiment, results_table
from .exceptions import NumericalError, SpeechActError
from .features import (
    FeatureVocabulary, VocabularyConfig, analyze_corpus, build_vocabulary, check_lexicons,
    load_vocabulary, save_vocabulary, vectorize_analyses,
)
from .models import ClassifierConfig, load_model, predict_scores, save_model, train_model
from .selection import load_blocklist
from .synthetic import write_synthetic_corpus
from .text import load_lexicon_bundle
from .validators import ValidationResult, validate_corpus

logger = logging.getLogger(__name__)

# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def print_header(text: str):
    """Print formatted header"""
    print()
    print("=" * CONSOLE_WIDTH)
    print(text.center(CONSOLE_WIDTH))
    print("=" * CONSOLE_WIDTH)
    print()


def print_subheader(text: str):
    """Print formatted subheader"""
    print()
    print("-" * CONSOLE_WIDTH)
    print(text)
    print("-" * CONSOLE_WIDTH)


def fingerprint_of(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode('utf-8')).hexdigest()

# ============================================================================
# RUN CONFIGURATION
# ============================================================================

OUTPUT_FIELDS = ('model_out', 'vocab_out', 'report_out', 'plots_dir', 'output')
# Settings that change how a run executes, never what it produces
EXECUTION_FIELDS = ('jobs',)


@dataclass
class RunConfig:
    """Effective settings of one command; every default comes from config.py"""

    command: str
    corpus: Optional[str] = None
    parses: Optional[str] = None
    lexicon_dir: Optional[str] = None
    blocklist: Optional[str] = None
    classifiers: Tuple[str, ...] = ('logistic_regression',)
    ngram_cap: int = NGRAM_CAP
    subtree_cap: int = SUBTREE_CAP
    min_count: int = MIN_CANDIDATE_COUNT
    include_siblings: bool = INCLUDE_SIBLING_SUBTREES
    folds: int = DEFAULT_FOLDS
    stratified: bool = True
    seed: int = DEFAULT_SEED
    feature_subsets: Tuple[str, ...] = ('all',)
    granularities: Tuple[str, ...] = ()
    selection_mode: str = 'per_fold'
    jobs: int = 1
    l2: Optional[float] = None
    tol: float = LR_PARAMS['tol']
    max_iter: int = LR_PARAMS['max_iter']
    epochs: int = SVM_PARAMS['epochs']
    size: int = 600
    cue_mode: str = 'shared'
    model: Optional[str] = None
    vocab: Optional[str] = None
    model_out: Optional[str] = None
    vocab_out: Optional[str] = None
    report_out: Optional[str] = None
    plots_dir: Optional[str] = None
    output: Optional[str] = None

    def to_dict(self) -> dict:
        """Settings that affect results (output locations and execution knobs omitted)"""
        settings = asdict(self)
        for name in OUTPUT_FIELDS + EXECUTION_FIELDS:
            settings.pop(name)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in settings.items()}

    def vocabulary_config(self) -> VocabularyConfig:
        return VocabularyConfig(
            ngram_cap=self.ngram_cap,
            subtree_cap=self.subtree_cap,
            min_count=self.min_count,
            include_siblings=self.include_siblings,
            blocklist=load_blocklist(self.blocklist),
        )

    def classifier_config(self, kind: str) -> ClassifierConfig:
        return ClassifierConfig(kind=kind, l2=self.l2, tol=self.tol, max_iter=self.max_iter,
                                epochs=self.epochs, seed=self.seed)

# ============================================================================
# ARGUMENT PARSING
# ============================================================================

CLASSIFIER_ALIASES = {label.lower(): kind for kind, label in CLASSIFIER_LABELS.items()}


def _classifier_list(value: str) -> Tuple[str, ...]:
    if value == 'all':
        return CLASSIFIER_KINDS
    kinds = []
    for item in value.split(','):
        item = item.strip().lower()
        kind = CLASSIFIER_ALIASES.get(item, item)
        if kind not in CLASSIFIER_KINDS:
            raise argparse.ArgumentTypeError(f"unknown classifier '{item}'")
        kinds.append(kind)
    return tuple(dict.fromkeys(kinds))


def _choice_list(choices: Sequence[str], all_means: Optional[Sequence[str]] = None):
    def parse(value: str) -> Tuple[str, ...]:
        if all_means is not None and value == 'all':
            return tuple(all_means)
        items = [item.strip() for item in value.split(',') if item.strip()]
        unknown = [item for item in items if item not in choices]
        if unknown or not items:
            raise argparse.ArgumentTypeError(f"expected a comma list of {', '.join(choices)}")
        return tuple(dict.fromkeys(items))
    return parse


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def _non_negative_int(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return number


def _synthetic_size(value: str) -> int:
    number = int(value)
    if number < MIN_SYNTHETIC_SIZE:
        raise argparse.ArgumentTypeError(f"expected at least {MIN_SYNTHETIC_SIZE} tweets, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED,
                        help=f'seed for folds, SVM sampling and synthesis (default {DEFAULT_SEED})')
    common.add_argument('--lexicon-dir', default=None,
                        help='directory with the five lexicon files (default: bundled lists)')

    corpus_args = argparse.ArgumentParser(add_help=False)
    corpus_args.add_argument('--corpus', required=True, help='corpus file (one JSON record per line)')
    corpus_args.add_argument('--parses', default=None, help='dependency parse sidecar')

    vocab_args = argparse.ArgumentParser(add_help=False)
    vocab_args.add_argument('--blocklist', default=None, help='topic term file (default: bundled list)')
    vocab_args.add_argument('--ngram-cap', type=_non_negative_int, default=NGRAM_CAP,
                            help=f'selected n-grams (default {NGRAM_CAP})')
    vocab_args.add_argument('--subtree-cap', type=_non_negative_int, default=SUBTREE_CAP,
                            help=f'selected sub-trees (default {SUBTREE_CAP})')
    vocab_args.add_argument('--min-count', type=_positive_int, default=MIN_CANDIDATE_COUNT,
                            help=f'minimum tweets per candidate (default {MIN_CANDIDATE_COUNT})')
    vocab_args.add_argument('--chains-only', action='store_true',
                            help='two-edge sub-trees are chains only (no sibling pairs)')

    model_args = argparse.ArgumentParser(add_help=False)
    model_args.add_argument('--l2', type=float, default=None,
                            help='L2 strength for LR/SVM (default 1/number of training tweets)')
    model_args.add_argument('--tol', type=float, default=LR_PARAMS['tol'],
                            help=f"LR gradient tolerance (default {LR_PARAMS['tol']})")
    model_args.add_argument('--max-iter', type=_positive_int, default=LR_PARAMS['max_iter'],
                            help=f"LR iterations (default {LR_PARAMS['max_iter']})")
    model_args.add_argument('--epochs', type=_positive_int, default=SVM_PARAMS['epochs'],
                            help=f"SVM epochs (default {SVM_PARAMS['epochs']})")

    parser = argparse.ArgumentParser(prog='speechacts', description='Speech act classification for tweets')
    commands = parser.add_subparsers(dest='command', required=True)

    train = commands.add_parser('train', parents=[common, corpus_args, vocab_args, model_args],
                                help='train one classifier')
    train.add_argument('--classifier', type=_classifier_list, default=('logistic_regression',),
                       help='baseline, naive_bayes, logistic_regression or linear_svm (default LR)')
    train.add_argument('--model-out', default=None, help='model file (default models/speechacts/)')
    train.add_argument('--vocab-out', default=None, help='vocabulary file (default next to the model)')

    predict = commands.add_parser('predict', parents=[common], help='label tweets with a trained model')
    predict.add_argument('--model', required=True, help='model file')
    predict.add_argument('--vocab', required=True, help='vocabulary file the model was trained with')
    predict.add_argument('--input', dest='corpus', required=True, help='tweets to label (labels optional)')
    predict.add_argument('--parses', default=None, help='dependency parse sidecar')
    predict.add_argument('--output', default='-', help="JSON lines output ('-' = stdout)")

    evaluate = commands.add_parser('evaluate', parents=[common, corpus_args, vocab_args, model_args],
                                   help='cross-validation tables')
    evaluate.add_argument('--classifier', type=_classifier_list, default=('logistic_regression',),
                          help="comma list of classifiers or 'all' (default logistic_regression)")
    evaluate.add_argument('--granularity', type=_choice_list(GRANULARITIES, GRANULARITIES), default=(),
                          help="comma list of twitter_wide, by_type, by_topic or 'all'")
    evaluate.add_argument('--features', type=_choice_list(FEATURE_SUBSETS), default=('all',),
                          help='comma list of semantic, syntactic, all (default all)')
    evaluate.add_argument('--folds', type=_positive_int, default=DEFAULT_FOLDS,
                          help=f'cross-validation folds (default {DEFAULT_FOLDS})')
    evaluate.add_argument('--no-stratify', action='store_true', help='plain shuffled folds')
    evaluate.add_argument('--whole-corpus-selection', action='store_true',
                          help='select n-grams/sub-trees once on the whole corpus')
    evaluate.add_argument('--jobs', type=int, default=1, help='concurrent folds (default 1)')
    evaluate.add_argument('--report-out', default=None, help='JSON report (default reports/)')
    evaluate.add_argument('--plots-dir', default=None, help='write F1 heatmap and class distribution')

    features = commands.add_parser('features', parents=[common, corpus_args, vocab_args],
                                   help='dump the vocabulary with selection scores')
    features.add_argument('--output', default='-', help="group<TAB>key<TAB>score lines ('-' = stdout)")

    synth = commands.add_parser('synth', parents=[common], help='write a synthetic corpus')
    synth.add_argument('--size', type=_synthetic_size, default=600,
                       help=f'tweets (>= {MIN_SYNTHETIC_SIZE}, default 600)')
    synth.add_argument('--cue-mode', choices=CUE_MODES, default='shared',
                       help='shared: cues mark the same class everywhere; topic_rotated: per-topic mapping')
    synth.add_argument('--out', dest='output', default=str(CORPUS_FILE), help='corpus file')
    synth.add_argument('--parses-out', dest='parses', default=str(PARSES_FILE), help='parse sidecar')
    synth.add_argument('--plots-dir', default=None, help='write the class distribution figure')

    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)
    return RunConfig(
        command=args.command,
        corpus=get('corpus'),
        parses=get('parses'),
        lexicon_dir=get('lexicon_dir'),
        blocklist=get('blocklist'),
        classifiers=tuple(get('classifier', ('logistic_regression',))),
        ngram_cap=get('ngram_cap', NGRAM_CAP),
        subtree_cap=get('subtree_cap', SUBTREE_CAP),
        min_count=get('min_count', MIN_CANDIDATE_COUNT),
        include_siblings=not get('chains_only', False),
        folds=get('folds', DEFAULT_FOLDS),
        stratified=not get('no_stratify', False),
        seed=args.seed,
        feature_subsets=tuple(get('features', ('all',))),
        granularities=tuple(get('granularity', ())),
        selection_mode='whole_corpus' if get('whole_corpus_selection', False) else 'per_fold',
        jobs=get('jobs', 1),
        l2=get('l2'),
        tol=get('tol', LR_PARAMS['tol']),
        max_iter=get('max_iter', LR_PARAMS['max_iter']),
        epochs=get('epochs', SVM_PARAMS['epochs']),
        size=get('size', 600),
        cue_mode=get('cue_mode', 'shared'),
        model=get('model'),
        vocab=get('vocab'),
        model_out=get('model_out'),
        vocab_out=get('vocab_out'),
        report_out=get('report_out'),
        plots_dir=get('plots_dir'),
        output=get('output'),
    )

# ============================================================================
# OUTPUT HELPERS
# ============================================================================

def _write_lines(lines: List[str], destination: Optional[str]):
    text = ''.join(line + '\n' for line in lines)
    if destination in (None, '-'):
        sys.stdout.write(text)
        return
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(text)


def group_size_table(vocab: FeatureVocabulary) -> pd.DataFrame:
    """Columns per feature group with semantic/syntactic/total rows"""
    sizes = vocab.group_sizes()
    rows = [(group, size) for group, size in sizes.items()]
    rows += [('semantic', vocab.semantic_size), ('syntactic', vocab.syntactic_size),
             ('total', vocab.dimension)]
    return pd.DataFrame(rows, columns=['group', 'columns']).set_index('group')


def _load_inputs(config: RunConfig, allow_empty: bool = False):
    corpus = load_corpus(config.corpus, config.parses, allow_empty=allow_empty)
    lexicons = load_lexicon_bundle(config.lexicon_dir)
    return corpus, lexicons


def _checked_corpus(corpus: Corpus, source: str, folds: Optional[int] = None,
                    show_summary: bool = True) -> ValidationResult:
    """Log corpus warnings, print its summary and stop on anything that blocks training"""
    validation = validate_corpus(corpus, require_labels=True, folds=folds)
    for message in validation.warnings:
        logger.warning(message)
    for message in validation.info:
        if show_summary:
            print(f" {message}")
        else:
            logger.debug(message)
    validation.raise_for_errors(f"{source}: corpus cannot be used for training")
    return validation

# ============================================================================
# COMMANDS
# ============================================================================

def cmd_train(config: RunConfig) -> int:
    print_header("SPEECH ACT CLASSIFIER TRAINING")

    corpus, lexicons = _load_inputs(config)
    _checked_corpus(corpus, config.corpus)

    kind = config.classifiers[0]
    if len(config.classifiers) > 1:
        logger.warning(f"train uses one classifier; using {kind}")

    print_subheader(" BUILDING VOCABULARY")
    vocab_config = config.vocabulary_config()
    analyses = analyze_corpus(corpus, lexicons, vocab_config.n_max, vocab_config.include_siblings)
    vocab = build_vocabulary(corpus, lexicons, vocab_config, analyses)
    print(group_size_table(vocab).to_string())

    print_subheader(f" TRAINING {CLASSIFIER_LABELS[kind]}")
    X = vectorize_analyses(analyses, vocab)
    model = train_model(config.classifier_config(kind), X, corpus.labels(), vocab.fingerprint)
    for name, value in model.training_info.items():
        if name != 'loss_trace':
            print(f" {name}: {value}")

    model_path = Path(config.model_out) if config.model_out else MODELS_DIR / get_model_filename(kind)
    vocab_path = Path(config.vocab_out) if config.vocab_out else model_path.with_name(get_vocabulary_filename(kind))
    save_model(model, model_path)
    save_vocabulary(vocab, vocab_path)
    print(f"\n Model saved: {model_path}")
    print(f" Vocabulary saved: {vocab_path}")
    return EXIT_OK


def cmd_predict(config: RunConfig) -> int:
    model = load_model(config.model)
    vocab = load_vocabulary(config.vocab)
    corpus, lexicons = _load_inputs(config, allow_empty=True)
    check_lexicons(vocab, lexicons)

    lines = []
    if len(corpus):
        analyses = analyze_corpus(corpus, lexicons, vocab.n_max, vocab.include_siblings)
        scores = predict_scores(model, vectorize_analyses(analyses, vocab), vocab)
        for tweet, row in zip(corpus, scores):
            record = {
                'id': tweet.id,
                'predicted': SpeechAct(int(row.argmax())).label,
                'scores': {act.label: float(row[act]) for act in SpeechAct},
            }
            lines.append(json.dumps(record, ensure_ascii=False))
    _write_lines(lines, config.output)
    logger.info(f"Labeled {len(lines)} tweets")
    return EXIT_OK


def _row_name(kind: str, subset: str, granularity: Optional[str], config: RunConfig) -> str:
    parts = []
    if len(config.classifiers) > 1 or (len(config.feature_subsets) == 1 and len(config.granularities) <= 1):
        parts.append(CLASSIFIER_LABELS[kind])
    if len(config.feature_subsets) > 1:
        parts.append(subset)
    if len(config.granularities) > 1 and granularity is not None:
        parts.append(granularity)
    return ' / '.join(parts)


def cmd_evaluate(config: RunConfig) -> int:
    print_header("SPEECH ACT CROSS-VALIDATION")

    corpus, lexicons = _load_inputs(config)
    whole_corpus_folds = not config.granularities or 'twitter_wide' in config.granularities
    validation = _checked_corpus(corpus, config.corpus, config.folds if whole_corpus_folds else None)
    vocab_config = config.vocabulary_config()
    print(f" Folds: {config.folds}   Selection: {config.selection_mode}")

    analyses = None
    reports: Dict[str, EvalReport] = {}
    for kind in config.classifiers:
        classifier = config.classifier_config(kind)
        for subset in config.feature_subsets:
            print_subheader(f" {CLASSIFIER_LABELS[kind]} / {subset} features")
            if config.granularities:
                by_granularity = granularity_experiment(
                    corpus, lexicons, classifier, vocab_config, config.granularities, subset,
                    config.selection_mode, config.folds, config.stratified, config.seed, config.jobs)
                for granularity, report in by_granularity.items():
                    reports[_row_name(kind, subset, granularity, config)] = report
            else:
                if analyses is None:
                    analyses = analyze_corpus(corpus, lexicons, vocab_config.n_max,
                                              vocab_config.include_siblings)
                report = cross_validate(corpus, lexicons, classifier, vocab_config, subset,
                                        config.selection_mode, config.folds, config.stratified,
                                        config.seed, config.jobs, analyses)
                reports[_row_name(kind, subset, None, config)] = report

    table = results_table(reports)
    print_header("F1 BY SPEECH ACT")
    print(table.to_string())

    settings = config.to_dict()
    payload = {
        'config': settings,
        'corpus_checks': validation.to_dict(),
        'fingerprints': {
            'corpus': corpus.fingerprint(),
            'lexicons': lexicons.fingerprint,
            'config': fingerprint_of(settings),
        },
        'rows': {name: report.row() for name, report in reports.items()},
        'reports': {name: report.to_dict() for name, report in reports.items()},
    }
    report_path = Path(config.report_out) if config.report_out else REPORTS_DIR / get_report_filename('evaluation')
    ensure_output_dirs(report_path.parent)
    with open(report_path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(json.dumps(payload, sort_keys=True, indent=2) + '\n')
    print(f"\n Report saved: {report_path}")

    if config.plots_dir:
        from .plots import plot_class_distribution, plot_f1_heatmap
        ensure_output_dirs(config.plots_dir)
        print(f" Figure saved: {plot_f1_heatmap(reports, config.plots_dir)}")
        print(f" Figure saved: {plot_class_distribution(corpus, config.plots_dir)}")
    return EXIT_OK


def cmd_features(config: RunConfig) -> int:
    corpus, lexicons = _load_inputs(config)
    _checked_corpus(corpus, config.corpus, show_summary=config.output not in (None, '-'))
    vocab = build_vocabulary(corpus, lexicons, config.vocabulary_config())
    lines = []
    for feature in vocab.features:
        score = vocab.scores.get(feature)
        lines.append(f"{feature.group}\t{feature.key}\t{'' if score is None else repr(score)}")
    _write_lines(lines, config.output)
    if config.output not in (None, '-'):
        print(group_size_table(vocab).to_string())
    return EXIT_OK


def cmd_synth(config: RunConfig) -> int:
    print_header("SYNTHETIC TWEET CORPUS")
    corpus = write_synthetic_corpus(config.output, config.parses, config.size, config.seed, config.cue_mode)
    print(f" Tweets: {len(corpus)}")
    print(corpus.to_frame().groupby(['topic_type', 'topic']).size().to_string())
    print(f"\n Corpus saved: {config.output}")
    print(f" Parses saved: {config.parses}")
    if config.plots_dir:
        from .plots import plot_class_distribution
        print(f" Figure saved: {plot_class_distribution(corpus, config.plots_dir)}")
    return EXIT_OK


COMMANDS = {
    'train': cmd_train,
    'predict': cmd_predict,
    'evaluate': cmd_evaluate,
    'features': cmd_features,
    'synth': cmd_synth,
}

# ============================================================================
# MAIN EXECUTION
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    logging.basicConfig(format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT)
    logging.getLogger('speechacts').setLevel(logging.DEBUG if args.verbose else logging.INFO)

    config = run_config_from_args(args)
    try:
        return COMMANDS[args.command](config)
    except NumericalError as exc:
        logger.error(f"Numerical error: {exc}")
        return EXIT_NUMERICAL_ERROR
    except (SpeechActError, FileNotFoundError, ValueError) as exc:
        logger.error(str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
