"""
Speech Act Classifier Configuration
===================================
Centralized configuration for the speech act classification toolkit
"""

from pathlib import Path

# PATH CONFIGURATION

# Base directory (ml/speechacts/)
BASE_DIR = Path(__file__).resolve().parent

# Project root (ml/)
ML_DIR = BASE_DIR.parent

# Bundled word lists
LEXICON_DIR = BASE_DIR / 'lexicons'
DEFAULT_BLOCKLIST = LEXICON_DIR / 'topic_blocklist.txt'

# Data directories
DATA_DIR = ML_DIR / 'data'
CORPUS_FILE = DATA_DIR / 'tweets.jsonl'
PARSES_FILE = DATA_DIR / 'tweets.parses'

# Output directories
MODELS_DIR = ML_DIR / 'models' / 'speechacts'
REPORTS_DIR = ML_DIR / 'reports'
VISUALIZATIONS_DIR = ML_DIR / 'visualizations' / 'speechacts'


def ensure_output_dirs(*directories):
    """Create output directories on demand (never at import time)"""
    for directory in directories or (MODELS_DIR, REPORTS_DIR, VISUALIZATIONS_DIR):
        Path(directory).mkdir(parents=True, exist_ok=True)


# LEXICONS

LEXICON_FILES = {
    'opinion': 'opinion_words.txt',
    'vulgar': 'vulgar_words.txt',
    'emoticon': 'emoticons.txt',
    'speech_act_verb': 'speech_act_verbs.txt',
    'abbreviation': 'abbreviations.txt',
}

# Sizes of the bundled lists
LEXICON_SIZES = {
    'opinion': 300,
    'vulgar': 43,
    'emoticon': 362,
    'speech_act_verb': 229,
    'abbreviation': 199,
}

# Twitter POS tags read from the parse sidecar
VERB_TAG = 'V'
ADJECTIVE_TAG = 'A'
INTERJECTION_TAG = '!'

# FEATURES

NGRAM_CAP = 1415       # selected n-grams
SUBTREE_CAP = 1655     # selected dependency sub-trees
MIN_CANDIDATE_COUNT = 5
NGRAM_MAX_N = 3
CHI2_SMOOTHING = 0.5
INCLUDE_SIBLING_SUBTREES = True

FEATURE_SUBSETS = ('all', 'semantic', 'syntactic')
SELECTION_MODES = ('per_fold', 'whole_corpus')

VOCABULARY_FORMAT = 'speechact-vocabulary'
VOCABULARY_VERSION = 1

# MODEL CONFIGURATION

CLASSIFIER_KINDS = ('baseline', 'naive_bayes', 'logistic_regression', 'linear_svm')

CLASSIFIER_LABELS = {
    'baseline': 'BL',
    'naive_bayes': 'NB',
    'logistic_regression': 'LR',
    'linear_svm': 'SVM',
}

# l2=None means 1 / number of training tweets
LR_PARAMS = {
    'l2': None,
    'tol': 1e-6,
    'max_iter': 500,
}

SVM_PARAMS = {
    'l2': None,
    'epochs': 20,
}

NB_PARAMS = {
    'alpha': 1.0,
}

# Backtracking line search
LINE_SEARCH_SHRINK = 0.5
LINE_SEARCH_ARMIJO = 1e-4
LINE_SEARCH_MIN_STEP = 1e-16

MODEL_MAGIC = b'SPEECHACT-MODEL\n'
MODEL_FORMAT_VERSION = 1

# EVALUATION

DEFAULT_FOLDS = 20
DEFAULT_SEED = 42
STRATIFIED_FOLDS = True
GRANULARITIES = ('twitter_wide', 'by_type', 'by_topic')

# Report column order, mirroring the published tables
REPORT_COLUMNS = ('As', 'Ex', 'Qu', 'Rc', 'Rq', 'Mis', 'Avg')

# SYNTHETIC CORPUS

MIN_SYNTHETIC_SIZE = 120
CUE_MODES = ('shared', 'topic_rotated')

# LOGGING CONFIGURATION

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# EXIT CODES

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA_ERROR = 3
EXIT_NUMERICAL_ERROR = 4

# DISPLAY SETTINGS

CONSOLE_WIDTH = 100
SCORE_DECIMALS = 2

# Plot settings
PLOT_DPI = 150
FIGURE_SIZE_DISTRIBUTION = (14, 6)
FIGURE_SIZE_HEATMAP = (10, 5)


# FILE NAMING CONVENTIONS

def get_model_filename(kind: str) -> str:
    """Generate model filename"""
    return f"speechact_{kind}.model"


def get_vocabulary_filename(kind: str) -> str:
    """Generate vocabulary filename"""
    return f"speechact_{kind}.vocab"


def get_report_filename(name: str) -> str:
    """Generate report filename"""
    return f"{name}_report.json"


def get_visualization_filename(name: str) -> str:
    """Generate visualization filename"""
    return f"{name}.png"
