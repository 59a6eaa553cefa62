"""
Data Validation Module
Validation rules for labeled tweet corpora and dependency parses

"""

from collections import Counter
from typing import List, Optional, Sequence, Tuple

from .exceptions import CorpusFormatError

# ============================================================================
# VALIDATION UTILITIES
# ============================================================================

class ValidationResult:
    """Store validation results"""

    def __init__(self):
        self.errors = []
        self.warnings = []
        self.info = []

    def add_error(self, message: str):
        """Add error message"""
        self.errors.append(message)

    def add_warning(self, message: str):
        """Add warning message"""
        self.warnings.append(message)

    def add_info(self, message: str):
        """Add info message"""
        self.info.append(message)

    def is_valid(self) -> bool:
        """Check if validation passed (no errors)"""
        return len(self.errors) == 0

    def to_dict(self) -> dict:
        """Convert to dictionary"""
        return {
            'valid': self.is_valid(),
            'errors': self.errors,
            'warnings': self.warnings,
            'info': self.info
        }

    def raise_for_errors(self, context: str):
        """Raise CorpusFormatError carrying every error message"""
        if self.errors:
            raise CorpusFormatError(context, self.errors)

# ============================================================================
# RECORD VALIDATION
# ============================================================================

REQUIRED_FIELDS = ('id', 'text', 'topic', 'topic_type')


def record_problems(record) -> List[str]:
    """
    Structural checks for one corpus record (before label/type parsing)

    Args:
        record: decoded line

    Returns:
        list of problem descriptions, empty when the record is usable
    """
    if not isinstance(record, dict):
        return ["record is not an object"]

    problems = []
    missing = [name for name in REQUIRED_FIELDS if name not in record]
    if missing:
        problems.append(f"missing required fields: {', '.join(missing)}")

    for name in REQUIRED_FIELDS:
        if name in record and not isinstance(record[name], str):
            problems.append(f"field '{name}' must be a string")

    if isinstance(record.get('id'), str) and not record['id']:
        problems.append("empty id")
    if isinstance(record.get('text'), str) and not record['text']:
        problems.append("empty text")

    label = record.get('label')
    if label is not None and not isinstance(label, str):
        problems.append("field 'label' must be a string or null")

    return problems

# ============================================================================
# DEPENDENCY PARSE VALIDATION
# ============================================================================

def parse_problems(rows: Sequence[Tuple[int, str, str, int]]) -> List[str]:
    """
    Check that (index, form, pos, head) rows form a well-formed forest

    Indices must be 1..n in order, heads in [0, n], no self-loops, and
    following heads from any token must reach the virtual root 0.
    """
    problems = []
    n = len(rows)
    if n == 0:
        return ["parse has no tokens"]

    for position, (index, form, pos, head) in enumerate(rows, 1):
        if index != position:
            problems.append(f"token index {index} out of order (expected {position})")
        if not form:
            problems.append(f"token {index} has an empty form")
        if not pos:
            problems.append(f"token {index} has an empty POS tag")
        if head == index:
            problems.append(f"token {index} is its own head")
        elif not 0 <= head <= n:
            problems.append(f"token {index} has out-of-range head {head}")

    if problems:
        return problems

    heads = {index: head for index, _, _, head in rows}
    for start in heads:
        node = start
        for _ in range(n):
            node = heads[node]
            if node == 0:
                break
        else:
            problems.append(f"cycle through token {start}")
            break

    return problems

# ============================================================================
# CORPUS SUMMARY
# ============================================================================

MAX_LISTED_IDS = 5


def validate_corpus(corpus, require_labels: bool = True, folds: Optional[int] = None) -> ValidationResult:
    """
    Check that a loaded corpus can be trained or cross-validated on

    Args:
        corpus: Corpus object
        require_labels: every tweet must carry a speech act
        folds: cross-validation fold count, when the corpus will be split

    Returns:
        ValidationResult object
    """
    from .corpus import SpeechAct

    result = ValidationResult()

    if len(corpus) == 0:
        result.add_error("Corpus is empty")
        return result

    unlabeled = [tweet.id for tweet in corpus if tweet.label is None]
    if unlabeled and require_labels:
        listed = ', '.join(unlabeled[:MAX_LISTED_IDS])
        more = f" and {len(unlabeled) - MAX_LISTED_IDS} more" if len(unlabeled) > MAX_LISTED_IDS else ''
        result.add_error(f"{len(unlabeled)} tweets have no label: {listed}{more}")
    elif unlabeled:
        result.add_warning(f"{len(unlabeled)} tweets have no label")

    labeled = len(corpus) - len(unlabeled)
    if folds is not None and labeled < folds:
        result.add_error(f"{folds} folds need at least {folds} labeled tweets, corpus has {labeled}")

    labels = Counter(tweet.label for tweet in corpus if tweet.label is not None)
    absent = [act.label for act in sorted(SpeechAct) if act not in labels]
    if labels and absent:
        result.add_warning(f"No tweets labeled {', '.join(absent)}")

    unparsed = corpus.unparsed_count
    if unparsed:
        result.add_warning(f"{unparsed} tweets have no dependency parse "
                           f"(sub-tree, verb and POS features stay zero)")

    result.add_info(f"Total tweets: {len(corpus)}")
    result.add_info(f"Topics: {len({tweet.topic for tweet in corpus})}")
    result.add_info(f"Labels: {dict((act.label, labels[act]) for act in sorted(labels))}")

    return result
