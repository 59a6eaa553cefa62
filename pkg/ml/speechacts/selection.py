"""
Feature Selection
=================
Per-class candidate counts, smoothed one-sided chi-squared predictiveness
scores, and topic-blocklist filtering for n-gram and sub-tree candidates.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import CHI2_SMOOTHING, DEFAULT_BLOCKLIST, MIN_CANDIDATE_COUNT
from .corpus import NUM_CLASSES, SpeechAct

logger = logging.getLogger(__name__)

CLASS_COLUMNS = [act.label for act in SpeechAct]

# ============================================================================
# CANDIDATE COUNTS
# ============================================================================

@dataclass(frozen=True)
class CandidateTable:
    """
    Per-class tweet counts of candidate features

    counts: DataFrame indexed by candidate key (sorted), one column per
            speech act, each cell the number of tweets of that class
            containing the candidate
    class_totals: number of training tweets per class
    """

    kind: str
    counts: pd.DataFrame
    class_totals: np.ndarray

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def keys(self) -> List[str]:
        return list(self.counts.index)

    @property
    def total(self) -> int:
        return int(self.class_totals.sum())


def candidate_table(feature_sets: Sequence[Iterable[str]], labels: Sequence[int],
                    kind: str, min_count: int = MIN_CANDIDATE_COUNT) -> CandidateTable:
    """
    Count, per class, the tweets containing each candidate key

    Args:
        feature_sets: one collection of keys per tweet (duplicates ignored)
        labels: class code per tweet
        kind: 'ngram' or 'subtree'
        min_count: keep keys present in at least this many tweets

    Returns:
        CandidateTable
    """
    counts = defaultdict(lambda: np.zeros(NUM_CLASSES, dtype=np.int64))
    for keys, label in zip(feature_sets, labels):
        for key in set(keys):
            counts[key][label] += 1

    kept = sorted(key for key, row in counts.items() if row.sum() >= min_count)
    frame = pd.DataFrame(
        np.array([counts[key] for key in kept], dtype=np.int64).reshape(len(kept), NUM_CLASSES),
        index=pd.Index(kept, dtype=object),
        columns=CLASS_COLUMNS,
    )

    class_totals = np.bincount(np.asarray(labels, dtype=np.int64), minlength=NUM_CLASSES)
    logger.debug(f"{kind}: {len(counts)} distinct keys, {len(frame)} with >= {min_count} tweets")
    return CandidateTable(kind, frame, class_totals)

# ============================================================================
# PREDICTIVENESS
# ============================================================================

def _one_sided_chi2(a, b, c, d):
    """Smoothed 2x2 statistic; zero unless presence is positively associated"""
    a, b, c, d = (x + CHI2_SMOOTHING for x in (a, b, c, d))
    n = a + b + c + d
    cross = a * d - b * c
    stat = n * cross ** 2 / ((a + b) * (c + d) * (a + c) * (b + d))
    return np.where(cross > 0, stat, 0.0)


def chi2_score(class_counts: Sequence[int], class_totals: Sequence[int], act: SpeechAct) -> float:
    """
    One-sided chi-squared of feature presence against one class

    Args:
        class_counts: per-class tweets containing the feature
        class_totals: per-class tweet totals
        act: class on the 'class' side of the 2x2 table

    Returns:
        non-negative score
    """
    counts = np.asarray(class_counts, dtype=np.float64)
    totals = np.asarray(class_totals, dtype=np.float64)
    present = counts.sum()
    a = counts[act]
    b = present - a
    c = totals[act] - a
    d = totals.sum() - totals[act] - b
    return float(_one_sided_chi2(a, b, c, d))


def chi2_scores(table: CandidateTable) -> pd.DataFrame:
    """Per-class scores for every candidate, plus their max in column 'score'"""
    counts = table.counts.to_numpy(dtype=np.float64)
    totals = table.class_totals.astype(np.float64)
    present = counts.sum(axis=1, keepdims=True)

    a = counts
    b = present - counts
    c = totals[None, :] - counts
    d = totals.sum() - totals[None, :] - b

    scores = _one_sided_chi2(a, b, c, d)

    frame = pd.DataFrame(scores, index=table.counts.index, columns=CLASS_COLUMNS)
    frame['score'] = scores.max(axis=1)
    return frame

# ============================================================================
# TOPIC BLOCKLIST
# ============================================================================

Blocklist = FrozenSet[Tuple[str, ...]]

_UNIT_SPLIT = re.compile(r'[\s>{},]+')


def word_units(key: str) -> Tuple[str, ...]:
    """Word units of an n-gram or sub-tree key, '#'/'@' prefixes dropped"""
    units = (unit.lstrip('#@') for unit in _UNIT_SPLIT.split(key.casefold()))
    return tuple(unit for unit in units if unit)


def load_blocklist(path=None) -> Blocklist:
    """
    Read topic terms, one per line ('#' comments skipped)

    Args:
        path: blocklist file (defaults to the bundled list)

    Returns:
        frozenset of term word-unit tuples
    """
    path = Path(path) if path is not None else DEFAULT_BLOCKLIST
    if not path.exists():
        raise FileNotFoundError(f"Blocklist file not found: {path}")
    terms = set()
    for line in path.read_text(encoding='utf-8').splitlines():
        line = line.strip()
        if line and not line.startswith('#'):
            units = word_units(line)
            if units:
                terms.add(units)
    logger.info(f"Loaded {len(terms)} topic terms from {path}")
    return frozenset(terms)


def is_blocked(key: str, blocklist: Blocklist) -> bool:
    """True if a blocklisted term occurs as a contiguous run of word units"""
    units = word_units(key)
    for term in blocklist:
        n = len(term)
        if any(units[i:i + n] == term for i in range(len(units) - n + 1)):
            return True
    return False

# ============================================================================
# SELECTION
# ============================================================================

def select_features(table: CandidateTable, k: int, blocklist: Blocklist = frozenset()) -> List[str]:
    """
    Top-k candidates by aggregate chi-squared after topic filtering

    Args:
        table: candidate counts
        k: cap (0 selects nothing)
        blocklist: topic terms to exclude

    Returns:
        keys ranked by score descending, ties by key
    """
    if k < 0:
        raise ValueError(f"cap must be >= 0, got {k}")
    if k == 0 or len(table) == 0:
        return []

    scores = chi2_scores(table)['score'].to_dict()
    allowed = [key for key in scores if not is_blocked(key, blocklist)]
    ranked = sorted(allowed, key=lambda key: (-scores[key], key))

    logger.debug(f"{table.kind}: {len(table) - len(allowed)} blocked, "
                 f"{min(k, len(ranked))} of {len(ranked)} selected")
    return ranked[:k]
