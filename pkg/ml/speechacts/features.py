"""
Features Module
===============
Grouped binary feature space for speech act classification.

Semantic groups: opinion, vulgar, emoticon (one column each), one column per
speech-act verb, selected n-grams.
Syntactic groups: '?' and '!' presence, '#'/'@'/RT presence and initial
position, abbreviation, selected dependency sub-trees, adjective and
interjection POS tags.

Columns are ordered by group (GROUPS order) and by key within a group.
"""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .config import (
    ADJECTIVE_TAG, INCLUDE_SIBLING_SUBTREES, INTERJECTION_TAG, MIN_CANDIDATE_COUNT,
    NGRAM_CAP, NGRAM_MAX_N, SUBTREE_CAP, VOCABULARY_FORMAT, VOCABULARY_VERSION,
)
from .corpus import Corpus, DependencyParse, Tweet
from .exceptions import FingerprintMismatchError, VocabularyError
from .porter import porter_stem
from .selection import Blocklist, CandidateTable, candidate_table, chi2_scores, select_features
from .text import LexiconBundle, Token, TokenKind, match_any, match_verbs

logger = logging.getLogger(__name__)

# ============================================================================
# FEATURE GROUPS
# ============================================================================

SEMANTIC_GROUPS = ('opinion', 'vulgar', 'emoticon', 'speech_act_verb', 'ngram')
SYNTACTIC_GROUPS = ('punct_q', 'punct_excl', 'twitter_char', 'twitter_char_initial',
                    'abbreviation', 'subtree', 'pos_adj', 'pos_intj')
GROUPS = SEMANTIC_GROUPS + SYNTACTIC_GROUPS

SINGLETON_KEY = 'present'
SINGLETON_GROUPS = ('opinion', 'vulgar', 'emoticon', 'abbreviation',
                    'punct_q', 'punct_excl', 'pos_adj', 'pos_intj')

# Lexicon-backed singleton groups
LEXICON_GROUPS = ('opinion', 'vulgar', 'emoticon', 'abbreviation')

TWITTER_CHAR_KINDS = {
    '#': TokenKind.HASHTAG,
    '@': TokenKind.MENTION,
    'RT': TokenKind.RT_MARKER,
}

NGRAM_EXCLUDED_KINDS = frozenset({TokenKind.URL, TokenKind.PUNCTUATION})


class FeatureId(NamedTuple):
    group: str
    key: str

# ============================================================================
# PER-TWEET EXTRACTION
# ============================================================================

def extract_ngrams(tokens: Sequence[Token], n_max: int = NGRAM_MAX_N) -> FrozenSet[str]:
    """Space-joined 1..n_max grams of normalized forms (URLs and punctuation skipped)"""
    forms = [t.normalized for t in tokens if t.kind not in NGRAM_EXCLUDED_KINDS]
    grams = set()
    for n in range(1, n_max + 1):
        for start in range(len(forms) - n + 1):
            grams.add(' '.join(forms[start:start + n]))
    return frozenset(grams)


def extract_subtrees(parse: Optional[DependencyParse],
                     include_siblings: bool = INCLUDE_SIBLING_SUBTREES) -> FrozenSet[str]:
    """
    Canonical keys of every one- and two-edge sub-tree

    Edge:    head>child
    Chain:   head>child>grandchild
    Sibling: head>{child1,child2} (children sorted)

    Forms are case-folded; edges to the virtual root are not sub-trees.
    """
    if parse is None:
        return frozenset()

    forms = {t.index: t.form.casefold() for t in parse.tokens}
    children = parse.children()
    keys = set()

    for head, dependents in children.items():
        h = forms[head]
        for child in dependents:
            c = forms[child]
            keys.add(f"{h}>{c}")
            for grandchild in children.get(child, ()):
                keys.add(f"{h}>{c}>{forms[grandchild]}")
        if include_siblings:
            for left, right in combinations(dependents, 2):
                first, second = sorted((forms[left], forms[right]))
                keys.add(f"{h}>{{{first},{second}}}")

    return frozenset(keys)


@dataclass(frozen=True)
class TweetAnalysis:
    """Everything vectorization needs from one tweet, computed once"""

    text: str
    tokens: Tuple[Token, ...]
    ngrams: FrozenSet[str]
    subtrees: FrozenSet[str]
    verb_stems: FrozenSet[str]
    lexicon_hits: FrozenSet[str]
    pos_tags: FrozenSet[str]
    has_parse: bool


def analyze_tweet(tweet: Tweet, lexicons: LexiconBundle, n_max: int = NGRAM_MAX_N,
                  include_siblings: bool = INCLUDE_SIBLING_SUBTREES) -> TweetAnalysis:
    tokens = tuple(lexicons.tokenizer.tokenize(tweet.text))
    hits = frozenset(
        group for group in LEXICON_GROUPS
        if match_any(list(tokens), getattr(lexicons, group))
    )
    parse = tweet.parse
    return TweetAnalysis(
        text=tweet.text,
        tokens=tokens,
        ngrams=extract_ngrams(tokens, n_max),
        subtrees=extract_subtrees(parse, include_siblings),
        verb_stems=frozenset(match_verbs(parse, lexicons.speech_act_verb)),
        lexicon_hits=hits,
        pos_tags=frozenset(t.pos for t in parse.tokens) if parse is not None else frozenset(),
        has_parse=parse is not None,
    )


def analyze_corpus(corpus: Corpus, lexicons: LexiconBundle, n_max: int = NGRAM_MAX_N,
                   include_siblings: bool = INCLUDE_SIBLING_SUBTREES) -> List[TweetAnalysis]:
    """Analyses aligned with corpus order"""
    return [analyze_tweet(tweet, lexicons, n_max, include_siblings) for tweet in corpus]

# ============================================================================
# CANDIDATES
# ============================================================================

def build_ngram_candidates(corpus: Corpus, lexicons: LexiconBundle, n_max: int = NGRAM_MAX_N,
                           min_count: int = MIN_CANDIDATE_COUNT,
                           analyses: Optional[Sequence[TweetAnalysis]] = None) -> CandidateTable:
    """
    N-grams present in at least ``min_count`` tweets, with per-class counts

    Args:
        corpus: labeled corpus
        lexicons: lexicon bundle (provides the tokenizer)
        n_max: longest n-gram
        min_count: tweet-count threshold
        analyses: precomputed analyses aligned with ``corpus``

    Returns:
        CandidateTable of kind 'ngram'
    """
    labels = corpus.labels()
    if analyses is None:
        tokenizer = lexicons.tokenizer
        sets = [extract_ngrams(tokenizer.tokenize(t.text), n_max) for t in corpus]
    else:
        sets = [a.ngrams for a in analyses]
    return candidate_table(sets, labels, 'ngram', min_count)


def build_subtree_candidates(corpus: Corpus, min_count: int = MIN_CANDIDATE_COUNT,
                             include_siblings: bool = INCLUDE_SIBLING_SUBTREES,
                             analyses: Optional[Sequence[TweetAnalysis]] = None) -> CandidateTable:
    """Sub-trees present in at least ``min_count`` tweets (unparsed tweets add nothing)"""
    labels = corpus.labels()
    if analyses is None:
        sets = [extract_subtrees(t.parse, include_siblings) for t in corpus]
    else:
        sets = [a.subtrees for a in analyses]
    return candidate_table(sets, labels, 'subtree', min_count)

# ============================================================================
# VOCABULARY
# ============================================================================

@dataclass(frozen=True)
class VocabularyConfig:
    ngram_cap: int = NGRAM_CAP
    subtree_cap: int = SUBTREE_CAP
    min_count: int = MIN_CANDIDATE_COUNT
    n_max: int = NGRAM_MAX_N
    include_siblings: bool = INCLUDE_SIBLING_SUBTREES
    blocklist: Blocklist = frozenset()


@dataclass(frozen=True)
class FeatureVocabulary:
    """Fixed, ordered binary feature space"""

    features: Tuple[FeatureId, ...]
    ngram_cap: int
    subtree_cap: int
    min_count: int
    n_max: int
    include_siblings: bool
    corpus_fingerprint: str
    lexicon_fingerprint: str
    subset: str = 'all'
    # Selection scores of n-gram/sub-tree columns; not part of identity
    scores: Dict[FeatureId, float] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.features:
            raise VocabularyError("vocabulary has no features")
        if len(set(self.features)) != len(self.features):
            raise VocabularyError("duplicate (group, key) in vocabulary")

    def __len__(self) -> int:
        return len(self.features)

    @property
    def dimension(self) -> int:
        return len(self.features)

    @cached_property
    def index(self) -> Dict[FeatureId, int]:
        return {feature: column for column, feature in enumerate(self.features)}

    @cached_property
    def group_index(self) -> Dict[str, Dict[str, int]]:
        """group -> key -> column"""
        groups: Dict[str, Dict[str, int]] = {}
        for column, (group, key) in enumerate(self.features):
            groups.setdefault(group, {})[key] = column
        return groups

    @cached_property
    def verb_columns(self) -> Dict[str, List[int]]:
        """Porter stem -> speech-act-verb columns it activates"""
        columns: Dict[str, List[int]] = {}
        for verb, column in self.group_index.get('speech_act_verb', {}).items():
            stem = porter_stem(verb) if verb.isalpha() else verb
            columns.setdefault(stem, []).append(column)
        return columns

    def header(self) -> Dict[str, str]:
        return {
            'ngram_cap': str(self.ngram_cap),
            'subtree_cap': str(self.subtree_cap),
            'min_count': str(self.min_count),
            'n_max': str(self.n_max),
            'include_siblings': 'true' if self.include_siblings else 'false',
            'subset': self.subset,
            'corpus_fingerprint': self.corpus_fingerprint,
            'lexicon_fingerprint': self.lexicon_fingerprint,
        }

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for name, value in self.header().items():
            digest.update(f"{name}={value}\n".encode('utf-8'))
        for group, key in self.features:
            digest.update(f"{group}\t{key}\n".encode('utf-8'))
        return digest.hexdigest()

    def group_sizes(self) -> Dict[str, int]:
        """Column count per group in GROUPS order (absent groups are 0)"""
        sizes = {group: 0 for group in GROUPS}
        for group, _ in self.features:
            sizes[group] += 1
        return sizes

    @property
    def semantic_size(self) -> int:
        return sum(1 for group, _ in self.features if group in SEMANTIC_GROUPS)

    @property
    def syntactic_size(self) -> int:
        return sum(1 for group, _ in self.features if group in SYNTACTIC_GROUPS)

    def restrict(self, subset: str) -> 'FeatureVocabulary':
        """Keep only the semantic or syntactic columns ('all' returns self)"""
        if subset == 'all':
            return self
        if subset not in ('semantic', 'syntactic'):
            raise ValueError(f"unknown feature subset '{subset}'")
        groups = SEMANTIC_GROUPS if subset == 'semantic' else SYNTACTIC_GROUPS
        features = tuple(f for f in self.features if f.group in groups)
        scores = {f: s for f, s in self.scores.items() if f.group in groups}
        return replace(self, features=features, subset=subset, scores=scores)


def fixed_features(lexicons: LexiconBundle) -> Dict[str, List[str]]:
    """Keys of every group whose columns do not depend on the corpus"""
    keys = {group: [SINGLETON_KEY] for group in SINGLETON_GROUPS}
    keys['speech_act_verb'] = sorted(lexicons.verb_keys)
    keys['twitter_char'] = sorted(TWITTER_CHAR_KINDS)
    keys['twitter_char_initial'] = sorted(TWITTER_CHAR_KINDS)
    return keys


def assemble_vocabulary(group_keys: Dict[str, Sequence[str]], **header) -> FeatureVocabulary:
    features = tuple(
        FeatureId(group, key)
        for group in GROUPS
        for key in sorted(group_keys.get(group, ()))
    )
    return FeatureVocabulary(features=features, **header)


def build_vocabulary(corpus: Corpus, lexicons: LexiconBundle,
                     config: VocabularyConfig = VocabularyConfig(),
                     analyses: Optional[Sequence[TweetAnalysis]] = None) -> FeatureVocabulary:
    """
    Build the feature vocabulary from a labeled corpus

    Args:
        corpus: training corpus
        lexicons: lexicon bundle
        config: caps, thresholds and topic blocklist
        analyses: precomputed analyses aligned with ``corpus``

    Returns:
        FeatureVocabulary
    """
    if analyses is None:
        analyses = analyze_corpus(corpus, lexicons, config.n_max, config.include_siblings)

    ngram_table = build_ngram_candidates(corpus, lexicons, config.n_max, config.min_count, analyses)
    subtree_table = build_subtree_candidates(corpus, config.min_count, config.include_siblings, analyses)

    ngrams = select_features(ngram_table, config.ngram_cap, config.blocklist)
    subtrees = select_features(subtree_table, config.subtree_cap, config.blocklist)

    group_keys = fixed_features(lexicons)
    group_keys['ngram'] = ngrams
    group_keys['subtree'] = subtrees

    vocabulary = assemble_vocabulary(
        group_keys,
        ngram_cap=config.ngram_cap,
        subtree_cap=config.subtree_cap,
        min_count=config.min_count,
        n_max=config.n_max,
        include_siblings=config.include_siblings,
        corpus_fingerprint=corpus.fingerprint(),
        lexicon_fingerprint=lexicons.fingerprint,
        scores=_selected_scores(ngram_table, ngrams, 'ngram')
        | _selected_scores(subtree_table, subtrees, 'subtree'),
    )

    logger.info(f"Vocabulary: {len(ngram_table)} n-gram candidates -> {len(ngrams)}, "
                f"{len(subtree_table)} sub-tree candidates -> {len(subtrees)}, "
                f"{vocabulary.dimension} columns")
    return vocabulary


def _selected_scores(table: CandidateTable, keys: Sequence[str], group: str) -> Dict[FeatureId, float]:
    if not keys:
        return {}
    scores = chi2_scores(table)['score']
    return {FeatureId(group, key): float(scores[key]) for key in keys}

# ============================================================================
# VECTORIZATION
# ============================================================================

@dataclass(frozen=True)
class SparseBinaryVector:
    indices: Tuple[int, ...]
    dimension: int
    # Fingerprint of the vocabulary whose columns the indices refer to
    vocab_fingerprint: str = ''

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and not 0 <= self.indices[0] <= self.indices[-1] < self.dimension:
            raise ValueError("index out of range")

    def __len__(self) -> int:
        return len(self.indices)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension, dtype=np.float64)
        dense[list(self.indices)] = 1.0
        return dense


def active_columns(analysis: TweetAnalysis, vocab: FeatureVocabulary) -> List[int]:
    """Sorted columns whose predicate holds for the analysed tweet"""
    groups = vocab.group_index
    active = set()

    def singleton(group: str, condition: bool):
        if condition and group in groups:
            active.add(groups[group][SINGLETON_KEY])

    for group in LEXICON_GROUPS:
        singleton(group, group in analysis.lexicon_hits)

    singleton('punct_q', '?' in analysis.text)
    singleton('punct_excl', '!' in analysis.text)
    singleton('pos_adj', ADJECTIVE_TAG in analysis.pos_tags)
    singleton('pos_intj', INTERJECTION_TAG in analysis.pos_tags)

    for stem in analysis.verb_stems:
        active.update(vocab.verb_columns.get(stem, ()))

    kinds = {token.kind for token in analysis.tokens}
    first_kind = analysis.tokens[0].kind if analysis.tokens else None
    for key, kind in TWITTER_CHAR_KINDS.items():
        if kind in kinds and key in groups.get('twitter_char', {}):
            active.add(groups['twitter_char'][key])
        if kind == first_kind and key in groups.get('twitter_char_initial', {}):
            active.add(groups['twitter_char_initial'][key])

    for group, keys in (('ngram', analysis.ngrams), ('subtree', analysis.subtrees)):
        columns = groups.get(group, {})
        active.update(columns[key] for key in keys if key in columns)

    return sorted(active)


def check_lexicons(vocab: FeatureVocabulary, lexicons: LexiconBundle):
    if vocab.lexicon_fingerprint != lexicons.fingerprint:
        raise FingerprintMismatchError(
            "vocabulary was built with different lexicons "
            f"({vocab.lexicon_fingerprint[:12]} != {lexicons.fingerprint[:12]})"
        )


def vectorize(tweet: Tweet, vocab: FeatureVocabulary, lexicons: LexiconBundle) -> SparseBinaryVector:
    """
    Binary feature vector of one tweet

    Args:
        tweet: tweet (parse optional)
        vocab: feature vocabulary
        lexicons: the lexicons the vocabulary was built with

    Returns:
        SparseBinaryVector
    """
    check_lexicons(vocab, lexicons)
    analysis = analyze_tweet(tweet, lexicons, vocab.n_max, vocab.include_siblings)
    return SparseBinaryVector(tuple(active_columns(analysis, vocab)), vocab.dimension, vocab.fingerprint)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """CSR rows of vectorized tweets, tagged with the vocabulary that produced them"""

    rows: sparse.csr_matrix
    vocab_fingerprint: str

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows.shape

    def __getitem__(self, key):
        return self.rows[key]

    def toarray(self) -> np.ndarray:
        return self.rows.toarray()


def vectorize_analyses(analyses: Sequence[TweetAnalysis], vocab: FeatureVocabulary) -> FeatureMatrix:
    """Rows of precomputed analyses as a float64 CSR matrix tagged with the vocabulary"""
    indptr = [0]
    indices: List[int] = []
    for analysis in analyses:
        indices.extend(active_columns(analysis, vocab))
        indptr.append(len(indices))
    data = np.ones(len(indices), dtype=np.float64)
    rows = sparse.csr_matrix(
        (data, np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(analyses), vocab.dimension),
    )
    return FeatureMatrix(rows, vocab.fingerprint)


def vectorize_corpus(corpus: Corpus, vocab: FeatureVocabulary, lexicons: LexiconBundle) -> FeatureMatrix:
    check_lexicons(vocab, lexicons)
    return vectorize_analyses(analyze_corpus(corpus, lexicons, vocab.n_max, vocab.include_siblings), vocab)

# ============================================================================
# SERIALIZATION
# ============================================================================

HEADER_LINE = f"# {VOCABULARY_FORMAT} v{VOCABULARY_VERSION}"


def save_vocabulary(vocab: FeatureVocabulary, path) -> Path:
    """
    Write the vocabulary text file

    Layout: format line, ``name=value`` header lines (caps, thresholds,
    fingerprints), then one ``group<TAB>key`` line per column in order.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [HEADER_LINE]
    lines += [f"{name}={value}" for name, value in vocab.header().items()]
    lines.append(f"fingerprint={vocab.fingerprint}")
    lines += [f"{group}\t{key}" for group, key in vocab.features]
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write('\n'.join(lines) + '\n')
    return path


def load_vocabulary(path) -> FeatureVocabulary:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Vocabulary file not found: {path}")

    lines = path.read_text(encoding='utf-8').split('\n')
    if not lines or lines[0] != HEADER_LINE:
        raise VocabularyError(f"{path}: not a {VOCABULARY_FORMAT} v{VOCABULARY_VERSION} file")

    header: Dict[str, str] = {}
    features: List[FeatureId] = []
    for line_no, line in enumerate(lines[1:], 2):
        if not line:
            continue
        if '\t' in line:
            group, key = line.split('\t', 1)
            if group not in GROUPS:
                raise VocabularyError(f"{path}: line {line_no}: unknown group '{group}'")
            features.append(FeatureId(group, key))
        elif '=' in line:
            name, value = line.split('=', 1)
            header[name] = value
        else:
            raise VocabularyError(f"{path}: line {line_no}: unreadable line")

    try:
        vocab = FeatureVocabulary(
            features=tuple(features),
            ngram_cap=int(header['ngram_cap']),
            subtree_cap=int(header['subtree_cap']),
            min_count=int(header['min_count']),
            n_max=int(header['n_max']),
            include_siblings=header['include_siblings'] == 'true',
            corpus_fingerprint=header['corpus_fingerprint'],
            lexicon_fingerprint=header['lexicon_fingerprint'],
            subset=header.get('subset', 'all'),
        )
        recorded = header['fingerprint']
    except KeyError as exc:
        raise VocabularyError(f"{path}: missing header field {exc}") from exc
    except ValueError as exc:
        raise VocabularyError(f"{path}: {exc}") from exc

    if recorded != vocab.fingerprint:
        raise VocabularyError(f"{path}: fingerprint does not match contents (file edited?)")
    return vocab
