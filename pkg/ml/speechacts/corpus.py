"""
Corpus Module
=============
Speech act taxonomy, tweet data model, and readers/writers for the
line-delimited corpus file and the dependency-parse sidecar.

Corpus file: one JSON object per line with id, text, topic, topic_type and
an optional label. Parse sidecar: blank-line separated blocks headed by
``# id = <tweet id>`` followed by ``index<TAB>form<TAB>pos<TAB>head`` rows.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from .config import GRANULARITIES
from .exceptions import CorpusFormatError
from .validators import parse_problems, record_problems

logger = logging.getLogger(__name__)

# ============================================================================
# TAXONOMY
# ============================================================================

class SpeechAct(IntEnum):
    """Six tweet-level speech acts; the value is the stable class code"""

    ASSERTION = 0
    RECOMMENDATION = 1
    EXPRESSION = 2
    QUESTION = 3
    REQUEST = 4
    MISCELLANEOUS = 5

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def short(self) -> str:
        return _SHORT_CODES[self]

    @classmethod
    def parse(cls, value: str) -> 'SpeechAct':
        """Case-insensitive long name or three-letter code"""
        key = value.strip().lower()
        if key in _ALIASES:
            return _ALIASES[key]
        raise CorpusFormatError(f"unknown speech act label '{value}'")


_SHORT_CODES = {
    SpeechAct.ASSERTION: 'asr',
    SpeechAct.RECOMMENDATION: 'rec',
    SpeechAct.EXPRESSION: 'exp',
    SpeechAct.QUESTION: 'que',
    SpeechAct.REQUEST: 'req',
    SpeechAct.MISCELLANEOUS: 'mis',
}

_ALIASES = {act.name.lower(): act for act in SpeechAct}
_ALIASES.update({code: act for act, code in _SHORT_CODES.items()})

NUM_CLASSES = len(SpeechAct)


class TopicType(Enum):
    """Nature of a discussed topic"""

    ENTITY = 'entity'
    EVENT = 'event'
    LONGSTANDING = 'longstanding'

    @classmethod
    def parse(cls, value: str) -> 'TopicType':
        key = value.strip().lower().replace('-', '').replace('_', '').replace(' ', '')
        for member in cls:
            if member.value == key:
                return member
        raise CorpusFormatError(f"unknown topic type '{value}'")

# ============================================================================
# DATA MODEL
# ============================================================================

@dataclass(frozen=True)
class ParseToken:
    index: int
    form: str
    pos: str
    head: int


@dataclass(frozen=True)
class DependencyParse:
    """Dependency forest over the tagger's tokens (head 0 is the virtual root)"""

    tokens: Tuple[ParseToken, ...]

    def __post_init__(self):
        rows = [(t.index, t.form, t.pos, t.head) for t in self.tokens]
        problems = parse_problems(rows)
        if problems:
            raise CorpusFormatError("invalid dependency parse", problems)

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[int, str, str, int]]) -> 'DependencyParse':
        return cls(tuple(ParseToken(*row) for row in rows))

    def __len__(self) -> int:
        return len(self.tokens)

    def children(self) -> Dict[int, List[int]]:
        """Map head index -> dependent indices in token order (root edges excluded)"""
        children: Dict[int, List[int]] = {}
        for token in self.tokens:
            if token.head != 0:
                children.setdefault(token.head, []).append(token.index)
        return children

    def token(self, index: int) -> ParseToken:
        return self.tokens[index - 1]


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    topic: str
    topic_type: TopicType
    label: Optional[SpeechAct] = None
    parse: Optional[DependencyParse] = None

    def to_record(self) -> dict:
        return {
            'id': self.id,
            'text': self.text,
            'topic': self.topic,
            'topic_type': self.topic_type.value,
            'label': self.label.label if self.label is not None else None,
        }


@dataclass(frozen=True)
class Corpus:
    """Ordered, id-unique collection of tweets (file order)"""

    tweets: Tuple[Tweet, ...]
    provenance: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        seen = set()
        for tweet in self.tweets:
            if tweet.id in seen:
                raise CorpusFormatError(f"duplicate tweet id '{tweet.id}'")
            seen.add(tweet.id)

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self) -> Iterator[Tweet]:
        return iter(self.tweets)

    def __getitem__(self, position: int) -> Tweet:
        return self.tweets[position]

    @property
    def ids(self) -> List[str]:
        return [tweet.id for tweet in self.tweets]

    @property
    def unparsed_count(self) -> int:
        return sum(1 for tweet in self.tweets if tweet.parse is None)

    def labels(self) -> np.ndarray:
        """Class codes in corpus order"""
        missing = [tweet.id for tweet in self.tweets if tweet.label is None]
        if missing:
            raise CorpusFormatError(f"unlabeled tweet '{missing[0]}' "
                                    f"({len(missing)} unlabeled in total)")
        return np.array([int(tweet.label) for tweet in self.tweets], dtype=np.int64)

    def subset(self, ids: Iterable[str]) -> 'Corpus':
        """Tweets whose id is in ``ids``, keeping corpus order"""
        wanted = set(ids)
        return Corpus(tuple(t for t in self.tweets if t.id in wanted), self.provenance)

    def take(self, positions: Iterable[int]) -> 'Corpus':
        """Tweets at the given positions, in the order given"""
        return Corpus(tuple(self.tweets[i] for i in positions), self.provenance)

    def fingerprint(self) -> str:
        """SHA-256 over every record and parse, in file order"""
        digest = hashlib.sha256()
        for tweet in self.tweets:
            digest.update(json.dumps(tweet.to_record(), sort_keys=True,
                                     ensure_ascii=False).encode('utf-8'))
            digest.update(b'\n')
            if tweet.parse is not None:
                for t in tweet.parse.tokens:
                    digest.update(f"{t.index}\t{t.form}\t{t.pos}\t{t.head}\n".encode('utf-8'))
            digest.update(b'\x00')
        return digest.hexdigest()

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'id': self.ids,
            'topic': [t.topic for t in self.tweets],
            'topic_type': [t.topic_type.value for t in self.tweets],
            'label': [t.label.label if t.label is not None else None for t in self.tweets],
            'parsed': [t.parse is not None for t in self.tweets],
        })

# ============================================================================
# READERS
# ============================================================================

def _tweet_from_record(record: dict) -> Tweet:
    label = record.get('label')
    return Tweet(
        id=record['id'],
        text=record['text'],
        topic=record['topic'],
        topic_type=TopicType.parse(record['topic_type']),
        label=SpeechAct.parse(label) if label is not None else None,
    )


def _read_utf8(path: Path) -> str:
    try:
        return path.read_bytes().decode('utf-8')
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"{path}: invalid UTF-8 ({exc})") from exc


def _record_lines(text: str) -> List[str]:
    """Split on '\\n' only; U+2028, U+2029 and U+0085 are legal inside JSON strings"""
    lines = text.split('\n')
    if lines[-1] == '':
        lines.pop()
    return [line[:-1] if line.endswith('\r') else line for line in lines]


def load_parses(path) -> Dict[str, DependencyParse]:
    """
    Read a parse sidecar file

    Args:
        path: sidecar path

    Returns:
        dict of tweet id -> DependencyParse, in file order
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Parse file not found: {path}")

    parses: Dict[str, DependencyParse] = {}
    errors: List[str] = []

    def close_block(tweet_id, start_line, rows):
        if tweet_id is None:
            return
        if tweet_id in parses:
            errors.append(f"line {start_line}: duplicate parse for id '{tweet_id}'")
            return
        problems = parse_problems(rows)
        if problems:
            errors.extend(f"line {start_line} (id '{tweet_id}'): {p}" for p in problems)
            return
        parses[tweet_id] = DependencyParse.from_rows(rows)

    tweet_id, start_line, rows = None, 0, []
    for line_no, line in enumerate(_record_lines(_read_utf8(path)), 1):
        if not line.strip():
            close_block(tweet_id, start_line, rows)
            tweet_id, rows = None, []
            continue
        if line.startswith('#'):
            body = line[1:].strip()
            if body.startswith('id') and '=' in body:
                close_block(tweet_id, start_line, rows)
                tweet_id, start_line, rows = body.split('=', 1)[1].strip(), line_no, []
            continue
        if tweet_id is None:
            errors.append(f"line {line_no}: token row outside an '# id = ...' block")
            continue
        columns = line.split('\t')
        if len(columns) != 4:
            errors.append(f"line {line_no}: expected 4 tab-separated columns, got {len(columns)}")
            continue
        try:
            rows.append((int(columns[0]), columns[1], columns[2], int(columns[3])))
        except ValueError:
            errors.append(f"line {line_no}: index and head must be integers")
    close_block(tweet_id, start_line, rows)

    if errors:
        raise CorpusFormatError(f"{path}: malformed parse file", errors)

    logger.info(f"Loaded {len(parses)} parses from {path}")
    return parses


def load_corpus(path, parses_path=None, allow_empty: bool = False) -> Corpus:
    """
    Load a corpus file and optionally attach its parse sidecar

    Args:
        path: corpus file (one JSON record per line)
        parses_path: optional parse sidecar
        allow_empty: accept a file with no records (prediction input)

    Returns:
        Corpus in file order
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")

    tweets: List[Tweet] = []
    errors: List[str] = []
    first_line: Dict[str, int] = {}

    for line_no, line in enumerate(_record_lines(_read_utf8(path)), 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(f"line {line_no}: not a JSON record ({exc.msg})")
            continue

        problems = record_problems(record)
        if problems:
            errors.extend(f"line {line_no}: {p}" for p in problems)
            continue

        try:
            tweet = _tweet_from_record(record)
        except CorpusFormatError as exc:
            errors.append(f"line {line_no}: {exc}")
            continue

        if tweet.id in first_line:
            errors.append(f"line {line_no}: duplicate id '{tweet.id}' "
                          f"(first seen on line {first_line[tweet.id]})")
            continue
        first_line[tweet.id] = line_no
        tweets.append(tweet)

    if errors:
        raise CorpusFormatError(f"{path}: malformed corpus", errors)
    if not tweets and not allow_empty:
        raise CorpusFormatError(f"{path}: empty corpus")

    provenance = (str(path),)
    if parses_path is not None:
        parses = load_parses(parses_path)
        unknown = [tweet_id for tweet_id in parses if tweet_id not in first_line]
        if unknown:
            raise CorpusFormatError(f"{parses_path}: parse blocks reference unknown ids",
                                    [f"unknown id '{tweet_id}'" for tweet_id in unknown])
        tweets = [Tweet(t.id, t.text, t.topic, t.topic_type, t.label, parses.get(t.id))
                  for t in tweets]
        provenance += (str(parses_path),)

    corpus = Corpus(tuple(tweets), provenance)
    logger.info(f"Loaded {len(corpus)} tweets from {path}")
    if parses_path is not None and corpus.unparsed_count:
        logger.warning(f"{corpus.unparsed_count} tweets have no parse")
    return corpus

# ============================================================================
# WRITERS
# ============================================================================

def save_corpus(corpus: Corpus, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(tweet.to_record(), ensure_ascii=False) for tweet in corpus]
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(''.join(line + '\n' for line in lines))
    return path


def save_parses(corpus: Corpus, path) -> Path:
    """Write the parse sidecar for every parsed tweet"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blocks = []
    for tweet in corpus:
        if tweet.parse is None:
            continue
        rows = [f"# id = {tweet.id}"]
        rows.extend(f"{t.index}\t{t.form}\t{t.pos}\t{t.head}" for t in tweet.parse.tokens)
        blocks.append('\n'.join(rows) + '\n')
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write('\n'.join(blocks))
    return path

# ============================================================================
# PARTITIONS AND DISTRIBUTIONS
# ============================================================================

def partition_by(corpus: Corpus, granularity: str) -> List[Tuple[str, Corpus]]:
    """
    Split a corpus into disjoint partitions

    Args:
        corpus: nonempty corpus
        granularity: 'twitter_wide', 'by_type' or 'by_topic'

    Returns:
        list of (key, Corpus), keys in first-appearance order
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity '{granularity}' (expected one of {GRANULARITIES})")
    if len(corpus) == 0:
        raise ValueError("cannot partition an empty corpus")

    if granularity == 'twitter_wide':
        return [('all', corpus)]

    key_of = (lambda t: t.topic_type.value) if granularity == 'by_type' else (lambda t: t.topic)
    groups: Dict[str, List[Tweet]] = {}
    for tweet in corpus:
        groups.setdefault(key_of(tweet), []).append(tweet)
    return [(key, Corpus(tuple(tweets), corpus.provenance)) for key, tweets in groups.items()]


def class_distribution(corpus: Corpus) -> Dict[SpeechAct, float]:
    """Fraction of tweets per speech act (absent classes map to 0)"""
    labels = corpus.labels()
    if len(labels) == 0:
        return {act: 0.0 for act in SpeechAct}
    counts = np.bincount(labels, minlength=NUM_CLASSES)
    return {act: counts[act] / len(labels) for act in SpeechAct}


def class_distribution_table(corpus: Corpus, by: str = 'topic') -> pd.DataFrame:
    """
    Speech act distribution per topic or topic type

    Args:
        corpus: labeled corpus
        by: 'topic' or 'topic_type'

    Returns:
        DataFrame indexed by group, one column per speech act, rows sum to 1
    """
    if by not in ('topic', 'topic_type'):
        raise ValueError(f"by must be 'topic' or 'topic_type', got '{by}'")
    corpus.labels()
    frame = corpus.to_frame()
    table = pd.crosstab(frame[by], frame['label'], normalize='index')
    return table.reindex(columns=[act.label for act in SpeechAct], fill_value=0.0)
