"""
Synthetic Tweet Corpus Generator
================================
Deterministic labeled tweets with dependency parses for tests and demos.

Every tweet is built from a cue phrase (one of six cue sets), neutral filler,
an optional topic word and the topic hashtag. In 'shared' mode cue set i
always marks class i. In 'topic_rotated' mode topic t maps cue set
(class + t) % 6 to each class, so cues only predict the label within a topic.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .config import CORPUS_FILE, CUE_MODES, DEFAULT_SEED, MIN_SYNTHETIC_SIZE, PARSES_FILE
from .corpus import (
    NUM_CLASSES, Corpus, DependencyParse, SpeechAct, TopicType, Tweet, save_corpus, save_parses,
)

logger = logging.getLogger(__name__)

# ===== 1. CONSTANTS =====

# (name, type, hashtag, topic words); two topics per type
TOPICS = [
    ('ashton', TopicType.ENTITY, '#ashton', ['ashton', 'kutcher']),
    ('redsox', TopicType.ENTITY, '#redsox', ['redsox']),
    ('bostonmarathon', TopicType.EVENT, '#bostonmarathon', ['boston', 'marathon']),
    ('ferguson', TopicType.EVENT, '#ferguson', ['ferguson']),
    ('cooking', TopicType.LONGSTANDING, '#cooking', ['cooking']),
    ('travel', TopicType.LONGSTANDING, '#travel', ['travel']),
]

# Cue sets in class-code order. Each template is "form/POS ..." plus the
# position of its head word, which becomes the parse root.
CUE_SETS = [
    # Assertion: reporting verbs
    [('officials/N report/V that/P', 1),
     ('police/N report/V that/P', 1),
     ('witnesses/N report/V seeing/V', 1),
     ('local/A news/N report/V', 2)],
    # Recommendation: should / recommend
    [('you/O should/V check/V out/T', 1),
     ('you/O should/V definitely/R see/V', 1),
     ('everyone/N should/V read/V', 1),
     ('i/O recommend/V you/O should/V follow/V', 3)],
    # Expression: i think + opinion word
    [('i/O think/V', 1),
     ('i/O really/R think/V', 2),
     ('honestly/R i/O think/V', 2),
     ('wow/! i/O think/V', 2)],
    # Question: anyone + wh-word + "?"
    [('does/V anyone/N know/V', 2),
     ('has/V anyone/N heard/V', 2),
     ('is/V anyone/N going/V', 2),
     ('can/V anyone/N explain/V', 2)],
    # Request: please + verb
    [('please/! share/V', 1),
     ('please/! help/V', 1),
     ('could/V you/O please/! send/V', 3),
     ('please/! retweet/V', 1)],
    # Miscellaneous: neutral chatter
    [('just/R saw/V', 1),
     ('lol/! just/R got/V', 2),
     ('just/R landed/V', 1),
     ('just/R finished/V', 1)],
]

FILLER_PHRASES = [
    'the/D game/N tonight/R',
    'this/D weekend/N',
    'the/D new/A schedule/N',
    'at/P the/D stadium/N',
    'in/P the/D city/N',
    'the/D latest/A update/N',
    'the/D crowd/N',
    'the/D traffic/N downtown/R',
    'the/D photos/N',
    'the/D weather/N today/R',
    'the/D lineup/N',
    'the/D coverage/N',
    'the/D story/N',
    'that/D video/N',
    'the/D schedule/N again/R',
]

WH_WORDS = ['when/R', 'why/R', 'where/R', 'how/R']
OPINION_WORDS = ['adorable', 'awesome', 'amazing', 'terrible', 'beautiful', 'awful', 'brilliant', 'sad']
EMOTICONS = [':)', ':(', ':D', ';)', '<3']
MENTIONS = ['@newsdesk', '@cityfan', '@daily_update']

# Cue sets that end with a question mark / sometimes an exclamation mark
QUESTION_SET = 3
EXCLAMATION_SETS = (1, 4)
EXPRESSION_SET = 2

# ===== 2. HELPER FUNCTIONS =====

Row = Tuple[str, str, int]   # form, pos, head (0-based position, -1 = root)


def split_tagged(tagged: str) -> List[Tuple[str, str]]:
    """'form/POS form/POS' -> [(form, pos), ...]"""
    return [tuple(item.rsplit('/', 1)) for item in tagged.split()]


def pick(rng: np.random.Generator, items):
    return items[int(rng.integers(len(items)))]


def cue_set_for(act: SpeechAct, topic_index: int, cue_mode: str) -> int:
    if cue_mode == 'shared':
        return int(act)
    return (int(act) + topic_index) % NUM_CLASSES


def compose_tweet(rng: np.random.Generator, cue_set: int, topic_index: int) -> List[Row]:
    """
    Token rows of one tweet

    Cue words attach to the cue head (the root); filler and tail phrases hang
    off the head as chains; prefix, punctuation, emoticon and hashtag attach
    directly to the head.
    """
    rows: List[Row] = []

    def attach(tokens: List[Tuple[str, str]], head: int, chain: bool = False):
        for form, pos in tokens:
            rows.append((form, pos, head))
            if chain:
                head = len(rows) - 1

    # Prefix (class-independent)
    draw = rng.random()
    prefix = []
    if draw < 0.1:
        prefix = [('rt', '~'), (pick(rng, MENTIONS), '@')]
    elif draw < 0.25:
        prefix = [(pick(rng, MENTIONS), '@')]

    template, head_offset = pick(rng, CUE_SETS[cue_set])
    cue = split_tagged(template)
    head = len(prefix) + head_offset

    for form, pos in prefix:
        rows.append((form, pos, head))
    for offset, (form, pos) in enumerate(cue):
        rows.append((form, pos, -1 if offset == head_offset else head))

    if cue_set == QUESTION_SET and rng.random() < 0.5:
        attach(split_tagged(pick(rng, WH_WORDS)), head)

    for _ in range(1 + int(rng.integers(2))):
        attach(split_tagged(pick(rng, FILLER_PHRASES)), head, chain=True)

    if cue_set == EXPRESSION_SET:
        # "so <adjective>", adverb headed by the adjective
        rows.append(('so', 'R', len(rows) + 1))
        rows.append((pick(rng, OPINION_WORDS), 'A', head))

    _, _, hashtag, words = TOPICS[topic_index]
    if rng.random() < 0.5:
        attach([('about', 'P'), (pick(rng, words), '^')], head, chain=True)

    if cue_set == QUESTION_SET:
        rows.append(('?', ',', head))
    elif cue_set in EXCLAMATION_SETS and rng.random() < 0.5:
        rows.append(('!', ',', head))

    if cue_set == EXPRESSION_SET and rng.random() < 0.5:
        rows.append((pick(rng, EMOTICONS), 'E', head))

    rows.append((hashtag, '#', head))
    return rows


def rows_to_text(rows: List[Row]) -> str:
    return ' '.join(form for form, _, _ in rows)


def rows_to_parse(rows: List[Row]) -> DependencyParse:
    return DependencyParse.from_rows(
        (position + 1, form, pos, head + 1)
        for position, (form, pos, head) in enumerate(rows)
    )

# ===== 3. CORPUS GENERATION =====

def generate_corpus(size: int = 600, seed: int = DEFAULT_SEED, cue_mode: str = 'shared') -> Corpus:
    """
    Generate a labeled synthetic corpus with parses

    Args:
        size: number of tweets (>= 120)
        seed: random seed
        cue_mode: 'shared' or 'topic_rotated'

    Returns:
        Corpus; draft i (before shuffling) has class i % 6 and topic
        (i % 6 + i // 6) % 6, so a multiple of 6 gives equal class and
        topic counts
    """
    if size < MIN_SYNTHETIC_SIZE:
        raise ValueError(f"synthetic corpus size must be >= {MIN_SYNTHETIC_SIZE}, got {size}")
    if cue_mode not in CUE_MODES:
        raise ValueError(f"unknown cue mode '{cue_mode}' (expected one of {CUE_MODES})")

    rng = np.random.default_rng(seed)
    drafts = []
    for i in range(size):
        act = SpeechAct(i % NUM_CLASSES)
        topic_index = (i % NUM_CLASSES + i // NUM_CLASSES) % len(TOPICS)
        rows = compose_tweet(rng, cue_set_for(act, topic_index, cue_mode), topic_index)
        drafts.append((act, topic_index, rows))

    tweets = []
    for number, position in enumerate(rng.permutation(size), 1):
        act, topic_index, rows = drafts[position]
        name, topic_type, _, _ = TOPICS[topic_index]
        tweets.append(Tweet(
            id=f"syn-{number:05d}",
            text=rows_to_text(rows),
            topic=name,
            topic_type=topic_type,
            label=act,
            parse=rows_to_parse(rows),
        ))

    logger.info(f"Generated {size} synthetic tweets (seed={seed}, cue_mode={cue_mode})")
    return Corpus(tuple(tweets), (f"synthetic:size={size},seed={seed},cue_mode={cue_mode}",))


def write_synthetic_corpus(corpus_path=CORPUS_FILE, parses_path: Optional[Path] = PARSES_FILE,
                           size: int = 600, seed: int = DEFAULT_SEED,
                           cue_mode: str = 'shared') -> Corpus:
    """Generate and write the corpus file and its parse sidecar"""
    corpus = generate_corpus(size, seed, cue_mode)
    save_corpus(corpus, corpus_path)
    if parses_path is not None:
        save_parses(corpus, parses_path)
    return corpus


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    sample = generate_corpus(size=120, seed=DEFAULT_SEED)
    for tweet in sample.tweets[:6]:
        print(f"{tweet.label.label:>14}  {tweet.text}")
