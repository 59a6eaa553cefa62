"""Shared fixtures: bundled lexicons, hand-built tweets and synthetic corpora"""

import json
from pathlib import Path

import pytest

from speechacts.corpus import Corpus, DependencyParse, SpeechAct, TopicType, Tweet
from speechacts.synthetic import generate_corpus
from speechacts.text import default_lexicons

DATA_DIR = Path(__file__).resolve().parent / 'data'


def build_tweet(tweet_id, text, label='assertion', topic='redsox', topic_type='entity', rows=None):
    """Tweet from plain values; rows are (form, pos, head) with 1-based heads"""
    parse = None
    if rows is not None:
        parse = DependencyParse.from_rows(
            (i, form, pos, head) for i, (form, pos, head) in enumerate(rows, 1)
        )
    return Tweet(
        id=tweet_id,
        text=text,
        topic=topic,
        topic_type=TopicType.parse(topic_type),
        label=SpeechAct.parse(label) if label is not None else None,
        parse=parse,
    )


@pytest.fixture
def make_tweet():
    return build_tweet


@pytest.fixture(scope='session')
def lexicons():
    return default_lexicons()


@pytest.fixture(scope='session')
def synthetic_corpus():
    return generate_corpus(size=600, seed=42)


@pytest.fixture(scope='session')
def rotated_corpus():
    return generate_corpus(size=600, seed=42, cue_mode='topic_rotated')


@pytest.fixture
def small_corpus():
    """Six parsed tweets, one per speech act, over two topics"""
    tweets = [
        build_tweet('t1', 'Police report that the road is closed #redsox', 'assertion',
                    rows=[('Police', 'N', 2), ('report', 'V', 0), ('that', 'P', 2),
                          ('the', 'D', 5), ('road', 'N', 6), ('is', 'V', 3),
                          ('closed', 'A', 6), ('#redsox', '#', 2)]),
        build_tweet('t2', 'You should check out the lineup !', 'recommendation',
                    rows=[('You', 'O', 2), ('should', 'V', 0), ('check', 'V', 2),
                          ('out', 'T', 3), ('the', 'D', 6), ('lineup', 'N', 3), ('!', ',', 2)]),
        build_tweet('t3', 'I think the crowd is so awesome :)', 'expression', 'cooking', 'longstanding',
                    rows=[('I', 'O', 2), ('think', 'V', 0), ('the', 'D', 4), ('crowd', 'N', 5),
                          ('is', 'V', 2), ('so', 'R', 7), ('awesome', 'A', 5), (':)', 'E', 2)]),
        build_tweet('t4', 'Does anyone know when the game starts ?', 'question', 'cooking', 'longstanding',
                    rows=[('Does', 'V', 3), ('anyone', 'N', 3), ('know', 'V', 0), ('when', 'R', 7),
                          ('the', 'D', 6), ('game', 'N', 7), ('starts', 'V', 3), ('?', ',', 3)]),
        build_tweet('t5', 'RT @cityfan please share the photos', 'request',
                    rows=[('RT', '~', 4), ('@cityfan', '@', 4), ('please', '!', 4), ('share', 'V', 0),
                          ('the', 'D', 6), ('photos', 'N', 4)]),
        build_tweet('t6', 'lol just saw the traffic downtown', 'miscellaneous', 'cooking', 'longstanding',
                    rows=[('lol', '!', 3), ('just', 'R', 3), ('saw', 'V', 0), ('the', 'D', 5),
                          ('traffic', 'N', 3), ('downtown', 'R', 3)]),
    ]
    return Corpus(tuple(tweets))


@pytest.fixture
def write_lines(tmp_path):
    """Write records (dicts become JSON) to a file under tmp_path"""
    def write(name, lines):
        path = tmp_path / name
        text = ''.join((json.dumps(line) if isinstance(line, dict) else line) + '\n' for line in lines)
        path.write_text(text, encoding='utf-8')
        return path
    return write
