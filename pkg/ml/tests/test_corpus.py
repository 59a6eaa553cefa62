import json

import numpy as np
import pytest

from speechacts.corpus import (
    Corpus, DependencyParse, SpeechAct, TopicType, class_distribution, class_distribution_table,
    load_corpus, load_parses, partition_by, save_corpus, save_parses,
)
from speechacts.exceptions import CorpusFormatError

from conftest import build_tweet


def record(tweet_id, label='assertion', topic='redsox', topic_type='entity', text='hello there'):
    return {'id': tweet_id, 'text': text, 'topic': topic, 'topic_type': topic_type, 'label': label}


# ============================================================================
# TAXONOMY
# ============================================================================

def test_speech_act_codes_are_stable():
    assert [act.label for act in SpeechAct] == [
        'assertion', 'recommendation', 'expression', 'question', 'request', 'miscellaneous']
    assert [int(act) for act in SpeechAct] == [0, 1, 2, 3, 4, 5]


@pytest.mark.parametrize('value, expected', [
    ('Assertion', SpeechAct.ASSERTION),
    ('asr', SpeechAct.ASSERTION),
    ('REQ', SpeechAct.REQUEST),
    (' question ', SpeechAct.QUESTION),
    ('mis', SpeechAct.MISCELLANEOUS),
])
def test_speech_act_parse(value, expected):
    assert SpeechAct.parse(value) is expected


def test_speech_act_parse_rejects_unknown():
    with pytest.raises(CorpusFormatError):
        SpeechAct.parse('promise')


def test_topic_type_parse_is_lenient():
    assert TopicType.parse('Long-standing') is TopicType.LONGSTANDING
    assert TopicType.parse('EVENT') is TopicType.EVENT
    with pytest.raises(CorpusFormatError):
        TopicType.parse('person')


# ============================================================================
# DEPENDENCY PARSES
# ============================================================================

def test_parse_rejects_cycle():
    with pytest.raises(CorpusFormatError, match='invalid dependency parse'):
        DependencyParse.from_rows([(1, 'a', 'N', 2), (2, 'b', 'V', 1)])


def test_parse_rejects_out_of_range_head():
    with pytest.raises(CorpusFormatError):
        DependencyParse.from_rows([(1, 'a', 'N', 0), (2, 'b', 'V', 5)])


def test_parse_children_skip_root_edges():
    parse = DependencyParse.from_rows([(1, 'i', 'O', 2), (2, 'think', 'V', 0), (3, 'so', 'R', 2)])
    assert parse.children() == {2: [1, 3]}
    assert parse.token(2).form == 'think'


# ============================================================================
# LOADING
# ============================================================================

def test_load_corpus_keeps_file_order(write_lines):
    path = write_lines('tweets.jsonl', [record('b'), '', record('a', label=None), record('c', 'que')])
    corpus = load_corpus(path)

    assert corpus.ids == ['b', 'a', 'c']
    assert corpus[1].label is None
    assert corpus[2].label is SpeechAct.QUESTION


def test_load_corpus_collects_every_error_with_line_numbers(write_lines):
    path = write_lines('tweets.jsonl', [
        record('a'),
        '{not json',
        {'id': 'b', 'text': 'x', 'topic': 'redsox'},
        record('c', label='promise'),
        record('a'),
    ])

    with pytest.raises(CorpusFormatError) as excinfo:
        load_corpus(path)

    errors = excinfo.value.errors
    assert len(errors) == 4
    assert errors[0].startswith('line 2:')
    assert 'topic_type' in errors[1] and errors[1].startswith('line 3:')
    assert errors[2].startswith('line 4:')
    assert 'duplicate id' in errors[3] and 'line 1' in errors[3]


def test_empty_corpus_is_an_error_unless_allowed(write_lines):
    path = write_lines('empty.jsonl', ['', '   '])
    with pytest.raises(CorpusFormatError, match='empty corpus'):
        load_corpus(path)
    assert len(load_corpus(path, allow_empty=True)) == 0


def test_missing_corpus_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path / 'absent.jsonl')


def test_corpus_and_parses_round_trip(small_corpus, tmp_path):
    corpus_path = save_corpus(small_corpus, tmp_path / 'tweets.jsonl')
    parses_path = save_parses(small_corpus, tmp_path / 'tweets.parses')

    loaded = load_corpus(corpus_path, parses_path)

    assert loaded.tweets == small_corpus.tweets
    assert loaded.fingerprint() == small_corpus.fingerprint()


def test_round_trip_keeps_unicode_line_separators(tmp_path):
    text = 'first\u2028second\u2029third\x85fourth\x1cend'
    corpus = Corpus((
        build_tweet('u1', text, 'expression', rows=[('first\u2028second', 'N', 0), ('third\x85end', 'N', 1)]),
        build_tweet('u2', 'plain tweet', 'assertion'),
    ))
    corpus_path = save_corpus(corpus, tmp_path / 'tweets.jsonl')
    parses_path = save_parses(corpus, tmp_path / 'tweets.parses')

    loaded = load_corpus(corpus_path, parses_path)

    assert loaded.tweets == corpus.tweets
    assert loaded[0].text == text


def test_crlf_line_endings_are_accepted(tmp_path):
    path = tmp_path / 'tweets.jsonl'
    path.write_bytes(b''.join(json.dumps(record(i)).encode('utf-8') + b'\r\n' for i in ('a', 'b')))
    assert load_corpus(path).ids == ['a', 'b']


def test_parses_for_unknown_ids_are_rejected(write_lines):
    corpus_path = write_lines('tweets.jsonl', [record('a')])
    parses_path = write_lines('tweets.parses', ['# id = zzz', '1\thello\t!\t0'])
    with pytest.raises(CorpusFormatError, match='unknown ids'):
        load_corpus(corpus_path, parses_path)


def test_tweets_without_parse_are_kept(write_lines):
    corpus_path = write_lines('tweets.jsonl', [record('a'), record('b')])
    parses_path = write_lines('tweets.parses', ['# id = b', '1\thello\t!\t0', '2\tthere\tR\t1'])

    corpus = load_corpus(corpus_path, parses_path)

    assert corpus.unparsed_count == 1
    assert corpus[0].parse is None
    assert len(corpus[1].parse) == 2


def test_malformed_parse_rows_are_reported(write_lines):
    path = write_lines('bad.parses', [
        '# id = a', '1\thello\t!\t0', '2\tthere\tR',
        '',
        '# id = b', '1\tx\tN\t2', '2\ty\tV\t1',
    ])
    with pytest.raises(CorpusFormatError) as excinfo:
        load_parses(path)
    assert any('4 tab-separated columns' in e for e in excinfo.value.errors)
    assert any("id 'b'" in e and 'cycle' in e for e in excinfo.value.errors)


# ============================================================================
# CORPUS OPERATIONS
# ============================================================================

def test_duplicate_ids_rejected_in_memory(small_corpus):
    with pytest.raises(CorpusFormatError, match='duplicate'):
        Corpus(small_corpus.tweets + small_corpus.tweets[:1])


def test_labels_require_every_tweet_labeled(small_corpus, make_tweet):
    assert small_corpus.labels().tolist() == [0, 1, 2, 3, 4, 5]
    unlabeled = Corpus(small_corpus.tweets + (make_tweet('t7', 'hi', label=None),))
    with pytest.raises(CorpusFormatError, match='unlabeled'):
        unlabeled.labels()


def test_fingerprint_tracks_labels(small_corpus, make_tweet):
    relabeled = Corpus((make_tweet('t1', small_corpus[0].text, 'request'),) + small_corpus.tweets[1:])
    assert relabeled.fingerprint() != small_corpus.fingerprint()
    assert Corpus(small_corpus.tweets).fingerprint() == small_corpus.fingerprint()


def test_subset_keeps_corpus_order(small_corpus):
    assert small_corpus.subset(['t5', 't2']).ids == ['t2', 't5']


def test_partitions_are_disjoint_and_covering(small_corpus):
    assert [key for key, _ in partition_by(small_corpus, 'twitter_wide')] == ['all']

    by_topic = partition_by(small_corpus, 'by_topic')
    assert [key for key, _ in by_topic] == ['redsox', 'cooking']
    assert sorted(i for _, part in by_topic for i in part.ids) == sorted(small_corpus.ids)

    by_type = dict(partition_by(small_corpus, 'by_type'))
    assert by_type['longstanding'].ids == ['t3', 't4', 't6']


def test_partition_rejects_unknown_granularity(small_corpus):
    with pytest.raises(ValueError):
        partition_by(small_corpus, 'by_author')


def test_class_distribution_table_rows_sum_to_one(synthetic_corpus):
    table = class_distribution_table(synthetic_corpus, by='topic_type')

    assert list(table.columns) == [act.label for act in SpeechAct]
    assert sorted(table.index) == ['entity', 'event', 'longstanding']
    np.testing.assert_allclose(table.sum(axis=1).to_numpy(), 1.0)


def test_class_distribution_is_uniform_on_synthetic(synthetic_corpus):
    distribution = class_distribution(synthetic_corpus)
    assert all(value == pytest.approx(1 / 6) for value in distribution.values())
