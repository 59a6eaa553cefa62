import pytest

from speechacts.corpus import Corpus
from speechacts.exceptions import CorpusFormatError
from speechacts.validators import ValidationResult, parse_problems, record_problems, validate_corpus

from conftest import build_tweet


def unlabeled_corpus(count):
    return Corpus(tuple(build_tweet(f'u{i}', 'just landed', label=None) for i in range(count)))


# ============================================================================
# RECORDS AND PARSES
# ============================================================================

def test_record_problems():
    assert record_problems({'id': 'a', 'text': 'hi', 'topic': 'x', 'topic_type': 'event'}) == []
    assert record_problems(['not', 'a', 'record']) == ["record is not an object"]
    problems = record_problems({'id': '', 'text': 3, 'topic': 'x', 'label': 1})
    assert any('topic_type' in p for p in problems)
    assert "field 'text' must be a string" in problems
    assert "empty id" in problems
    assert "field 'label' must be a string or null" in problems


def test_parse_problems():
    assert parse_problems([(1, 'i', 'O', 2), (2, 'think', 'V', 0)]) == []
    assert parse_problems([]) == ["parse has no tokens"]
    assert parse_problems([(2, 'x', 'N', 0)]) == ["token index 2 out of order (expected 1)"]
    assert parse_problems([(1, 'x', 'N', 1)]) == ["token 1 is its own head"]

# ============================================================================
# CORPUS CHECKS
# ============================================================================

def test_labeled_corpus_is_valid(small_corpus):
    result = validate_corpus(small_corpus, folds=5)

    assert result.is_valid()
    assert result.warnings == []
    assert "Total tweets: 6" in result.info
    assert result.to_dict()['valid'] is True


def test_unlabeled_tweets_block_training(small_corpus):
    corpus = Corpus(small_corpus.tweets + unlabeled_corpus(7).tweets)

    result = validate_corpus(corpus)

    assert not result.is_valid()
    assert result.errors == ["7 tweets have no label: u0, u1, u2, u3, u4 and 2 more"]
    with pytest.raises(CorpusFormatError) as excinfo:
        result.raise_for_errors('tweets.jsonl: corpus cannot be used for training')
    assert excinfo.value.errors == result.errors


def test_unlabeled_tweets_are_a_warning_when_labels_are_optional(small_corpus):
    corpus = Corpus(small_corpus.tweets + unlabeled_corpus(1).tweets)
    result = validate_corpus(corpus, require_labels=False)

    assert result.is_valid()
    assert result.warnings == ["1 tweets have no label"]


def test_too_few_tweets_for_the_folds(small_corpus):
    result = validate_corpus(small_corpus, folds=20)
    assert result.errors == ["20 folds need at least 20 labeled tweets, corpus has 6"]


def test_missing_classes_and_parses_are_warnings(make_tweet):
    corpus = Corpus((make_tweet('a', 'why?', 'question'), make_tweet('b', 'ok', 'assertion')))

    result = validate_corpus(corpus)

    assert result.is_valid()
    assert result.warnings[0] == "No tweets labeled recommendation, expression, request, miscellaneous"
    assert result.warnings[1].startswith("2 tweets have no dependency parse")


def test_empty_corpus_is_invalid():
    result = validate_corpus(Corpus(()))
    assert result.errors == ["Corpus is empty"]


def test_raise_for_errors_is_silent_without_errors():
    result = ValidationResult()
    result.add_warning('minor')
    result.raise_for_errors('context')
