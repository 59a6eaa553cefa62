import pytest

from speechacts.corpus import DependencyParse
from speechacts.exceptions import LexiconError
from speechacts.porter import porter_stem
from speechacts.text import (
    LexiconBundle, MatchMode, TokenKind, Tokenizer, load_lexicon, load_lexicon_bundle, match_any,
    match_verbs, tokenize,
)


def kinds(tokens):
    return [(t.surface, t.kind) for t in tokens]


# ============================================================================
# TOKENIZER
# ============================================================================

def test_tokenizer_recognizes_twitter_elements():
    tokens = tokenize('RT @cityfan: Check http://t.co/x1 #RedSox :) 2-1 win!!')

    assert kinds(tokens) == [
        ('RT', TokenKind.RT_MARKER),
        ('@cityfan', TokenKind.MENTION),
        (':', TokenKind.PUNCTUATION),
        ('Check', TokenKind.WORD),
        ('http://t.co/x1', TokenKind.URL),
        ('#RedSox', TokenKind.HASHTAG),
        (':)', TokenKind.EMOTICON),
        ('2', TokenKind.NUMBER),
        ('-', TokenKind.PUNCTUATION),
        ('1', TokenKind.NUMBER),
        ('win', TokenKind.WORD),
        ('!', TokenKind.PUNCTUATION),
        ('!', TokenKind.PUNCTUATION),
    ]


def test_tokens_are_case_folded():
    assert [t.normalized for t in tokenize('WOW Great #BostonMarathon')] == [
        'wow', 'great', '#bostonmarathon']


def test_rt_needs_a_following_mention():
    assert [t.kind for t in tokenize('rt this please')][0] is TokenKind.WORD
    assert [t.kind for t in tokenize('so rt @x now')][1] is TokenKind.RT_MARKER


def test_emoticon_must_stand_alone():
    assert TokenKind.EMOTICON not in {t.kind for t in tokenize('f(x:)')}
    assert tokenize('great :D.')[1].kind is TokenKind.EMOTICON


def test_every_non_space_character_is_covered():
    text = "don't   stop @me #now ... 3.14 ok?"
    tokens = tokenize(text)
    assert ''.join(t.surface for t in tokens) == ''.join(text.split())


def test_empty_text_has_no_tokens():
    assert tokenize('') == []


def test_custom_emoticons_take_precedence_over_punctuation():
    tokenizer = Tokenizer(['^_^'])
    assert kinds(tokenizer.tokenize('yay ^_^')) == [('yay', TokenKind.WORD), ('^_^', TokenKind.EMOTICON)]


def test_retweet_prefix_then_words_and_numbers():
    tokens = tokenize('rt @craigyh999: 3 days until i run the london marathon')

    assert kinds(tokens) == [
        ('rt', TokenKind.RT_MARKER),
        ('@craigyh999', TokenKind.MENTION),
        (':', TokenKind.PUNCTUATION),
        ('3', TokenKind.NUMBER),
    ] + [(word, TokenKind.WORD) for word in 'days until i run the london marathon'.split()]


def test_question_with_mention_and_hashtag():
    tokens = tokenize('Anybody hear if @gehrig38 is well enough to attend tonight? #redsox')

    assert [t.surface for t in tokens if t.kind is TokenKind.PUNCTUATION] == ['?']
    assert [t.surface for t in tokens if t.kind is TokenKind.HASHTAG] == ['#redsox']
    assert [t.surface for t in tokens if t.kind is TokenKind.MENTION] == ['@gehrig38']


@pytest.mark.parametrize('text', [
    'RT @cityfan: Check http://t.co/x1 #RedSox :) 2-1 win!!',
    'rt @craigyh999: 3 days until i run the london marathon',
    "don't   stop @me #now ... 3.14 ok?",
    'great :D. lol <3',
    '',
])
def test_retokenizing_joined_surfaces_is_stable(text):
    tokens = tokenize(text)
    again = tokenize(' '.join(t.surface for t in tokens))

    assert len(again) == len(tokens)
    assert [t.surface for t in again] == [t.surface for t in tokens]


# ============================================================================
# LEXICONS
# ============================================================================

def test_load_lexicon_skips_comments_and_case_folds(tmp_path):
    path = tmp_path / 'words.txt'
    path.write_text('# header\n\nGreat\ngreat\nso  good\n', encoding='utf-8')

    lexicon = load_lexicon(path, MatchMode.PHRASE)

    assert lexicon.entries == {'great', 'so good'}
    assert lexicon.source_entries == ('great', 'so good')
    assert lexicon.name == 'words'


def test_empty_lexicon_is_an_error(tmp_path):
    path = tmp_path / 'empty.txt'
    path.write_text('# nothing here\n', encoding='utf-8')
    with pytest.raises(LexiconError):
        load_lexicon(path, MatchMode.TOKEN)


def test_phrase_match_needs_adjacent_tokens(tmp_path):
    path = tmp_path / 'phrases.txt'
    path.write_text('so good\n', encoding='utf-8')
    lexicon = load_lexicon(path, MatchMode.PHRASE)

    assert match_any(tokenize('That was SO good'), lexicon)
    assert not match_any(tokenize('so very good'), lexicon)


def test_stemmed_lexicon_matches_inflections(tmp_path):
    path = tmp_path / 'verbs.txt'
    path.write_text('report\nrecommend\n', encoding='utf-8')
    lexicon = load_lexicon(path, MatchMode.STEMMED_TOKEN)

    assert lexicon.entries == {porter_stem('report'), porter_stem('recommend')}
    assert match_any(tokenize('they reported it'), lexicon)
    assert match_any(tokenize('Recommending it'), lexicon)
    assert not match_any(tokenize('a reply'), lexicon)


def test_match_verbs_uses_verb_tags_only(lexicons):
    parse = DependencyParse.from_rows([
        (1, 'Officials', 'N', 2), (2, 'reported', 'V', 0), (3, 'the', 'D', 4), (4, 'report', 'N', 2),
    ])
    assert match_verbs(parse, lexicons.speech_act_verb) == {porter_stem('report')}
    assert match_verbs(None, lexicons.speech_act_verb) == set()


def test_match_verbs_requires_stemmed_lexicon(lexicons):
    with pytest.raises(LexiconError):
        match_verbs(None, lexicons.opinion)


def test_bundled_lexicon_sizes(lexicons):
    assert len(lexicons.opinion.source_entries) == 300
    assert len(lexicons.vulgar.source_entries) == 43
    assert len(lexicons.emoticon.source_entries) == 362
    assert len(lexicons.speech_act_verb.source_entries) == 229
    assert len(lexicons.abbreviation.source_entries) == 199


def test_bundled_lexicons_match_expected_words(lexicons):
    assert match_any(tokenize('that was AWESOME'), lexicons.opinion)
    assert match_any(tokenize('lol ok'), lexicons.abbreviation)
    assert match_any(lexicons.tokenizer.tokenize('see you <3'), lexicons.emoticon)
    assert not match_any(tokenize('the schedule tonight'), lexicons.opinion)


def test_emoticon_lexicon_ignores_words(lexicons):
    assert not match_any(tokenize('xd'), lexicons.opinion)
    assert {t.kind for t in lexicons.tokenizer.tokenize('XD')} == {TokenKind.EMOTICON}


def test_bundle_fingerprint_changes_with_entries(tmp_path, lexicons, caplog):
    for name in ('opinion_words', 'vulgar_words', 'emoticons', 'speech_act_verbs', 'abbreviations'):
        (tmp_path / f'{name}.txt').write_text('alpha\nbeta\n', encoding='utf-8')

    custom = load_lexicon_bundle(tmp_path)

    assert isinstance(custom, LexiconBundle)
    assert custom.fingerprint != lexicons.fingerprint
    assert load_lexicon_bundle(tmp_path).fingerprint == custom.fingerprint
    assert 'bundled list has' in caplog.text
