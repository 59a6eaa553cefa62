import pytest
from nltk.stem.porter import PorterStemmer

from speechacts.config import LEXICON_DIR, LEXICON_FILES
from speechacts.porter import porter_stem

from conftest import DATA_DIR

ORACLE = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def read_words(path):
    words = []
    for line in path.read_text(encoding='utf-8').splitlines():
        line = line.strip().lower()
        if line and not line.startswith('#') and line.isalpha():
            words.append(line)
    return words


@pytest.mark.parametrize('word, stem', [
    ('caresses', 'caress'),
    ('ponies', 'poni'),
    ('cats', 'cat'),
    ('agreed', 'agre'),
    ('plastered', 'plaster'),
    ('motoring', 'motor'),
    ('conflated', 'conflat'),
    ('hopping', 'hop'),
    ('filing', 'file'),
    ('happy', 'happi'),
    ('relational', 'relat'),
    ('conditional', 'condit'),
    ('generalization', 'gener'),
    ('hopefulness', 'hope'),
    ('revival', 'reviv'),
    ('adjustable', 'adjust'),
    ('controlling', 'control'),
    ('probate', 'probat'),
])
def test_reference_stems(word, stem):
    assert porter_stem(word) == stem


def test_speech_act_verbs_agree_with_reference():
    verbs = read_words(LEXICON_DIR / LEXICON_FILES['speech_act_verb'])
    assert len(verbs) == 229
    mismatches = {w: (porter_stem(w), ORACLE.stem(w)) for w in verbs if porter_stem(w) != ORACLE.stem(w)}
    assert mismatches == {}


def test_sample_vocabulary_agrees_with_reference():
    words = read_words(DATA_DIR / 'porter_sample_vocabulary.txt')
    assert len(words) >= 1000
    mismatches = {w: (porter_stem(w), ORACLE.stem(w)) for w in words if porter_stem(w) != ORACLE.stem(w)}
    assert mismatches == {}
