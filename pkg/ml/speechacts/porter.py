"""
Porter Stemmer
==============
The 1980 Porter suffix-stripping algorithm, steps 1a to 5b, without later
extensions: no irregular-form table, no minimum word length, and the
original ``abli -> able`` rule in step 2.

Input is a lowercase word; callers filter non-alphabetic tokens.
"""

from functools import lru_cache

VOWELS = frozenset('aeiou')


# ============================================================================
# MEASURE AND SHAPE HELPERS
# ============================================================================

def _is_consonant(word: str, i: int) -> bool:
    if word[i] in VOWELS:
        return False
    if word[i] == 'y':
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of VC sequences in the [C](VC){m}[V] form of ``stem``"""
    pattern = ''.join('c' if _is_consonant(stem, i) else 'v' for i in range(len(stem)))
    return pattern.count('vc')


def _has_positive_measure(stem: str) -> bool:
    return _measure(stem) > 0


def _measure_gt_1(stem: str) -> bool:
    return _measure(stem) > 1


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_consonant(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    """*o: consonant-vowel-consonant ending, last letter not w, x or y"""
    return (
        len(word) >= 3
        and _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in 'wxy'
    )


def _strip(word: str, suffix: str) -> str:
    return word[:-len(suffix)] if suffix else word


def _apply_rules(word: str, rules) -> str:
    """
    Apply the first rule whose suffix matches

    A matching rule whose condition fails ends the step with ``word``
    unchanged; later rules are not tried. The pseudo-suffix ``*d`` matches a
    double consonant ending.
    """
    for suffix, replacement, condition in rules:
        if suffix == '*d' and _ends_double_consonant(word):
            stem = word[:-2]
        elif word.endswith(suffix):
            stem = _strip(word, suffix)
        else:
            continue
        if condition is None or condition(stem):
            return stem + replacement
        return word
    return word


# ============================================================================
# STEPS
# ============================================================================

STEP1A_RULES = (
    ('sses', 'ss', None),
    ('ies', 'i', None),
    ('ss', 'ss', None),
    ('s', '', None),
)

STEP2_RULES = (
    ('ational', 'ate', _has_positive_measure),
    ('tional', 'tion', _has_positive_measure),
    ('enci', 'ence', _has_positive_measure),
    ('anci', 'ance', _has_positive_measure),
    ('izer', 'ize', _has_positive_measure),
    ('abli', 'able', _has_positive_measure),
    ('alli', 'al', _has_positive_measure),
    ('entli', 'ent', _has_positive_measure),
    ('eli', 'e', _has_positive_measure),
    ('ousli', 'ous', _has_positive_measure),
    ('ization', 'ize', _has_positive_measure),
    ('ation', 'ate', _has_positive_measure),
    ('ator', 'ate', _has_positive_measure),
    ('alism', 'al', _has_positive_measure),
    ('iveness', 'ive', _has_positive_measure),
    ('fulness', 'ful', _has_positive_measure),
    ('ousness', 'ous', _has_positive_measure),
    ('aliti', 'al', _has_positive_measure),
    ('iviti', 'ive', _has_positive_measure),
    ('biliti', 'ble', _has_positive_measure),
)

STEP3_RULES = (
    ('icate', 'ic', _has_positive_measure),
    ('ative', '', _has_positive_measure),
    ('alize', 'al', _has_positive_measure),
    ('iciti', 'ic', _has_positive_measure),
    ('ical', 'ic', _has_positive_measure),
    ('ful', '', _has_positive_measure),
    ('ness', '', _has_positive_measure),
)

STEP4_RULES = (
    ('al', '', _measure_gt_1),
    ('ance', '', _measure_gt_1),
    ('ence', '', _measure_gt_1),
    ('er', '', _measure_gt_1),
    ('ic', '', _measure_gt_1),
    ('able', '', _measure_gt_1),
    ('ible', '', _measure_gt_1),
    ('ant', '', _measure_gt_1),
    ('ement', '', _measure_gt_1),
    ('ment', '', _measure_gt_1),
    ('ent', '', _measure_gt_1),
    ('ion', '', lambda stem: _measure(stem) > 1 and stem[-1] in 'st'),
    ('ou', '', _measure_gt_1),
    ('ism', '', _measure_gt_1),
    ('ate', '', _measure_gt_1),
    ('iti', '', _measure_gt_1),
    ('ous', '', _measure_gt_1),
    ('ive', '', _measure_gt_1),
    ('ize', '', _measure_gt_1),
)


def _step1a(word: str) -> str:
    return _apply_rules(word, STEP1A_RULES)


def _step1b(word: str) -> str:
    if word.endswith('eed'):
        stem = word[:-3]
        return stem + 'ee' if _measure(stem) > 0 else word

    for suffix in ('ed', 'ing'):
        if word.endswith(suffix) and _contains_vowel(word[:-len(suffix)]):
            stem = word[:-len(suffix)]
            break
    else:
        return word

    return _apply_rules(stem, (
        ('at', 'ate', None),
        ('bl', 'ble', None),
        ('iz', 'ize', None),
        ('*d', stem[-1], lambda _: stem[-1] not in 'lsz'),
        ('', 'e', lambda s: _measure(s) == 1 and _ends_cvc(s)),
    ))


def _step1c(word: str) -> str:
    return _apply_rules(word, (('y', 'i', _contains_vowel),))


def _step2(word: str) -> str:
    return _apply_rules(word, STEP2_RULES)


def _step3(word: str) -> str:
    return _apply_rules(word, STEP3_RULES)


def _step4(word: str) -> str:
    return _apply_rules(word, STEP4_RULES)


def _step5a(word: str) -> str:
    if word.endswith('e'):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            return stem
    return word


def _step5b(word: str) -> str:
    if word.endswith('ll') and _measure(word[:-1]) > 1:
        return word[:-1]
    return word


# ============================================================================
# PUBLIC API
# ============================================================================

@lru_cache(maxsize=65536)
def porter_stem(word: str) -> str:
    """
    Stem one lowercase word

    Args:
        word: lowercase alphabetic word

    Returns:
        the Porter stem (e.g. caresses -> caress, relational -> relat)
    """
    stem = word
    for step in (_step1a, _step1b, _step1c, _step2, _step3, _step4, _step5a, _step5b):
        stem = step(stem)
    return stem
