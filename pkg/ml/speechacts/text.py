"""
Text Module
===========
Twitter-aware tokenization and lexicon loading/matching, shared by every
feature group.

The tokenizer is a single regular expression whose alternatives are tried
in precedence order: URL, emoticon, mention, hashtag, RT marker, number,
word, punctuation. Every non-space character ends up in exactly one token.
"""

import hashlib
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Set, Tuple

from .config import LEXICON_DIR, LEXICON_FILES, LEXICON_SIZES, VERB_TAG
from .exceptions import LexiconError
from .porter import porter_stem

logger = logging.getLogger(__name__)

# ============================================================================
# TOKENS
# ============================================================================

class TokenKind(str, Enum):
    WORD = 'word'
    HASHTAG = 'hashtag'
    MENTION = 'mention'
    URL = 'url'
    EMOTICON = 'emoticon'
    PUNCTUATION = 'punctuation'
    RT_MARKER = 'rt_marker'
    NUMBER = 'number'


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    kind: TokenKind


URL_PATTERN = r'(?:https?://|www\.)\S+'
MENTION_PATTERN = r'@\w+'
HASHTAG_PATTERN = r'#\w+'
RT_PATTERN = r'(?<!\w)rt(?=\s+@\w)'
NUMBER_PATTERN = r'\d+(?:[.,:]\d+)*(?!\w)'
WORD_PATTERN = r"\w+(?:['’]\w+)*"
PUNCTUATION_PATTERN = r'[^\w\s]'


class Tokenizer:
    """
    Rule-based tweet tokenizer

    Emoticons are recognized only from the given list, and only when they
    stand alone (start of text or after whitespace, followed by whitespace,
    end of text or sentence punctuation).
    """

    def __init__(self, emoticons: Iterable[str] = ()):
        self.emoticons = tuple(sorted({e for e in emoticons if e}, key=lambda e: (-len(e), e)))

        alternatives = [('url', URL_PATTERN)]
        if self.emoticons:
            choices = '|'.join(re.escape(e) for e in self.emoticons)
            alternatives.append(('emoticon', rf'(?<!\S)(?:{choices})(?=\s|$|[.,!?])'))
        alternatives += [
            ('mention', MENTION_PATTERN),
            ('hashtag', HASHTAG_PATTERN),
            ('rt_marker', RT_PATTERN),
            ('number', NUMBER_PATTERN),
            ('word', WORD_PATTERN),
            ('punctuation', PUNCTUATION_PATTERN),
        ]
        self._pattern = re.compile(
            '|'.join(f'(?P<{name}>{pattern})' for name, pattern in alternatives),
            re.IGNORECASE | re.UNICODE,
        )

    def tokenize(self, text: str) -> List[Token]:
        tokens = []
        for match in self._pattern.finditer(text):
            kind = TokenKind(match.lastgroup)
            surface = match.group()
            tokens.append(Token(surface, surface.casefold(), kind))
        return tokens


@lru_cache(maxsize=1)
def default_tokenizer() -> Tokenizer:
    """Tokenizer over the bundled emoticon list"""
    return Tokenizer(_read_entries(LEXICON_DIR / LEXICON_FILES['emoticon']))


def tokenize(text: str, tokenizer: Optional[Tokenizer] = None) -> List[Token]:
    """
    Split a tweet into tokens

    Args:
        text: tweet text (may be empty)
        tokenizer: custom tokenizer; defaults to the bundled-emoticon one

    Returns:
        list of Token in text order
    """
    return (tokenizer or default_tokenizer()).tokenize(text)

# ============================================================================
# LEXICONS
# ============================================================================

class MatchMode(str, Enum):
    TOKEN = 'token'
    PHRASE = 'phrase'
    STEMMED_TOKEN = 'stemmed_token'


WORD_KINDS = frozenset({TokenKind.WORD})


@dataclass(frozen=True)
class Lexicon:
    name: str
    entries: FrozenSet[str]
    match_mode: MatchMode
    token_kinds: FrozenSet[TokenKind] = WORD_KINDS
    # Case-folded entries before stemming, deduplicated, in file order
    source_entries: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.entries:
            raise LexiconError(f"lexicon '{self.name}' is empty")

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def max_phrase_length(self) -> int:
        return max(len(entry.split()) for entry in self.entries)

    def normalize(self, form: str) -> str:
        """Map a case-folded token form into this lexicon's entry space"""
        if self.match_mode is MatchMode.STEMMED_TOKEN and form.isalpha():
            return porter_stem(form)
        return form


def _read_entries(path: Path) -> List[str]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Lexicon file not found: {path}")
    entries = []
    for line in path.read_text(encoding='utf-8').splitlines():
        entry = line.strip()
        if entry and not entry.startswith('#'):
            entries.append(entry)
    return entries


def load_lexicon(path, match_mode: MatchMode, name: Optional[str] = None,
                 token_kinds: Optional[Iterable[TokenKind]] = None) -> Lexicon:
    """
    Load a word list

    Args:
        path: one entry per line, '#' comments and blank lines skipped
        match_mode: how entries are normalized and matched
        name: lexicon name (defaults to the file stem)
        token_kinds: token kinds the lexicon matches (default: words)

    Returns:
        Lexicon with case-folded (and, in stemmed mode, stemmed) entries
    """
    path = Path(path)
    match_mode = MatchMode(match_mode)
    name = name or path.stem

    source = list(dict.fromkeys(' '.join(e.casefold().split()) for e in _read_entries(path)))
    if not source:
        raise LexiconError(f"lexicon '{name}' ({path}) has no entries")

    if match_mode is MatchMode.STEMMED_TOKEN:
        entries = frozenset(porter_stem(e) if e.isalpha() else e for e in source)
    else:
        entries = frozenset(source)

    lexicon = Lexicon(name, entries, match_mode,
                      frozenset(token_kinds) if token_kinds is not None else WORD_KINDS,
                      tuple(source))
    logger.info(f"Loaded lexicon '{name}': {len(source)} entries ({len(entries)} distinct {match_mode.value})")
    return lexicon


def match_any(tokens: List[Token], lexicon: Lexicon) -> bool:
    """True iff some token (or token run, in phrase mode) is a lexicon entry"""
    if lexicon.match_mode is MatchMode.PHRASE:
        forms = [t.normalized if t.kind in lexicon.token_kinds else None for t in tokens]
        longest = lexicon.max_phrase_length
        for start in range(len(forms)):
            for n in range(1, longest + 1):
                window = forms[start:start + n]
                if len(window) < n or None in window:
                    break
                if ' '.join(window) in lexicon.entries:
                    return True
        return False

    return any(
        lexicon.normalize(token.normalized) in lexicon.entries
        for token in tokens
        if token.kind in lexicon.token_kinds
    )


def match_verbs(parse, verb_lexicon: Lexicon) -> Set[str]:
    """
    Stems of verb-tagged parse tokens found in a stemmed lexicon

    Args:
        parse: DependencyParse or None
        verb_lexicon: lexicon in stemmed_token mode

    Returns:
        set of matched stems (empty when the tweet has no parse)
    """
    if verb_lexicon.match_mode is not MatchMode.STEMMED_TOKEN:
        raise LexiconError(f"lexicon '{verb_lexicon.name}' must use stemmed_token matching")
    if parse is None:
        return set()
    stems = set()
    for token in parse.tokens:
        if token.pos != VERB_TAG:
            continue
        stem = verb_lexicon.normalize(token.form.casefold())
        if stem in verb_lexicon.entries:
            stems.add(stem)
    return stems

# ============================================================================
# BUNDLE
# ============================================================================

@dataclass(frozen=True)
class LexiconBundle:
    """The five word lists behind the lexicon feature groups"""

    opinion: Lexicon
    vulgar: Lexicon
    emoticon: Lexicon
    speech_act_verb: Lexicon
    abbreviation: Lexicon

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for lexicon in (self.opinion, self.vulgar, self.emoticon,
                        self.speech_act_verb, self.abbreviation):
            digest.update(f"{lexicon.name}\t{lexicon.match_mode.value}\n".encode('utf-8'))
            for entry in sorted(lexicon.source_entries or lexicon.entries):
                digest.update(entry.encode('utf-8') + b'\n')
            digest.update(b'\x00')
        return digest.hexdigest()

    @cached_property
    def tokenizer(self) -> Tokenizer:
        return Tokenizer(self.emoticon.source_entries or self.emoticon.entries)

    @property
    def verb_keys(self) -> Tuple[str, ...]:
        """Speech-act-verb column keys (the listed verbs)"""
        return self.speech_act_verb.source_entries


LEXICON_MODES = {
    'opinion': (MatchMode.TOKEN, WORD_KINDS),
    'vulgar': (MatchMode.TOKEN, WORD_KINDS),
    'emoticon': (MatchMode.TOKEN, frozenset({TokenKind.EMOTICON})),
    'speech_act_verb': (MatchMode.STEMMED_TOKEN, WORD_KINDS),
    'abbreviation': (MatchMode.TOKEN, WORD_KINDS),
}


def load_lexicon_bundle(directory=None) -> LexiconBundle:
    """
    Load the five lexicons from a directory

    Args:
        directory: folder holding the files named in LEXICON_FILES
                   (defaults to the bundled lists)

    Returns:
        LexiconBundle
    """
    directory = Path(directory) if directory is not None else LEXICON_DIR
    lexicons = {}
    for name, filename in LEXICON_FILES.items():
        mode, kinds = LEXICON_MODES[name]
        lexicon = load_lexicon(directory / filename, mode, name=name, token_kinds=kinds)
        if len(lexicon.source_entries) != LEXICON_SIZES[name]:
            logger.warning(f"Lexicon '{name}' has {len(lexicon.source_entries)} entries "
                           f"(bundled list has {LEXICON_SIZES[name]})")
        lexicons[name] = lexicon
    return LexiconBundle(**lexicons)


@lru_cache(maxsize=1)
def default_lexicons() -> LexiconBundle:
    return load_lexicon_bundle(LEXICON_DIR)
