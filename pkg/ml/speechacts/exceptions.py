"""
Error Types
===========
Every data/format problem raised by the package is a ``SpeechActError``.
They subclass ``ValueError`` so callers that only expect bad-input errors
keep working.
"""


class SpeechActError(ValueError):
    """Base class for all package errors"""


class CorpusFormatError(SpeechActError):
    """Malformed corpus or parse sidecar file"""

    def __init__(self, message, errors=None):
        self.errors = list(errors or [])
        if self.errors:
            message = message + "\n  " + "\n  ".join(self.errors)
        super().__init__(message)


class LexiconError(SpeechActError):
    """Unreadable or empty lexicon"""


class VocabularyError(SpeechActError):
    """Bad vocabulary file or a vocabulary with no columns"""


class ModelFormatError(SpeechActError):
    """Bad magic, version or truncated model file"""


class FingerprintMismatchError(SpeechActError):
    """Model, vocabulary and lexicons do not belong together"""


class DimensionMismatchError(SpeechActError):
    """Vector width differs from the model's"""


class EvaluationError(SpeechActError):
    """Cross-validation cannot run on the given corpus"""


class NumericalError(SpeechActError):
    """Non-finite loss or parameters during training"""
