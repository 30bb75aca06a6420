"""Exception types shared across the toolkit."""


class DialectEvalError(Exception):
    """Base class for all toolkit errors."""


class EmptyReference(DialectEvalError):
    """A WER computation was asked to divide by an empty reference."""


class EmptyCorpus(DialectEvalError):
    """A corpus-level operation received no utterances."""


class MissingHypothesis(DialectEvalError):
    """An utterance lacks a hypothesis under the requested system name."""


class NgramNotFound(DialectEvalError):
    """A matched pair references an n-gram absent from the utterance.

    Signals internal inconsistency: pairs must be produced by the
    extract/common/pair chain, never constructed by hand.
    """


class ZeroDenominator(DialectEvalError):
    """Disparity (or reduction) is undefined for a zero denominator."""


class EmptyInput(DialectEvalError):
    """A metric received an empty score list."""


class DimensionMismatch(DialectEvalError):
    """Scorer parameter shapes do not chain with the input frames."""


class SingleClassDataset(DialectEvalError):
    """Training data contains only one class."""


class NonFiniteLoss(DialectEvalError):
    """Training diverged to a non-finite loss."""


class MissingScore(DialectEvalError):
    """An utterance lacks the classifier score required for selection."""


class ManifestError(DialectEvalError):
    """A manifest file failed to parse or validate.

    ``line`` is the 1-based line number the problem was found on, or None
    when the error is not tied to one line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(ManifestError):
    """A manifest line is not a valid record."""


class DuplicateId(ManifestError):
    """Two manifest records share an utterance id."""


class MissingRequiredField(ManifestError):
    """A manifest record lacks a required field."""


class InvalidSpec(DialectEvalError):
    """A synthetic-corpus spec is malformed or infeasible."""
