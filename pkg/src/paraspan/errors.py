"""Exception hierarchy shared across the package."""


class ParaspanError(Exception):
    """Base class for all package-specific errors."""


class EmptyInput(ParaspanError):
    """Raised when text input is empty or whitespace-only."""


class InvalidSpan(ParaspanError):
    """Raised when a span does not fit inside its sentence."""


class InputMismatch(ParaspanError):
    """Raised when paired inputs (predictions vs. golds) disagree in length."""


class DimMismatch(ParaspanError):
    """Raised when vector dimensions disagree with a declared dimension."""


class PairNotFound(ParaspanError):
    """Raised when a sentence pair is missing from an embedding store."""


class EmptyDataset(ParaspanError):
    """Raised when a training routine receives no usable examples."""


class WindowViolation(ParaspanError):
    """Raised when a gold span falls outside the candidate length window."""


class DegenerateLabels(ParaspanError):
    """Raised when classifier training data contains a single class."""


class MissingLabels(ParaspanError):
    """Raised when filter reporting needs acceptability labels that are absent."""


class MissingMetadata(ParaspanError):
    """Raised when seed ablation needs creation-order metadata that is absent."""


class NoFeasibleOutput(ParaspanError):
    """Raised when constraints exclude every possible decoder output."""


class ChainExhausted(ParaspanError):
    """Raised when an augmentation chain cannot continue (infeasible decode or no alignment)."""


class NumericalError(ParaspanError):
    """Raised when a computation produces non-finite values."""
