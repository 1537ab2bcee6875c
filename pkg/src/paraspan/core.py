"""Core domain types: tokenized sentences, token spans, and annotation records.

Spans are inclusive ``(start, end)`` token index pairs; all serialization uses
the same convention. Sentences are immutable after construction and safe to
share between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import EmptyInput, InvalidSpan

__all__ = [
    "TokenizedSentence",
    "Span",
    "FrameAnnotation",
    "AlignmentExample",
    "AugmentationRecord",
    "whitespace_tokenize",
    "span_text",
]


@dataclass(frozen=True)
class TokenizedSentence:
    """A token sequence plus the raw string and per-token character offsets."""

    tokens: tuple[str, ...]
    raw_text: str
    token_offsets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.tokens:
            raise EmptyInput("sentence has no tokens")
        if len(self.tokens) != len(self.token_offsets):
            raise ValueError("tokens and token_offsets length mismatch")
        prev_end = -1
        for tok, (start, end) in zip(self.tokens, self.token_offsets):
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"token {tok!r} is empty or contains whitespace")
            if start < 0 or end <= start or start < prev_end:
                raise ValueError(f"offsets not strictly increasing: {(start, end)}")
            if self.raw_text[start:end] != tok:
                raise ValueError(f"offset ({start},{end}) does not index token {tok!r}")
            prev_end = end

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def from_tokens(cls, tokens) -> "TokenizedSentence":
        """Build a sentence from bare tokens; raw text is the single-space join."""
        tokens = tuple(tokens)
        offsets = []
        pos = 0
        for tok in tokens:
            offsets.append((pos, pos + len(tok)))
            pos += len(tok) + 1
        return cls(tokens=tokens, raw_text=" ".join(tokens), token_offsets=tuple(offsets))


@dataclass(frozen=True, order=True)
class Span:
    """Contiguous token range with inclusive 0-based start and end indices."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise InvalidSpan(f"bad span ({self.start},{self.end})")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def fits(self, sentence_len: int) -> bool:
        return self.end < sentence_len


def whitespace_tokenize(raw: str) -> TokenizedSentence:
    """Segment ``raw`` at whitespace, keeping character offsets into it."""
    if not raw or not raw.strip():
        raise EmptyInput("cannot tokenize empty or whitespace-only text")
    tokens, offsets = [], []
    i, n = 0, len(raw)
    while i < n:
        if raw[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not raw[j].isspace():
            j += 1
        tokens.append(raw[i:j])
        offsets.append((i, j))
        i = j
    return TokenizedSentence(tokens=tuple(tokens), raw_text=raw, token_offsets=tuple(offsets))


def span_text(s: TokenizedSentence, sp: Span) -> str:
    """Text under a span: the covered tokens joined by single spaces."""
    if not sp.fits(len(s)):
        raise InvalidSpan(f"span ({sp.start},{sp.end}) outside sentence of length {len(s)}")
    return " ".join(s.tokens[sp.start : sp.end + 1])


@dataclass(frozen=True)
class FrameAnnotation:
    """A frame-evoking trigger span in a sentence, with seed-selection metadata."""

    annotation_id: str
    frame_id: str
    lexical_unit: str
    trigger: Span
    sentence: TokenizedSentence
    created_order: int | None = None

    def __post_init__(self):
        if not self.trigger.fits(len(self.sentence)):
            raise InvalidSpan("trigger span outside sentence")
        lemma, _, pos = self.lexical_unit.rpartition(".")
        if not lemma or not pos or "." in lemma:
            raise ValueError(f"lexical_unit {self.lexical_unit!r} must be 'lemma.pos'")

    @property
    def lu_lemma(self) -> str:
        return self.lexical_unit.rpartition(".")[0]

    @property
    def lu_pos(self) -> str:
        return self.lexical_unit.rpartition(".")[2]


@dataclass(frozen=True)
class AlignmentExample:
    """(source, source span, reference, gold span) tuple for aligner training/eval.

    ``gold_span is None`` encodes the judgment that the reference contains no
    semantically equivalent phrase.
    """

    source: TokenizedSentence
    source_span: Span
    reference: TokenizedSentence
    gold_span: Span | None = None

    def __post_init__(self):
        if not self.source_span.fits(len(self.source)):
            raise InvalidSpan("source span outside source sentence")
        if self.gold_span is not None and not self.gold_span.fits(len(self.reference)):
            raise InvalidSpan("gold span outside reference sentence")


@dataclass(frozen=True)
class AugmentationRecord:
    """One pipeline output with provenance and per-model scores.

    ``parent_id`` names the seed annotation for iteration 1 and the previous
    record of the same chain for later iterations, so chains form a forest.
    """

    record_id: str
    parent_id: str
    frame_id: str
    iteration: int
    paraphrase: TokenizedSentence
    trigger: Span
    decoder_score: float
    aligner_score: float
    p_filter_score: float | None = None
    r_filter_score: float | None = None

    def __post_init__(self):
        if self.iteration < 1:
            raise ValueError("iteration must be >= 1")
        if not self.trigger.fits(len(self.paraphrase)):
            raise InvalidSpan("trigger span outside paraphrase")
        if not 0.0 <= self.aligner_score <= 1.0:
            raise ValueError("aligner_score must be in [0,1]")

    def with_filter_scores(self, p_score: float, r_score: float) -> "AugmentationRecord":
        return replace(self, p_filter_score=p_score, r_filter_score=r_score)
