"""Iterative paraphrastic augmentation for span-labeled corpora.

Pipelines paraphrase each annotated sentence under negative lexical
constraints, re-locate the labeled span with a trainable span aligner, and
emit filtered, provenance-tracked records. See README for the CLI.
"""

from .aligner import AlignerConfig, SpanAligner, align, candidates, soft_label
from .constraints import ConstraintSet, InflectionLexicon, expand_phrase, union_framewise
from .core import (
    AlignmentExample,
    AugmentationRecord,
    FrameAnnotation,
    Span,
    TokenizedSentence,
    span_text,
    whitespace_tokenize,
)
from .decoder import EOS, Hypothesis, SubstitutionLatticeScorer, TokenScorer, decode, top_n
from .embeddings import (
    EmbeddingMatrix,
    EmbeddingProvider,
    FileEmbeddingProvider,
    HashEmbeddingProvider,
    StoreWriter,
    span_pool,
)
from .filters import FilterClassifier, FilterRule, apply_rule, train_filter
from .metrics import PRF, exact_prf, lexical_unit_prf, soft_prf
from .pipeline import PipelineConfig, run, run_iteration, seed_ablation
from .word_align import IbmWordAligner, em_train, gdfa, viterbi_align, words_to_span

__version__ = "0.1.0"

__all__ = [
    "AlignerConfig",
    "AlignmentExample",
    "AugmentationRecord",
    "ConstraintSet",
    "EOS",
    "EmbeddingMatrix",
    "EmbeddingProvider",
    "FileEmbeddingProvider",
    "FilterClassifier",
    "FilterRule",
    "FrameAnnotation",
    "HashEmbeddingProvider",
    "Hypothesis",
    "IbmWordAligner",
    "InflectionLexicon",
    "PRF",
    "PipelineConfig",
    "Span",
    "SpanAligner",
    "StoreWriter",
    "SubstitutionLatticeScorer",
    "TokenScorer",
    "TokenizedSentence",
    "align",
    "apply_rule",
    "candidates",
    "decode",
    "em_train",
    "exact_prf",
    "expand_phrase",
    "gdfa",
    "lexical_unit_prf",
    "run",
    "run_iteration",
    "seed_ablation",
    "soft_label",
    "soft_prf",
    "span_pool",
    "span_text",
    "top_n",
    "train_filter",
    "union_framewise",
    "viterbi_align",
    "whitespace_tokenize",
    "words_to_span",
]
