"""Synthetic alignment corpora for aligner tests.

Each example rewrites a source sentence into random reference tokens, then
splices the source span together with two tokens of context on each side into
the reference at a random position. Under the hash embedder the spliced span
embeds identically to the source span (same tokens, same +-2 window), so the
gold alignment is recoverable from the features alone.
"""
from __future__ import annotations

import numpy as np

from paraspan.core import AlignmentExample, Span, TokenizedSentence


def _random_tokens(rng: np.random.Generator, length: int, pool: int = 500) -> list[str]:
    return [f"w{rng.integers(pool)}" for _ in range(length)]


def make_splice_example(rng: np.random.Generator) -> AlignmentExample:
    n = int(rng.integers(9, 14))
    span_len = int(rng.integers(1, 4))
    s_start = int(rng.integers(2, n - span_len - 2))
    src = _random_tokens(rng, n)

    m = int(rng.integers(max(9, span_len + 5), 15))
    g_start = int(rng.integers(2, m - span_len - 2))
    ref = _random_tokens(rng, m)
    window = src[s_start - 2 : s_start + span_len + 2]
    ref[g_start - 2 : g_start + span_len + 2] = window

    return AlignmentExample(
        source=TokenizedSentence.from_tokens(src),
        source_span=Span(s_start, s_start + span_len - 1),
        reference=TokenizedSentence.from_tokens(ref),
        gold_span=Span(g_start, g_start + span_len - 1),
    )


def make_splice_corpus(count: int, seed: int = 0) -> list[AlignmentExample]:
    rng = np.random.default_rng(seed)
    return [make_splice_example(rng) for _ in range(count)]
