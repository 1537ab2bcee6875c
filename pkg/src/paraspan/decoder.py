"""Beam search over a pluggable token scorer with hard negative constraints.

Banned continuations get log-probability -inf before top-k selection; the
remaining distribution is NOT renormalized, so hypothesis scores stay sums of
unmasked scorer log-probabilities. A hypothesis completes either by emitting
the end-of-sequence marker (whose log-probability is added) or by reaching
``max_len`` tokens, in which case it is returned truncated.

``decode`` is a pure function of its arguments; concurrent decodes may share a
scorer and a constraint set, both of which are read-only.
"""
from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constraints import ConstraintSet
from .core import TokenizedSentence
from .errors import NoFeasibleOutput

__all__ = ["EOS", "TokenScorer", "SubstitutionLatticeScorer", "Hypothesis", "decode", "top_n"]

EOS = "</s>"


class TokenScorer(ABC):
    """Scores next-token distributions for autoregressive generation.

    Implementations must be deterministic per ``(source, prefix)`` and safe to
    share between threads for concurrent read-only scoring.
    """

    @property
    @abstractmethod
    def vocabulary(self) -> tuple[str, ...]:
        """Finite ordered token set including the end-of-sequence marker."""

    @abstractmethod
    def log_probs(self, source: TokenizedSentence, prefix: tuple[str, ...]) -> np.ndarray:
        """Log-probability per vocabulary token; exponentiates and sums to 1."""


@dataclass(frozen=True)
class Hypothesis:
    """A (possibly finished) decoder output with its joint log-probability."""

    tokens: tuple[str, ...]
    logprob_sum: float
    finished: bool = False

    @property
    def decoder_score(self) -> float:
        """1 - exp(mean per-token log-probability); in [0,1), lower = more confident."""
        return 1.0 - math.exp(self.logprob_sum / max(1, len(self.tokens)))

    def sentence(self) -> TokenizedSentence:
        return TokenizedSentence.from_tokens(self.tokens)


def _sort_key(h: Hypothesis):
    return (-h.logprob_sum, h.tokens, not h.finished)


def decode(
    source: TokenizedSentence,
    constraints: ConstraintSet,
    beam_size: int,
    max_len: int,
    scorer: TokenScorer,
) -> list[Hypothesis]:
    """Constrained beam search; returns hypotheses in descending log-probability.

    Ties break by lexicographic token order. Raises :class:`NoFeasibleOutput`
    when the constraints exclude every completion.
    """
    if beam_size < 1 or max_len < 1:
        raise ValueError("beam_size and max_len must be >= 1")
    vocab = scorer.vocabulary
    beams = [Hypothesis(tokens=(), logprob_sum=0.0)]
    for _ in range(max_len):
        live = [h for h in beams if not h.finished and len(h.tokens) < max_len]
        if not live:
            break
        candidates = [h for h in beams if h.finished or len(h.tokens) >= max_len]
        for hyp in live:
            scores = scorer.log_probs(source, hyp.tokens)
            blocked = constraints.blocked_continuations(hyp.tokens)
            for idx, tok in enumerate(vocab):
                lp = float(scores[idx])
                if lp == -math.inf or tok in blocked:
                    continue
                if tok == EOS:
                    candidates.append(
                        Hypothesis(hyp.tokens, hyp.logprob_sum + lp, finished=True)
                    )
                else:
                    candidates.append(Hypothesis(hyp.tokens + (tok,), hyp.logprob_sum + lp))
        if not candidates:
            raise NoFeasibleOutput("constraints exclude every completion")
        candidates.sort(key=_sort_key)
        beams = candidates[:beam_size]
    return sorted(beams, key=_sort_key)


def top_n(hyps: list[Hypothesis], n: int) -> list[Hypothesis]:
    """First ``min(n, len(hyps))`` items of the descending-logprob list."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return hyps[:n]


class SubstitutionLatticeScorer(TokenScorer):
    """Deterministic toy paraphrase model: per-position token substitution.

    At prefix length ``i`` the distribution copies ``source[i]`` with its copy
    probability and spends the rest on that token's substitutes; past the end
    of the source all mass goes to EOS. Output length therefore always equals
    source length. Real scorers plug into the decoder unchanged.
    """

    def __init__(
        self,
        synonym_table: dict[str, list[tuple[str, float]]],
        copy_prob: float = 0.5,
        copy_prob_overrides: dict[str, float] | None = None,
        extra_vocabulary: tuple[str, ...] = (),
    ):
        if not 0.0 < copy_prob < 1.0:
            raise ValueError("copy_prob must be in (0,1)")
        for token, subs in synonym_table.items():
            total = sum(p for _, p in subs)
            if subs and abs(total - 1.0) > 1e-9:
                raise ValueError(f"substitute probabilities for {token!r} sum to {total}")
        self.synonym_table = {tok: list(subs) for tok, subs in synonym_table.items()}
        self.copy_prob = copy_prob
        self.copy_prob_overrides = dict(copy_prob_overrides or {})
        tokens = set(extra_vocabulary) | set(synonym_table)
        for subs in synonym_table.values():
            tokens |= {sub for sub, _ in subs}
        tokens.discard(EOS)
        self._vocabulary = tuple(sorted(tokens)) + (EOS,)
        self._index = {tok: i for i, tok in enumerate(self._vocabulary)}

    @classmethod
    def from_file(
        cls,
        path: str | Path,
        copy_prob: float = 0.5,
        extra_vocabulary: tuple[str, ...] = (),
    ) -> "SubstitutionLatticeScorer":
        """Load a JSONL synonym table: {"token", "substitutes": [{"token","p"}], "copy_p"}."""
        table: dict[str, list[tuple[str, float]]] = {}
        overrides: dict[str, float] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                table[row["token"]] = [(s["token"], float(s["p"])) for s in row["substitutes"]]
                if "copy_p" in row and row["copy_p"] is not None:
                    overrides[row["token"]] = float(row["copy_p"])
        return cls(table, copy_prob=copy_prob, copy_prob_overrides=overrides,
                   extra_vocabulary=extra_vocabulary)

    @property
    def vocabulary(self) -> tuple[str, ...]:
        return self._vocabulary

    def log_probs(self, source: TokenizedSentence, prefix: tuple[str, ...]) -> np.ndarray:
        out = np.full(len(self._vocabulary), -math.inf)
        position = len(prefix)
        if position >= len(source):
            out[self._index[EOS]] = 0.0
            return out
        src_tok = source.tokens[position]
        if src_tok not in self._index:
            raise KeyError(f"source token {src_tok!r} not in scorer vocabulary")
        subs = self.synonym_table.get(src_tok, [])
        if not subs:
            out[self._index[src_tok]] = 0.0
            return out
        cp = self.copy_prob_overrides.get(src_tok, self.copy_prob)
        out[self._index[src_tok]] = math.log(cp)
        for sub, p in subs:
            lp = math.log((1.0 - cp) * p) if p > 0 else -math.inf
            idx = self._index[sub]
            out[idx] = np.logaddexp(out[idx], lp) if out[idx] != -math.inf else lp
        return out
