"""IBM Model 1/2 word alignment with grow-diag-final-and symmetrization.

Textbook batch EM with a NULL source token and uniform initialization, so
training is deterministic and permutation-invariant over corpus order. The
Model 2 position table is bucketed by (source length, target length). Word
alignments convert to spans by taking the maximal target span covered by the
links of a source span, which is how word-level baselines are scored on the
span alignment task.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator

from .core import Span
from .errors import EmptyDataset

__all__ = [
    "NULL_TOKEN",
    "IbmModel",
    "WordAlignment",
    "em_train",
    "viterbi_align",
    "gdfa",
    "words_to_span",
    "IbmWordAligner",
    "alignment_to_text",
    "alignment_from_text",
]

NULL_TOKEN = "<NULL>"

Pair = tuple[tuple[str, ...], tuple[str, ...]]


@dataclass
class IbmModel:
    """Lexical table t(target|source) plus the Model-2 position table."""

    t: dict[tuple[str, str], float]
    a: dict[tuple[int, int, int, int], float]
    variant: str
    log_likelihoods: list[float] = field(default_factory=list)

    def align_prob(self, i: int, j: int, n: int, m: int) -> float:
        """P(source position i | target position j, lengths); uniform for M1.

        Unseen (n, m) length buckets back off to uniform so prediction on new
        pairs degrades to Model-1 behavior instead of zeroing out.
        """
        if self.variant == "m1" or not self.a:
            return 1.0 / (n + 1)
        return self.a.get((i, j, n, m), 1.0 / (n + 1))


@dataclass(frozen=True)
class WordAlignment:
    """Source-to-target link set for one sentence pair."""

    links: frozenset[tuple[int, int]]


def _normalize_pairs(corpus) -> list[Pair]:
    return [(tuple(src), tuple(tgt)) for src, tgt in corpus]


def _uniform_t(corpus: list[Pair]) -> dict[tuple[str, str], float]:
    cooc: dict[str, set[str]] = defaultdict(set)
    for src, tgt in corpus:
        for f in list(src) + [NULL_TOKEN]:
            cooc[f].update(tgt)
    t = {}
    for f, targets in cooc.items():
        p = 1.0 / len(targets)
        for e in targets:
            t[(f, e)] = p
    return t


def _uniform_a(corpus: list[Pair]) -> dict[tuple[int, int, int, int], float]:
    a = {}
    for src, tgt in corpus:
        n, m = len(src), len(tgt)
        for j in range(m):
            for i in range(n + 1):  # i = 0 is NULL
                a[(i, j, n, m)] = 1.0 / (n + 1)
    return a


def em_train(
    corpus,
    variant: str = "m2",
    iterations: int = 5,
    init: IbmModel | None = None,
) -> IbmModel:
    """Batch EM for the requested variant; likelihood recorded per iteration.

    ``init`` warm-starts the lexical table (the usual Model 1 -> Model 2
    schedule). The recorded corpus log-likelihoods are non-decreasing.
    """
    if variant not in ("m1", "m2"):
        raise ValueError("variant must be 'm1' or 'm2'")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    pairs = _normalize_pairs(corpus)
    if not pairs:
        raise EmptyDataset("empty corpus")

    t = dict(init.t) if init is not None else _uniform_t(pairs)
    a = _uniform_a(pairs) if variant == "m2" else {}
    model = IbmModel(t=t, a=a, variant=variant)

    for _ in range(iterations):
        count_t = defaultdict(float)
        total_t = defaultdict(float)
        count_a = defaultdict(float)
        total_a = defaultdict(float)
        log_likelihood = 0.0
        for src, tgt in pairs:
            n, m = len(src), len(tgt)
            sources = [NULL_TOKEN] + list(src)
            for j, e in enumerate(tgt):
                contribs = [
                    model.t.get((f, e), 0.0) * model.align_prob(i, j, n, m)
                    for i, f in enumerate(sources)
                ]
                z = sum(contribs)
                log_likelihood += math.log(z) if z > 0 else -math.inf
                if z <= 0:
                    continue
                for i, f in enumerate(sources):
                    c = contribs[i] / z
                    count_t[(f, e)] += c
                    total_t[f] += c
                    if variant == "m2":
                        count_a[(i, j, n, m)] += c
                        total_a[(j, n, m)] += c
        model.log_likelihoods.append(log_likelihood)
        model.t = {
            (f, e): count_t[(f, e)] / total_t[f] for (f, e) in count_t if total_t[f] > 0
        }
        if variant == "m2":
            model.a = {
                (i, j, n, m): count_a[(i, j, n, m)] / total_a[(j, n, m)]
                for (i, j, n, m) in count_a
                if total_a[(j, n, m)] > 0
            }
    return model


def viterbi_align(model: IbmModel, pair) -> WordAlignment:
    """Link each target word to its argmax source word, or NULL (no link).

    Ties between source words go to the smallest source index; a source word
    must strictly beat NULL to produce a link.
    """
    src, tgt = tuple(pair[0]), tuple(pair[1])
    n, m = len(src), len(tgt)
    links = set()
    for j, e in enumerate(tgt):
        best_i, best_p = None, model.t.get((NULL_TOKEN, e), 0.0) * model.align_prob(0, j, n, m)
        for i, f in enumerate(src):
            p = model.t.get((f, e), 0.0) * model.align_prob(i + 1, j, n, m)
            if p > best_p:
                best_i, best_p = i, p
        if best_i is not None:
            links.add((best_i, j))
    return WordAlignment(links=frozenset(links))


_NEIGHBORS = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]


def gdfa(forward: WordAlignment, backward: WordAlignment, n: int, m: int) -> WordAlignment:
    """Grow-diag-final-and symmetrization of two directional alignments.

    Both inputs use (source index, target index) links. Starts from the
    intersection, grows along the 8-neighborhood into union links that touch
    an uncovered word, then adds union links whose both endpoints are
    uncovered (final-and). The result sits between intersection and union.
    """
    union = forward.links | backward.links
    for i, j in union:
        if not (0 <= i < n and 0 <= j < m):
            raise ValueError(f"link ({i},{j}) outside {n}x{m} sentence pair")
    aligned = set(forward.links & backward.links)
    src_covered = {i for i, _ in aligned}
    tgt_covered = {j for _, j in aligned}

    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(m):
                if (i, j) not in aligned:
                    continue
                for di, dj in _NEIGHBORS:
                    ni, nj = i + di, j + dj
                    if (ni, nj) in union and (ni, nj) not in aligned:
                        if ni not in src_covered or nj not in tgt_covered:
                            aligned.add((ni, nj))
                            src_covered.add(ni)
                            tgt_covered.add(nj)
                            changed = True
    for half in (forward.links, backward.links):
        for i, j in sorted(half):
            if (i, j) not in aligned and i not in src_covered and j not in tgt_covered:
                aligned.add((i, j))
                src_covered.add(i)
                tgt_covered.add(j)
    return WordAlignment(links=frozenset(aligned))


def words_to_span(al: WordAlignment, src_span: Span) -> Span | None:
    """Maximal target span covered by the links of the source span, if any."""
    targets = [j for i, j in al.links if src_span.start <= i <= src_span.end]
    if not targets:
        return None
    return Span(min(targets), max(targets))


def alignment_to_text(al: WordAlignment) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(al.links))


def alignment_from_text(line: str) -> WordAlignment:
    links = set()
    for part in line.split():
        i, j = part.split("-")
        links.add((int(i), int(j)))
    return WordAlignment(links=frozenset(links))


class IbmWordAligner(BaseEstimator):
    """Symmetrized IBM aligner: both directions trained, gdfa-combined.

    ``fit`` may see a larger corpus than ``predict`` (the usual trick of
    training over the concatenation of the data to be aligned and any extra
    parallel text).
    """

    def __init__(self, m1_iterations: int = 5, m2_iterations: int = 5):
        self.m1_iterations = m1_iterations
        self.m2_iterations = m2_iterations

    def fit(self, X, y=None) -> "IbmWordAligner":
        pairs = _normalize_pairs(X)
        if not pairs:
            raise EmptyDataset("empty corpus")
        flipped = [(tgt, src) for src, tgt in pairs]
        self.forward_model_ = self._train_direction(pairs)
        self.backward_model_ = self._train_direction(flipped)
        return self

    def _train_direction(self, pairs: list[Pair]) -> IbmModel:
        model = None
        if self.m1_iterations > 0:
            model = em_train(pairs, variant="m1", iterations=self.m1_iterations)
        if self.m2_iterations > 0:
            model = em_train(pairs, variant="m2", iterations=self.m2_iterations, init=model)
        if model is None:
            raise ValueError("at least one of m1_iterations, m2_iterations must be > 0")
        return model

    def predict(self, X) -> list[WordAlignment]:
        out = []
        for src, tgt in _normalize_pairs(X):
            fwd = viterbi_align(self.forward_model_, (src, tgt))
            bwd_raw = viterbi_align(self.backward_model_, (tgt, src))
            bwd = WordAlignment(links=frozenset((i, j) for j, i in bwd_raw.links))
            out.append(gdfa(fwd, bwd, len(src), len(tgt)))
        return out
