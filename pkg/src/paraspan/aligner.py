"""Discriminative span alignment.

Given a source sentence, a span in it, and a paraphrase, the aligner scores
every paraphrase-side candidate span whose length is within ``k`` of the
source span's length (all other spans implicitly get zero probability) and
returns the argmax. Candidate features concatenate the element-wise
difference and element-wise maxima of the two mean-pooled span
representations plus four positional cues (start index and length per span).

Training minimizes binary cross entropy against soft labels ``2**-d`` where
``d`` is the sum of absolute start and end offset differences from the gold
span, using plain mini-batch gradient descent with seed-controlled shuffling.
One batchnorm batch = all candidates of one example, so the train and
inference score distributions stay aligned.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .core import AlignmentExample, Span, TokenizedSentence
from .embeddings import EmbeddingMatrix, EmbeddingProvider, span_pool
from .errors import DimMismatch, EmptyDataset, WindowViolation
from .model_io import load_model_file, save_model_file
from .nn import MLP, BatchNorm, Linear, PReLU, bce_with_logits, sigmoid
from .validation import check_vector

__all__ = [
    "AlignerConfig",
    "AlignerModel",
    "FeatureVector",
    "candidates",
    "features",
    "soft_label",
    "forward",
    "train",
    "align",
    "save_model",
    "load_model",
    "SpanAligner",
]

log = logging.getLogger(__name__)

# model file blob order: W1, b1, prelu slope, gamma, beta, running mean,
# running variance, W2, b2
_PARAM_ORDER = ["0.W", "0.b", "1.a", "2.gamma", "2.beta",
                "2.running_mean", "2.running_var", "3.W", "3.b"]


@dataclass
class AlignerConfig:
    k: int = 5
    hidden_units: int = 770
    threshold: float = 0.0
    learning_rate: float = 0.1
    batch_size: int = 8
    epochs: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")


@dataclass
class AlignerModel:
    """One-hidden-layer scorer (PReLU, batchnorm, sigmoid output)."""

    mlp: MLP
    dim: int
    k: int
    config: AlignerConfig
    training: bool = False
    epoch_losses: list[float] = field(default_factory=list)
    skipped_window: int = 0

    @property
    def input_dim(self) -> int:
        return 2 * self.dim + 4

    @classmethod
    def initialize(cls, dim: int, cfg: AlignerConfig) -> "AlignerModel":
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        in_dim = 2 * dim + 4
        mlp = MLP([
            Linear(in_dim, cfg.hidden_units, rng),
            PReLU(cfg.hidden_units),
            BatchNorm(cfg.hidden_units),
            Linear(cfg.hidden_units, 1, rng),
        ])
        return cls(mlp=mlp, dim=dim, k=cfg.k, config=cfg, training=True)


@dataclass(frozen=True)
class FeatureVector:
    """Difference / maxima / positional-cue aggregate for one span pair."""

    df: np.ndarray
    mx: np.ndarray
    cue: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.df, self.mx, self.cue])


def candidates(ref_len: int, src_span_len: int, k: int) -> list[Span]:
    """All reference spans whose length is within ``k`` of the source span's."""
    if ref_len < 1 or src_span_len < 1 or k < 0:
        raise ValueError("ref_len and src_span_len must be >= 1, k >= 0")
    out = []
    for i in range(ref_len):
        for j in range(i, ref_len):
            if abs((j - i + 1) - src_span_len) <= k:
                out.append(Span(i, j))
    return out


def soft_label(gold: Span, cand: Span) -> float:
    """2**-d with d = |start difference| + |end difference|; 1 iff equal."""
    d = abs(gold.start - cand.start) + abs(gold.end - cand.end)
    return 2.0 ** (-d)


def features(s_rep, c_rep, src_span: Span, cand_span: Span) -> FeatureVector:
    s = np.asarray(s_rep, dtype=np.float64).reshape(-1)
    c = check_vector(c_rep, s.shape[0], "candidate representation")
    cue = np.array(
        [src_span.start, len(src_span), cand_span.start, len(cand_span)], dtype=np.float64
    )
    return FeatureVector(df=s - c, mx=np.maximum(s, c), cue=cue)


def _candidate_feature_matrix(
    matrix: EmbeddingMatrix, src_span: Span, cands: list[Span]
) -> np.ndarray:
    """Feature rows for all candidates, via prefix sums over reference rows."""
    s_rep = span_pool(matrix, src_span, "source")
    base = matrix.side_base("reference")
    ref_rows = matrix.vectors[base : base + matrix.m]
    prefix = np.vstack([np.zeros((1, matrix.dim)), np.cumsum(ref_rows, axis=0)])
    starts = np.array([c.start for c in cands])
    ends = np.array([c.end for c in cands])
    lengths = (ends - starts + 1).astype(np.float64)
    c_reps = (prefix[ends + 1] - prefix[starts]) / lengths[:, None]
    cues = np.column_stack([
        np.full(len(cands), src_span.start, dtype=np.float64),
        np.full(len(cands), len(src_span), dtype=np.float64),
        starts.astype(np.float64),
        lengths,
    ])
    return np.hstack([s_rep[None, :] - c_reps, np.maximum(s_rep[None, :], c_reps), cues])


def forward(model: AlignerModel, v) -> float:
    """Score a single feature vector; batch statistics only in train mode."""
    if isinstance(v, FeatureVector):
        v = v.as_array()
    v = check_vector(v, model.input_dim, "feature vector")
    logits = model.mlp.forward(v[None, :], training=model.training)
    return float(sigmoid(logits)[0, 0])


def _prepare_example(
    example: AlignmentExample, provider: EmbeddingProvider, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """(features, soft labels) over the candidate window of one example."""
    if example.gold_span is None:
        raise ValueError("training examples must carry a gold span")
    if abs(len(example.gold_span) - len(example.source_span)) > k:
        raise WindowViolation(
            f"gold span length {len(example.gold_span)} outside k={k} window of "
            f"source span length {len(example.source_span)}"
        )
    matrix = provider.embed_pair(example.source, example.reference)
    cands = candidates(len(example.reference), len(example.source_span), k)
    X = _candidate_feature_matrix(matrix, example.source_span, cands)
    y = np.array([soft_label(example.gold_span, c) for c in cands])
    return X, y


def train(
    data: list[AlignmentExample], provider: EmbeddingProvider, cfg: AlignerConfig
) -> AlignerModel:
    """Soft-BCE training; deterministic given ``cfg.seed``.

    Examples without a gold span are excluded; examples whose gold span falls
    outside the candidate window are reported and skipped.
    """
    usable: list[tuple[np.ndarray, np.ndarray]] = []
    skipped_window = 0
    for example in data:
        if example.gold_span is None:
            continue
        try:
            usable.append(_prepare_example(example, provider, cfg.k))
        except WindowViolation as exc:
            skipped_window += 1
            log.warning("skipping example: %s", exc)
    if not usable:
        raise EmptyDataset("no trainable examples (all missing gold spans or skipped)")

    model = AlignerModel.initialize(provider.dim, cfg)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    order = np.arange(len(usable))
    losses = []
    for _ in range(cfg.epochs):
        rng.shuffle(order)
        epoch_loss = 0.0
        for group_start in range(0, len(order), cfg.batch_size):
            group = order[group_start : group_start + cfg.batch_size]
            model.mlp.zero_grads()
            for idx in group:
                X, y = usable[idx]
                logits = model.mlp.forward(X, training=True)
                loss, dlogits, _ = bce_with_logits(logits, y)
                model.mlp.backward(dlogits)
                epoch_loss += loss
            model.mlp.sgd_step(cfg.learning_rate / len(group))
        losses.append(epoch_loss / len(order))
    model.training = False
    model.epoch_losses = losses
    model.skipped_window = skipped_window
    return model


def evaluate(
    model: AlignerModel,
    provider: EmbeddingProvider,
    data: list[AlignmentExample],
    threshold: float = 0.0,
) -> tuple[list[Span | None], list[Span | None]]:
    """(predictions, golds) over a labeled set, ready for the span metrics."""
    preds = []
    for ex in data:
        hit = align(model, provider, ex.source, ex.reference, ex.source_span, threshold)
        preds.append(hit[0] if hit is not None else None)
    return preds, [ex.gold_span for ex in data]


def align(
    model: AlignerModel,
    provider: EmbeddingProvider,
    source: TokenizedSentence,
    reference: TokenizedSentence,
    src_span: Span,
    threshold: float = 0.0,
) -> tuple[Span, float] | None:
    """Argmax candidate span with its score, or None when below ``threshold``.

    Ties break toward the lexicographically smallest (start, end).
    """
    if provider.dim != model.dim:
        raise DimMismatch(f"provider dim {provider.dim} != model dim {model.dim}")
    matrix = provider.embed_pair(source, reference)
    cands = candidates(len(reference), len(src_span), model.k)
    X = _candidate_feature_matrix(matrix, src_span, cands)
    logits = model.mlp.forward(X, training=False)
    scores = sigmoid(logits).reshape(-1)
    best = int(np.argmax(scores))  # first maximum = lexicographically smallest span
    best_score = float(scores[best])
    if best_score < threshold:
        return None
    return cands[best], best_score


def save_model(model: AlignerModel, path):
    header = {
        "kind": "span-aligner",
        "format_version": 1,
        "dim": model.dim,
        "input_dim": model.input_dim,
        "hidden_units": model.config.hidden_units,
        "k": model.k,
        "threshold": model.config.threshold,
        "learning_rate": model.config.learning_rate,
        "batch_size": model.config.batch_size,
        "epochs": model.config.epochs,
        "seed": model.config.seed,
        "param_order": _PARAM_ORDER,
    }
    save_model_file(path, header, model.mlp.serialize_arrays(_PARAM_ORDER))


def load_model(path) -> AlignerModel:
    header, arrays = load_model_file(path)
    if header.get("kind") != "span-aligner":
        raise ValueError(f"{path}: not a span-aligner model file")
    cfg = AlignerConfig(
        k=header["k"],
        hidden_units=header["hidden_units"],
        threshold=header["threshold"],
        learning_rate=header["learning_rate"],
        batch_size=header["batch_size"],
        epochs=header["epochs"],
        seed=header["seed"],
    )
    model = AlignerModel.initialize(header["dim"], cfg)
    model.mlp.load_arrays(header["param_order"], arrays)
    model.training = False
    return model


class SpanAligner(BaseEstimator):
    """sklearn-style wrapper: fit on alignment examples, predict spans.

    Parameters mirror :class:`AlignerConfig`; ``provider`` supplies the pair
    embeddings and fixes the feature dimensionality.
    """

    def __init__(
        self,
        provider: EmbeddingProvider | None = None,
        k: int = 5,
        hidden_units: int = 770,
        threshold: float = 0.0,
        learning_rate: float = 0.1,
        batch_size: int = 8,
        epochs: int = 15,
        seed: int = 0,
    ):
        self.provider = provider
        self.k = k
        self.hidden_units = hidden_units
        self.threshold = threshold
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed

    def _config(self) -> AlignerConfig:
        return AlignerConfig(
            k=self.k,
            hidden_units=self.hidden_units,
            threshold=self.threshold,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
        )

    def fit(self, X: list[AlignmentExample], y=None) -> "SpanAligner":
        if self.provider is None:
            raise ValueError("SpanAligner requires an embedding provider")
        self.model_ = train(list(X), self.provider, self._config())
        self.epoch_losses_ = self.model_.epoch_losses
        self.skipped_window_ = self.model_.skipped_window
        return self

    def predict_scored(self, X: list[AlignmentExample]) -> list[tuple[Span, float] | None]:
        return [
            align(self.model_, self.provider, ex.source, ex.reference,
                  ex.source_span, self.threshold)
            for ex in X
        ]

    def predict(self, X: list[AlignmentExample]) -> list[Span | None]:
        return [hit[0] if hit is not None else None for hit in self.predict_scored(X)]

    def align(
        self, source: TokenizedSentence, reference: TokenizedSentence, src_span: Span
    ) -> tuple[Span, float] | None:
        return align(self.model_, self.provider, source, reference, src_span, self.threshold)

    def save(self, path):
        save_model(self.model_, path)

    @classmethod
    def from_file(cls, path, provider: EmbeddingProvider) -> "SpanAligner":
        model = load_model(path)
        est = cls(
            provider=provider,
            k=model.k,
            hidden_units=model.config.hidden_units,
            threshold=model.config.threshold,
            learning_rate=model.config.learning_rate,
            batch_size=model.config.batch_size,
            epochs=model.config.epochs,
            seed=model.config.seed,
        )
        est.model_ = model
        return est
