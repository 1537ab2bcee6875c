"""Record filtering: heuristic rules and trained gatekeeper classifiers.

A rule is a conjunction of up to three atoms over a record's provenance
features: iteration <= n, decoder score <= x, aligner score >= y. Reports give
the manually-judged precision of the kept subset, recall of acceptable
records, and the size multiple of the resulting resource (seed corpus plus
kept outputs) relative to the seed corpus.

The trained filters are 3-input nets (two hidden layers of 10 units, PReLU,
sigmoid output) over (iteration, decoder score, aligner score), minimizing
class-weighted BCE: P-mode downweights label-1 loss so keeping is expensive;
R-mode downweights label-0 loss so dropping is expensive. Inputs are z-scored
with statistics stored in the model file.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .core import AugmentationRecord
from .errors import DegenerateLabels, MissingLabels
from .model_io import load_model_file, save_model_file
from .nn import MLP, Linear, PReLU, bce_with_logits, sigmoid
from .validation import check_binary_labels, check_feature_array

__all__ = [
    "FilterRule",
    "FilterReport",
    "FilterConfig",
    "FilterNet",
    "apply_rule",
    "train_filter",
    "score",
    "record_features",
    "attach_filter_scores",
    "aggregate_judgments",
    "save_filter",
    "load_filter",
    "FilterClassifier",
]

_FILTER_PARAM_ORDER = ["0.W", "0.b", "1.a", "2.W", "2.b", "3.a", "4.W", "4.b"]


@dataclass(frozen=True)
class FilterRule:
    """Conjunction of optional atoms; unset atoms always pass."""

    max_iteration: int | None = None
    max_decoder_score: float | None = None
    min_aligner_score: float | None = None

    def __call__(self, record: AugmentationRecord) -> bool:
        if self.max_iteration is not None and record.iteration > self.max_iteration:
            return False
        if self.max_decoder_score is not None and record.decoder_score > self.max_decoder_score:
            return False
        if self.min_aligner_score is not None and record.aligner_score < self.min_aligner_score:
            return False
        return True


@dataclass(frozen=True)
class FilterReport:
    precision: float
    recall: float
    multiple: float
    kept: int
    acceptable_kept: int
    acceptable_total: int
    seed_size: int

    def as_dict(self) -> dict:
        return {
            "P": self.precision,
            "R": self.recall,
            "multiple": self.multiple,
            "kept": self.kept,
            "acceptable_kept": self.acceptable_kept,
            "acceptable_total": self.acceptable_total,
            "seed_size": self.seed_size,
        }


def apply_rule(
    rule: FilterRule,
    records: list[AugmentationRecord],
    labels: dict[str, int] | None = None,
    seed_size: int | None = None,
) -> tuple[list[AugmentationRecord], FilterReport | None]:
    """Subset of records satisfying the rule, plus a P/R/multiple report.

    ``labels`` maps record_id to a 0/1 acceptability judgment; without it the
    report is None. ``seed_size`` defaults to the number of iteration-1
    records (one per chain). The multiple counts the seed corpus itself:
    (seed + kept) / seed.
    """
    subset = [r for r in records if rule(r)]
    if labels is None:
        return subset, None
    missing = [r.record_id for r in records if r.record_id not in labels]
    if missing:
        raise MissingLabels(f"{len(missing)} records lack acceptability labels")
    if seed_size is None:
        seed_size = sum(1 for r in records if r.iteration == 1)
    if seed_size < 1:
        raise ValueError("seed_size must be >= 1 for reporting")
    acceptable_kept = sum(labels[r.record_id] for r in subset)
    acceptable_total = sum(labels[r.record_id] for r in records)
    report = FilterReport(
        precision=acceptable_kept / len(subset) if subset else 0.0,
        recall=acceptable_kept / acceptable_total if acceptable_total else 0.0,
        multiple=(seed_size + len(subset)) / seed_size,
        kept=len(subset),
        acceptable_kept=acceptable_kept,
        acceptable_total=acceptable_total,
        seed_size=seed_size,
    )
    return subset, report


@dataclass
class FilterConfig:
    weight: float = 0.3
    hidden_units: int = 10
    learning_rate: float = 0.1
    batch_size: int = 32
    epochs: int = 200
    seed: int = 0


@dataclass
class FilterNet:
    """Standardizer plus the small feedforward scorer."""

    mlp: MLP
    feature_mean: np.ndarray
    feature_std: np.ndarray
    mode: str
    config: FilterConfig

    def score_features(self, X) -> np.ndarray:
        X = check_feature_array(X, 3)
        z = (X - self.feature_mean) / self.feature_std
        return sigmoid(self.mlp.forward(z, training=False)).reshape(-1)


def record_features(record: AugmentationRecord) -> list[float]:
    return [float(record.iteration), record.decoder_score, record.aligner_score]


def _build_mlp(hidden: int, rng: np.random.Generator) -> MLP:
    return MLP([
        Linear(3, hidden, rng),
        PReLU(hidden),
        Linear(hidden, hidden, rng),
        PReLU(hidden),
        Linear(hidden, 1, rng),
    ])


def train_filter(labeled, mode: str, cfg: FilterConfig | None = None) -> FilterNet:
    """Class-weighted BCE training; deterministic given ``cfg.seed``.

    ``labeled`` is a sequence of (features, label) with 3 features per item.
    P-mode multiplies label-1 loss by ``cfg.weight`` (< 1), R-mode label-0.
    """
    cfg = cfg or FilterConfig()
    mode = mode.lower()
    if mode not in ("p", "r"):
        raise ValueError("mode must be 'p' or 'r'")
    if not 0.0 < cfg.weight <= 1.0:
        raise ValueError("weight must be in (0, 1]")
    features = check_feature_array([row[0] for row in labeled], 3)
    y = check_binary_labels([row[1] for row in labeled])
    if len(set(y.tolist())) < 2:
        raise DegenerateLabels("training data must contain both classes")

    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std[std == 0] = 1.0
    X = (features - mean) / std
    downweighted = 1.0 if mode == "p" else 0.0
    weights = np.where(y == downweighted, cfg.weight, 1.0)

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    mlp = _build_mlp(cfg.hidden_units, rng)
    order = np.arange(len(y))
    for _ in range(cfg.epochs):
        rng.shuffle(order)
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            mlp.zero_grads()
            logits = mlp.forward(X[batch], training=True)
            _, dlogits, _ = bce_with_logits(logits, y[batch], weights[batch])
            mlp.backward(dlogits)
            mlp.sgd_step(cfg.learning_rate)
    return FilterNet(mlp=mlp, feature_mean=mean, feature_std=std, mode=mode, config=cfg)


def score(net: FilterNet, record) -> float:
    """Score one record (or raw 3-feature vector); keep-decision threshold 0.5."""
    feats = record_features(record) if isinstance(record, AugmentationRecord) else record
    return float(net.score_features([feats])[0])


def attach_filter_scores(
    records: list[AugmentationRecord], p_net: FilterNet, r_net: FilterNet
) -> list[AugmentationRecord]:
    """Attach both classifiers' scores to every record (post-hoc filtering)."""
    feats = [record_features(r) for r in records]
    p_scores = p_net.score_features(feats)
    r_scores = r_net.score_features(feats)
    return [
        r.with_filter_scores(float(p), float(rr))
        for r, p, rr in zip(records, p_scores, r_scores)
    ]


def aggregate_judgments(values) -> int:
    """Mean a group of 0-100 judgments; below 50 is a rejection."""
    vals = list(values)
    return 1 if sum(vals) / len(vals) >= 50 else 0


def save_filter(net: FilterNet, path):
    header = {
        "kind": "filter-net",
        "format_version": 1,
        "mode": net.mode,
        "hidden_units": net.config.hidden_units,
        "weight": net.config.weight,
        "learning_rate": net.config.learning_rate,
        "batch_size": net.config.batch_size,
        "epochs": net.config.epochs,
        "seed": net.config.seed,
        "param_order": _FILTER_PARAM_ORDER,
    }
    arrays = [net.feature_mean, net.feature_std]
    arrays += net.mlp.serialize_arrays(_FILTER_PARAM_ORDER)
    header["extra_arrays"] = ["feature_mean", "feature_std"]
    save_model_file(path, header, arrays)


def load_filter(path) -> FilterNet:
    header, arrays = load_model_file(path)
    if header.get("kind") != "filter-net":
        raise ValueError(f"{path}: not a filter-net model file")
    cfg = FilterConfig(
        weight=header["weight"],
        hidden_units=header["hidden_units"],
        learning_rate=header["learning_rate"],
        batch_size=header["batch_size"],
        epochs=header["epochs"],
        seed=header["seed"],
    )
    mean, std = arrays[0], arrays[1]
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    mlp = _build_mlp(cfg.hidden_units, rng)
    mlp.load_arrays(header["param_order"], arrays[2:])
    return FilterNet(mlp=mlp, feature_mean=mean, feature_std=std,
                     mode=header["mode"], config=cfg)


class FilterClassifier(BaseEstimator):
    """sklearn-style wrapper over :func:`train_filter` / :func:`score`."""

    def __init__(
        self,
        mode: str = "p",
        weight: float = 0.3,
        hidden_units: int = 10,
        learning_rate: float = 0.1,
        batch_size: int = 32,
        epochs: int = 200,
        seed: int = 0,
    ):
        self.mode = mode
        self.weight = weight
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y) -> "FilterClassifier":
        cfg = FilterConfig(
            weight=self.weight,
            hidden_units=self.hidden_units,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
        )
        labeled = list(zip(np.asarray(X, dtype=np.float64).tolist(), y))
        self.net_ = train_filter(labeled, self.mode, cfg)
        return self

    def predict_proba(self, X) -> np.ndarray:
        keep = self.net_.score_features(X)
        return np.column_stack([1.0 - keep, keep])

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.net_.score_features(X) >= threshold).astype(int)
