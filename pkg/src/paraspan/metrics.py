"""Span alignment scoring: exact-match and overlap (soft) P/R/F1, plus
lexical-unit precision/recall against a gold inventory.

Abstentions (predicting no span) incur a false negative without a false
positive, so precision and recall can differ. Soft matching is micro-averaged
over token overlap mass by default; an exact match earns full credit.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Span
from .validation import check_same_length

__all__ = ["PRF", "exact_prf", "soft_prf", "lexical_unit_prf"]


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: float, fp: float, fn: float) -> "PRF":
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(precision=p, recall=r, f1=f1)

    def as_dict(self) -> dict:
        return {"P": self.precision, "R": self.recall, "F1": self.f1}


def exact_prf(preds: list[Span | None], golds: list[Span | None]) -> PRF:
    """Credit only when the predicted span equals the gold span exactly."""
    check_same_length(preds, golds, "predictions and golds")
    tp = fp = fn = 0
    for pred, gold in zip(preds, golds):
        if pred is not None and gold is not None and pred == gold:
            tp += 1
        else:
            if pred is not None:
                fp += 1
            if gold is not None:
                fn += 1
    return PRF.from_counts(tp, fp, fn)


def _overlap_counts(pred: Span | None, gold: Span | None) -> tuple[int, int, int]:
    pred_tokens = set(range(pred.start, pred.end + 1)) if pred is not None else set()
    gold_tokens = set(range(gold.start, gold.end + 1)) if gold is not None else set()
    inter = len(pred_tokens & gold_tokens)
    return inter, len(pred_tokens) - inter, len(gold_tokens) - inter


def soft_prf(
    preds: list[Span | None], golds: list[Span | None], average: str = "micro"
) -> PRF:
    """Token-overlap P/R/F1; ``micro`` pools token mass, ``macro`` averages pairs.

    Macro averaging skips pairs where both sides abstain (nothing to score).
    """
    check_same_length(preds, golds, "predictions and golds")
    if average == "micro":
        tp = fp = fn = 0
        for pred, gold in zip(preds, golds):
            inter, extra, missed = _overlap_counts(pred, gold)
            tp += inter
            fp += extra
            fn += missed
        return PRF.from_counts(tp, fp, fn)
    if average == "macro":
        scored = []
        for pred, gold in zip(preds, golds):
            if pred is None and gold is None:
                continue
            scored.append(PRF.from_counts(*_overlap_counts(pred, gold)))
        if not scored:
            return PRF(0.0, 0.0, 0.0)
        n = len(scored)
        return PRF(
            precision=sum(s.precision for s in scored) / n,
            recall=sum(s.recall for s in scored) / n,
            f1=sum(s.f1 for s in scored) / n,
        )
    raise ValueError(f"average must be 'micro' or 'macro', got {average!r}")


def lexical_unit_prf(
    system: set[tuple[str, str]], gold: set[tuple[str, str]]
) -> tuple[PRF, dict[str, int]]:
    """Set precision/recall over (frame, lemma) pairs, with raw counts."""
    tp = len(system & gold)
    fp = len(system - gold)
    fn = len(gold - system)
    return PRF.from_counts(tp, fp, fn), {"TP": tp, "FP": fp, "FN": fn}
