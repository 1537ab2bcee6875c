"""JSONL and config file schemas shared by the CLI and the library.

Seed corpus rows: {"sentence", "tokens", "frame", "lexical_unit",
"trigger": [start, end], "created_order"}. Alignment example rows:
{"source", "reference", "source_span": [s, e], "gold_span": [s, e] | null}.
Record rows serialize every AugmentationRecord field, with the paraphrase as
both raw text and tokens. Spans are inclusive token index pairs throughout.
"""
from __future__ import annotations

import json
from pathlib import Path

from .core import AlignmentExample, AugmentationRecord, FrameAnnotation, Span, TokenizedSentence
from .pipeline import PipelineConfig

__all__ = [
    "read_jsonl",
    "write_jsonl",
    "load_seed_corpus",
    "load_alignment_examples",
    "load_records",
    "dump_records",
    "load_labels",
    "load_labeled_features",
    "load_pipeline_config",
    "load_sentence_pairs",
    "load_gold_lexical_units",
]


def read_jsonl(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def _sentence_from_row(row: dict, text_key: str, tokens_key: str | None = None) -> TokenizedSentence:
    if tokens_key and tokens_key in row:
        return TokenizedSentence.from_tokens(row[tokens_key])
    value = row[text_key]
    if isinstance(value, list):
        return TokenizedSentence.from_tokens(value)
    return TokenizedSentence.from_tokens(value.split())


def load_seed_corpus(path) -> list[FrameAnnotation]:
    seeds = []
    for i, row in enumerate(read_jsonl(path)):
        sentence = _sentence_from_row(row, "sentence", "tokens")
        start, end = row["trigger"]
        seeds.append(
            FrameAnnotation(
                annotation_id=row.get("annotation_id", f"seed-{i:05d}"),
                frame_id=row["frame"],
                lexical_unit=row["lexical_unit"],
                trigger=Span(start, end),
                sentence=sentence,
                created_order=row.get("created_order"),
            )
        )
    return seeds


def dump_seed_corpus(path, seeds: list[FrameAnnotation]):
    rows = []
    for seed in seeds:
        rows.append(
            {
                "annotation_id": seed.annotation_id,
                "sentence": seed.sentence.raw_text,
                "tokens": list(seed.sentence.tokens),
                "frame": seed.frame_id,
                "lexical_unit": seed.lexical_unit,
                "trigger": [seed.trigger.start, seed.trigger.end],
                "created_order": seed.created_order,
            }
        )
    write_jsonl(path, rows)


def load_alignment_examples(path) -> list[AlignmentExample]:
    examples = []
    for row in read_jsonl(path):
        gold = row.get("gold_span")
        examples.append(
            AlignmentExample(
                source=_sentence_from_row(row, "source"),
                source_span=Span(*row["source_span"]),
                reference=_sentence_from_row(row, "reference"),
                gold_span=Span(*gold) if gold is not None else None,
            )
        )
    return examples


def record_to_row(record: AugmentationRecord) -> dict:
    return {
        "record_id": record.record_id,
        "parent_id": record.parent_id,
        "frame_id": record.frame_id,
        "iteration": record.iteration,
        "paraphrase": record.paraphrase.raw_text,
        "tokens": list(record.paraphrase.tokens),
        "trigger": [record.trigger.start, record.trigger.end],
        "decoder_score": record.decoder_score,
        "aligner_score": record.aligner_score,
        "p_filter_score": record.p_filter_score,
        "r_filter_score": record.r_filter_score,
    }


def record_from_row(row: dict) -> AugmentationRecord:
    return AugmentationRecord(
        record_id=row["record_id"],
        parent_id=row["parent_id"],
        frame_id=row["frame_id"],
        iteration=row["iteration"],
        paraphrase=_sentence_from_row(row, "paraphrase", "tokens"),
        trigger=Span(*row["trigger"]),
        decoder_score=row["decoder_score"],
        aligner_score=row["aligner_score"],
        p_filter_score=row.get("p_filter_score"),
        r_filter_score=row.get("r_filter_score"),
    )


def load_records(path) -> list[AugmentationRecord]:
    return [record_from_row(row) for row in read_jsonl(path)]


def dump_records(path, records: list[AugmentationRecord]):
    write_jsonl(path, [record_to_row(r) for r in records])


def load_labels(path) -> dict[str, int]:
    """Judgment rows {record_id, label} (features optional) to an id->0/1 map."""
    return {row["record_id"]: int(row["label"]) for row in read_jsonl(path)}


def load_labeled_features(path) -> list[tuple[list[float], int]]:
    """Filter-training rows {record_id, features: [iter, dec, align], label}."""
    return [([float(v) for v in row["features"]], int(row["label"])) for row in read_jsonl(path)]


def load_pipeline_config(path) -> PipelineConfig:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return PipelineConfig(**data)


def load_sentence_pairs(path) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Rows {"source", "reference"} (raw text or token lists) to token pairs."""
    pairs = []
    for row in read_jsonl(path):
        src = _sentence_from_row(row, "source")
        ref = _sentence_from_row(row, "reference")
        pairs.append((src.tokens, ref.tokens))
    return pairs


def load_gold_lexical_units(path) -> set[tuple[str, str]]:
    """Rows {"frame", "lemma"} to a set of (frame, lemma) pairs."""
    return {(row["frame"], row["lemma"]) for row in read_jsonl(path)}
