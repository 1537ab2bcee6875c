"""Command-line interface.

Subcommands: augment, train-aligner, eval-aligner, baseline-align,
train-filter, filter, eval-lu, seed-ablate. See README for file formats.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from . import aligner as aligner_mod
from . import filters as filters_mod
from . import io as pio
from . import pipeline as pipeline_mod
from . import word_align
from .constraints import InflectionLexicon
from .decoder import SubstitutionLatticeScorer
from .embeddings import FileEmbeddingProvider, HashEmbeddingProvider
from .metrics import exact_prf, lexical_unit_prf, soft_prf

log = logging.getLogger(__name__)


def default_lexicon_path() -> Path:
    return Path(resources.files("paraspan").joinpath("data/inflections.tsv"))


def _load_lexicon(args) -> InflectionLexicon:
    path = getattr(args, "lexicon", None) or default_lexicon_path()
    return InflectionLexicon.load(path)


def _add_provider_args(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--embeddings", help="binary embedding store path")
    group.add_argument("--test-embedder", action="store_true",
                       help="use the deterministic hash embedder")
    parser.add_argument("--dim", type=int, default=768,
                        help="embedding dim for the test embedder")
    parser.add_argument("--embed-seed", type=int, default=0)


def _build_provider(args):
    if args.embeddings:
        return FileEmbeddingProvider(args.embeddings)
    return HashEmbeddingProvider(dim=args.dim, seed=args.embed_seed)


def _write_report(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def cmd_augment(args) -> int:
    cfg = pio.load_pipeline_config(args.config)
    if args.workers < 1:
        raise SystemExit("--workers must be >= 1")
    seeds = pio.load_seed_corpus(args.seed)
    lexicon = _load_lexicon(args)
    provider = _build_provider(args)
    corpus_tokens = tuple(sorted({tok for s in seeds for tok in s.sentence.tokens}))
    scorer = SubstitutionLatticeScorer.from_file(
        args.synonyms, copy_prob=args.copy_prob, extra_vocabulary=corpus_tokens
    )
    model = aligner_mod.load_model(args.aligner_model)
    records, report = pipeline_mod.run(
        seeds, cfg, scorer, model, provider, lexicon, workers=args.workers
    )
    pio.dump_records(args.out, records)
    if args.report:
        _write_report(args.report, report.as_dict())
    print(f"wrote {len(records)} records to {args.out} "
          f"({report.seeds_dropped_overlength} seeds dropped, "
          f"{len(report.exhausted_chains)} chains exhausted)")
    return 0


def cmd_train_aligner(args) -> int:
    examples = pio.load_alignment_examples(args.data)
    provider = _build_provider(args)
    cfg = aligner_mod.AlignerConfig(
        k=args.k, hidden_units=args.hidden_units, threshold=args.threshold,
        learning_rate=args.learning_rate, batch_size=args.batch_size,
        epochs=args.epochs, seed=args.seed,
    )
    model = aligner_mod.train(examples, provider, cfg)
    aligner_mod.save_model(model, args.out)
    print(f"trained on {len(examples)} examples "
          f"({model.skipped_window} skipped outside window); "
          f"final epoch loss {model.epoch_losses[-1]:.6f}; saved to {args.out}")
    return 0


def cmd_eval_aligner(args) -> int:
    examples = pio.load_alignment_examples(args.data)
    provider = _build_provider(args)
    model = aligner_mod.load_model(args.model)
    preds, golds = aligner_mod.evaluate(model, provider, examples, args.threshold)
    exact = exact_prf(preds, golds)
    soft = soft_prf(preds, golds, average=args.average)
    payload = {
        "metric": "span-alignment",
        "n": len(examples),
        "threshold": args.threshold,
        "exact": exact.as_dict(),
        "soft": soft.as_dict(),
        "average": args.average,
    }
    if args.report:
        _write_report(args.report, payload)
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_baseline_align(args) -> int:
    pairs = pio.load_sentence_pairs(args.pairs)
    train_pairs = list(pairs)
    for extra in args.train_extra or []:
        train_pairs.extend(pio.load_sentence_pairs(extra))
    est = word_align.IbmWordAligner(
        m1_iterations=args.m1_iterations, m2_iterations=args.m2_iterations
    )
    est.fit(train_pairs)
    alignments = est.predict(pairs)
    with open(args.out, "w", encoding="utf-8") as fh:
        for al in alignments:
            fh.write(word_align.alignment_to_text(al) + "\n")
    if args.examples and args.report:
        examples = pio.load_alignment_examples(args.examples)
        preds = []
        for example, al in zip(examples, alignments):
            preds.append(word_align.words_to_span(al, example.source_span))
        golds = [ex.gold_span for ex in examples]
        payload = {
            "metric": "word-baseline-span-alignment",
            "n": len(examples),
            "exact": exact_prf(preds, golds).as_dict(),
            "soft": soft_prf(preds, golds).as_dict(),
        }
        _write_report(args.report, payload)
    print(f"aligned {len(pairs)} pairs -> {args.out} "
          f"(trained on {len(train_pairs)} pairs)")
    return 0


def cmd_train_filter(args) -> int:
    labeled = pio.load_labeled_features(args.data)
    cfg = filters_mod.FilterConfig(
        weight=args.weight, hidden_units=args.hidden_units,
        learning_rate=args.learning_rate, batch_size=args.batch_size,
        epochs=args.epochs, seed=args.seed,
    )
    net = filters_mod.train_filter(labeled, args.mode, cfg)
    filters_mod.save_filter(net, args.out)
    print(f"trained {args.mode.upper()}-classifier on {len(labeled)} judgments -> {args.out}")
    return 0


def cmd_filter(args) -> int:
    records = pio.load_records(args.records)
    net = filters_mod.load_filter(args.net)
    if net.mode != args.mode:
        log.warning("net was trained in %s mode but --mode %s given", net.mode, args.mode)
    feats = [filters_mod.record_features(r) for r in records]
    scores = net.score_features(feats)
    kept = [r for r, s in zip(records, scores) if s >= args.threshold]
    pio.dump_records(args.out, kept)
    if args.scored_out:
        rows = []
        for record, s in zip(records, scores):
            row = pio.record_to_row(record)
            row["p_filter_score" if args.mode == "p" else "r_filter_score"] = float(s)
            rows.append(row)
        pio.write_jsonl(args.scored_out, rows)
    print(f"kept {len(kept)}/{len(records)} records at threshold {args.threshold}")
    return 0


def cmd_eval_lu(args) -> int:
    records = pio.load_records(args.records)
    gold = pio.load_gold_lexical_units(args.gold)
    lexicon = _load_lexicon(args)
    pos_by_chain: dict[str, str] = {}
    if args.seed_corpus:
        for seed in pio.load_seed_corpus(args.seed_corpus):
            pos_by_chain[seed.annotation_id] = seed.lu_pos
    system = set()
    for record in records:
        chain_id = record.record_id.rsplit(".", 1)[0]
        pos = pos_by_chain.get(chain_id, args.pos_default)
        system.add((record.frame_id, pipeline_mod.normalized_trigger(record, lexicon, pos)))
    if args.include_seeds and args.seed_corpus:
        for seed in pio.load_seed_corpus(args.seed_corpus):
            system.add((seed.frame_id, seed.lu_lemma))
    prf, counts = lexical_unit_prf(system, gold)
    payload = {"metric": "lexical-units", **prf.as_dict(), "counts": counts,
               "system_size": len(system), "gold_size": len(gold)}
    if args.report:
        _write_report(args.report, payload)
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_seed_ablate(args) -> int:
    corpus = pio.load_seed_corpus(args.corpus)
    selected = pipeline_mod.seed_ablation(corpus, args.frames, args.lus, args.anns)
    pio.dump_seed_corpus(args.out, selected)
    print(f"selected {len(selected)} of {len(corpus)} annotations -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paraspan")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="run iterative augmentation over a seed corpus")
    p.add_argument("--seed", required=True, help="seed corpus JSONL")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--out", required=True, help="output records JSONL")
    p.add_argument("--synonyms", required=True, help="synonym table JSONL for the toy scorer")
    p.add_argument("--copy-prob", type=float, default=0.5)
    p.add_argument("--aligner-model", required=True)
    p.add_argument("--lexicon", help="inflection lexicon TSV (default: packaged)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", help="write the run report JSON here")
    _add_provider_args(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train-aligner", help="train the span alignment model")
    p.add_argument("--data", required=True, help="alignment examples JSONL")
    p.add_argument("--out", required=True, help="model file path")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--hidden-units", type=int, default=770)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    _add_provider_args(p)
    p.set_defaults(func=cmd_train_aligner)

    p = sub.add_parser("eval-aligner", help="score the aligner on labeled examples")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--average", choices=["micro", "macro"], default="micro")
    p.add_argument("--report")
    _add_provider_args(p)
    p.set_defaults(func=cmd_eval_aligner)

    p = sub.add_parser("baseline-align", help="IBM-2 + gdfa word alignment baseline")
    p.add_argument("--pairs", required=True, help="sentence pairs JSONL to align")
    p.add_argument("--out", required=True, help="output alignments (i-j text format)")
    p.add_argument("--train-extra", action="append",
                   help="extra pair JSONL concatenated into EM training; repeatable")
    p.add_argument("--m1-iterations", type=int, default=5)
    p.add_argument("--m2-iterations", type=int, default=5)
    p.add_argument("--examples", help="alignment examples JSONL for span conversion scoring")
    p.add_argument("--report", help="span P/R/F1 report path (with --examples)")
    p.set_defaults(func=cmd_baseline_align)

    p = sub.add_parser("train-filter", help="train a P- or R-filter classifier")
    p.add_argument("--data", required=True, help="labeled judgments JSONL")
    p.add_argument("--mode", choices=["p", "r"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--weight", type=float, default=0.3)
    p.add_argument("--hidden-units", type=int, default=10)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_filter)

    p = sub.add_parser("filter", help="apply a trained filter classifier to records")
    p.add_argument("--records", required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--mode", choices=["p", "r"], required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.add_argument("--scored-out", help="also write all records with scores attached")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("eval-lu", help="lexical-unit precision/recall vs a gold inventory")
    p.add_argument("--records", required=True)
    p.add_argument("--gold", required=True, help="gold (frame, lemma) JSONL")
    p.add_argument("--seed-corpus", help="seed JSONL, for POS lookup and --include-seeds")
    p.add_argument("--include-seeds", action="store_true",
                   help="count seed lexical units as system output")
    p.add_argument("--pos-default", default="v")
    p.add_argument("--lexicon")
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval_lu)

    p = sub.add_parser("seed-ablate", help="select earliest frames/LUs/annotations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--frames", type=int, default=20)
    p.add_argument("--lus", type=int, default=3)
    p.add_argument("--anns", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_seed_ablate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
