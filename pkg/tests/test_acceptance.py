"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here.
"""
import copy
import json
import shutil
import subprocess
import time
from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

from oracles import RandomScorer, exhaustive_best
from paraspan.aligner import AlignerConfig, AlignerModel, align, evaluate, soft_label, train
from paraspan.constraints import ConstraintSet
from paraspan.core import Span, TokenizedSentence, whitespace_tokenize
from paraspan.decoder import decode
from paraspan.embeddings import FileEmbeddingProvider, HashEmbeddingProvider, span_pool
from paraspan.errors import NoFeasibleOutput
from paraspan.filters import FilterConfig, FilterRule, apply_rule, train_filter
from paraspan.io import dump_records
from paraspan.metrics import exact_prf, lexical_unit_prf, soft_prf
from paraspan.nn import bce_with_logits
from paraspan.pipeline import PipelineConfig, run
from paraspan.word_align import WordAlignment, em_train, gdfa, viterbi_align
from synth import make_splice_corpus
from test_filters import labeled_corpus_fixture
from test_metrics import naive_exact, naive_soft, prf_from
from test_word_align import COPY_CORPUS, random_links, reference_gdfa
from toyworld import build_toy_world


def report(name: str):
    print(f"\n[ACCEPTANCE] {name}: PASS")


def test_constraint_soundness():
    """1,000 random (scorer, constraints, sentence) configs; zero banned outputs."""
    started = time.monotonic()
    rng = np.random.default_rng(0)
    source = whitespace_tokenize("x")
    checked = 0
    for trial in range(1000):
        vocab_size = int(rng.integers(4, 7))
        scorer = RandomScorer(vocab_size=vocab_size, seed=trial)
        surface = [t for t in scorer.vocabulary if t != "</s>"]
        phrases = set()
        for _ in range(int(rng.integers(0, 5))):
            length = int(rng.integers(1, 4))
            phrases.add(tuple(surface[int(rng.integers(len(surface)))]
                              for _ in range(length)))
        constraints = ConstraintSet(phrases)
        try:
            hyps = decode(source, constraints, beam_size=4, max_len=5, scorer=scorer)
        except NoFeasibleOutput:
            continue
        for hyp in hyps:
            assert not constraints.contains_banned(hyp.tokens), (trial, hyp.tokens)
            checked += 1
    elapsed = time.monotonic() - started
    assert checked > 1000
    assert elapsed < 60, f"took {elapsed:.1f}s"
    report(f"constraint soundness (1000 configs, {checked} outputs, {elapsed:.1f}s)")


def test_beam_oracle_equivalence():
    """Beam covering the search space equals exhaustive constrained argmax."""
    started = time.monotonic()
    rng = np.random.default_rng(1)
    source = whitespace_tokenize("x")
    max_len = 4
    for trial in range(200):
        scorer = RandomScorer(vocab_size=5, seed=10_000 + trial)
        surface = [t for t in scorer.vocabulary if t != "</s>"]
        phrases = set()
        for _ in range(int(rng.integers(0, 3))):
            length = int(rng.integers(1, 3))
            phrases.add(tuple(surface[int(rng.integers(len(surface)))]
                              for _ in range(length)))
        constraints = ConstraintSet(phrases)
        want = exhaustive_best(scorer, source, constraints, max_len)
        try:
            got = decode(source, constraints, beam_size=400, max_len=max_len,
                         scorer=scorer)[0]
        except NoFeasibleOutput:
            assert want is None
            continue
        assert want is not None
        assert got.tokens == want[0], trial
        assert got.logprob_sum == pytest.approx(want[1], rel=1e-12)
    elapsed = time.monotonic() - started
    assert elapsed < 30, f"took {elapsed:.1f}s"
    report(f"beam-oracle equivalence (200 scorers, {elapsed:.1f}s)")


def test_soft_label_exactness():
    """soft_label reproduces 2^-d exactly for exhaustive spans, length <= 8."""
    for length in range(1, 9):
        spans = [Span(i, j) for i in range(length) for j in range(i, length)]
        for gold in spans:
            for cand in spans:
                d = abs(gold.start - cand.start) + abs(gold.end - cand.end)
                assert soft_label(gold, cand) == 2.0 ** -d  # exact dyadic
    report("soft-label exactness (2^-d, exhaustive spans, zero tolerance)")


def _finite_difference_sweep(mlp, loss_of, n_params_checked):
    eps = 1e-5
    logitsless_loss = loss_of(mlp)
    assert np.isfinite(logitsless_loss)
    mlp.zero_grads()
    loss_of(mlp, backward=True)
    analytic = {name: g.copy() for name, g in mlp.named_grads()}
    for name, param in mlp.named_params():
        flat = param.reshape(-1)
        for idx in range(flat.shape[0]):
            probe = copy.deepcopy(mlp)
            pflat = dict(probe.named_params())[name].reshape(-1)
            pflat[idx] += eps
            up = loss_of(probe)
            pflat[idx] -= 2 * eps
            down = loss_of(probe)
            fd = (up - down) / (2 * eps)
            an = analytic[name].reshape(-1)[idx]
            denom = max(abs(fd), abs(an), 1e-8)
            assert abs(fd - an) / denom < 1e-3, f"{name}[{idx}]: fd={fd} an={an}"
            n_params_checked[0] += 1


def test_gradient_fidelity():
    """Aligner MLP and filter nets vs central differences, 20 random points each."""
    checked = [0]
    for point in range(20):
        rng = np.random.default_rng(100 + point)
        model = AlignerModel.initialize(4, AlignerConfig(hidden_units=6, seed=point))
        X = rng.normal(size=(6, model.input_dim))
        y = rng.uniform(size=6)

        def aligner_loss(mlp, backward=False):
            logits = mlp.forward(X, training=True)
            loss, dlogits, _ = bce_with_logits(logits, y)
            if backward:
                mlp.backward(dlogits)
            return loss

        _finite_difference_sweep(model.mlp, aligner_loss, checked)

    from paraspan.filters import _build_mlp

    for point in range(20):
        rng = np.random.default_rng(200 + point)
        mlp = _build_mlp(4, np.random.Generator(np.random.PCG64(point)))
        X = rng.normal(size=(8, 3))
        y = (rng.uniform(size=8) > 0.5).astype(float)
        w = np.where(y == 1.0, 0.3, 1.0)

        def filter_loss(m, backward=False):
            logits = m.forward(X, training=True)
            loss, dlogits, _ = bce_with_logits(logits, y, w)
            if backward:
                m.backward(dlogits)
            return loss

        _finite_difference_sweep(mlp, filter_loss, checked)
    report(f"gradient fidelity ({checked[0]} parameter coordinates, rel err < 1e-3)")


@pytest.fixture(scope="module")
def recovery_run():
    """Synthetic aligner recovery: 2,000 train pairs, 200 held out, seed 0."""
    started = time.monotonic()
    corpus = make_splice_corpus(2200, seed=0)
    provider = HashEmbeddingProvider(dim=32, seed=0)
    cfg = AlignerConfig(k=5, hidden_units=48, learning_rate=0.3, batch_size=8,
                        epochs=5, seed=0)
    model = train(corpus[:2000], provider, cfg)
    preds, golds = evaluate(model, provider, corpus[2000:2200])
    elapsed = time.monotonic() - started
    return preds, golds, elapsed


def test_synthetic_aligner_recovery(recovery_run):
    preds, golds, elapsed = recovery_run
    prf = exact_prf(preds, golds)
    assert prf.f1 >= 0.95, f"exact F1 {prf.f1:.4f}"
    assert elapsed < 600, f"took {elapsed:.1f}s"
    report(f"synthetic aligner recovery (exact F1 {prf.f1:.3f}, {elapsed:.1f}s)")


def test_metric_sanity(recovery_run):
    """Recount oracles on 1,000 random instances; soft >= exact on real runs;
    abstention incurs FN without FP."""
    rng = np.random.default_rng(7)

    def random_span_or_none(p_none=0.15):
        if rng.uniform() < p_none:
            return None
        a, b = sorted(rng.integers(0, 10, size=2).tolist())
        return Span(int(a), int(b))

    for _ in range(1000):
        n = int(rng.integers(1, 30))
        preds = [random_span_or_none() for _ in range(n)]
        golds = [random_span_or_none() for _ in range(n)]
        got_exact = exact_prf(preds, golds)
        got_soft = soft_prf(preds, golds)
        assert (got_exact.precision, got_exact.recall, got_exact.f1) == pytest.approx(
            prf_from(*naive_exact(preds, golds))
        )
        assert (got_soft.precision, got_soft.recall, got_soft.f1) == pytest.approx(
            prf_from(*naive_soft(preds, golds))
        )

    # the suite's evaluation run: soft must not fall below exact
    preds, golds, _ = recovery_run
    assert soft_prf(preds, golds).f1 >= exact_prf(preds, golds).f1

    # abstaining where the model would have been wrong: recall unchanged,
    # precision never drops, and the abstention adds no false positive
    for trial in range(200):
        n = int(rng.integers(2, 20))
        golds = [random_span_or_none(0.1) for _ in range(n)]
        preds = [random_span_or_none(0.1) for _ in range(n)]
        gated = [
            None if (p is not None and p != g and rng.uniform() < 0.5) else p
            for p, g in zip(preds, golds)
        ]
        base, after = exact_prf(preds, golds), exact_prf(gated, golds)
        assert after.precision >= base.precision - 1e-12
        assert after.recall == pytest.approx(base.recall)
    # abstaining on a correct answer costs recall
    golds = [Span(0, 0), Span(1, 1)]
    assert exact_prf([Span(0, 0), None], golds).recall < exact_prf(
        [Span(0, 0), Span(1, 1)], golds).recall
    report("metric sanity (1000 recounts; soft >= exact on eval run; abstention FN-only)")


def test_ibm2_em_and_gdfa():
    """EM log-likelihood monotone on 100 corpora; copy-corpus identity; gdfa
    equals the independent reference exhaustively (2x2) and on 500 random 4x4."""
    rng = np.random.default_rng(5)
    vocab = [f"v{i}" for i in range(5)]
    for trial in range(100):
        corpus = []
        for _ in range(int(rng.integers(2, 6))):
            n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            corpus.append((tuple(rng.choice(vocab, n)), tuple(rng.choice(vocab, m))))
        for variant in ("m1", "m2"):
            model = em_train(corpus, variant=variant, iterations=10)
            lls = model.log_likelihoods
            assert len(lls) == 10
            for a, b in zip(lls, lls[1:]):
                assert b >= a - 1e-9, (trial, variant)

    m1 = em_train(COPY_CORPUS, variant="m1", iterations=5)
    model = em_train(COPY_CORPUS, variant="m2", iterations=5, init=m1)
    for pair in COPY_CORPUS:
        assert viterbi_align(model, pair).links == {(i, i) for i in range(len(pair[0]))}

    cells = [(i, j) for i in range(2) for j in range(2)]
    subsets = [frozenset(c for b, c in enumerate(cells) if mask >> b & 1)
               for mask in range(16)]
    for fwd in subsets:
        for bwd in subsets:
            got = gdfa(WordAlignment(fwd), WordAlignment(bwd), 2, 2).links
            assert got == reference_gdfa(fwd, bwd, 2, 2)
    for _ in range(500):
        fwd, bwd = random_links(rng, 4, 4), random_links(rng, 4, 4)
        got = gdfa(WordAlignment(fwd), WordAlignment(bwd), 4, 4).links
        assert got == reference_gdfa(fwd, bwd, 4, 4)
    report("IBM-2 EM monotonicity, copy-corpus identity, gdfa reference equality")


def test_filter_report_arithmetic():
    records, labels = labeled_corpus_fixture()
    _, unfiltered = apply_rule(FilterRule(), records, labels, seed_size=171)
    assert unfiltered.precision * 100 == pytest.approx(68.25, abs=0.01)
    _, iter1 = apply_rule(FilterRule(max_iteration=1), records, labels, seed_size=171)
    assert iter1.precision * 100 == pytest.approx(90.06, abs=0.01)
    assert iter1.multiple == 2.0  # exact
    report("filter report arithmetic (68.25 / 90.06 / multiple 2x)")


def test_lexical_unit_metric():
    gold = {("F", f"g{i}") for i in range(300)}
    system = {("F", f"g{i}") for i in range(128)} | {("F", f"s{i}") for i in range(1188)}
    prf, counts = lexical_unit_prf(system, gold)
    assert counts == {"TP": 128, "FP": 1188, "FN": 172}
    assert prf.precision * 100 == pytest.approx(9.7, abs=0.1)
    assert prf.recall * 100 == pytest.approx(42.7, abs=0.1)
    report("lexical-unit metric (9.7 / 42.7 on the count fixture)")


def test_pipeline_determinism_and_invariants(tmp_path):
    """20 seeds x 5 iterations: byte-identical across runs and worker counts;
    trigger distinctness; record count = chains x iterations."""
    seeds, scorer, model, provider, lexicon = build_toy_world()
    assert len(seeds) == 20

    blobs = {}
    reports = {}
    for union in (False, True):
        cfg = PipelineConfig(iterations=5, beam_size=6, align_top_n=3,
                             framewise_union=union, seed=0)
        variants = set()
        for workers in (1, 4):
            for repeat in range(2):
                records, run_report = run(seeds, cfg, scorer, model, provider,
                                          lexicon, workers=workers)
                path = tmp_path / f"u{union}-w{workers}-r{repeat}.jsonl"
                dump_records(path, records)
                variants.add(path.read_bytes())
        assert len(variants) == 1, f"union={union} output not byte-identical"
        blobs[union] = variants.pop()
        reports[union] = (records, run_report)

    for union, (records, run_report) in reports.items():
        assert not run_report.exhausted_chains
        assert len(records) == 20 * 5
        per_chain = defaultdict(list)
        for r in records:
            chain = r.record_id.rsplit(".", 1)[0]
            text = " ".join(
                r.paraphrase.tokens[r.trigger.start : r.trigger.end + 1]
            ).lower()
            per_chain[chain].append(lexicon.lemmatize(text, "v"))
        for chain, triggers in per_chain.items():
            assert len(triggers) == len(set(triggers)), chain

    records, _ = reports[True]
    per_frame = defaultdict(list)
    for r in records:
        text = " ".join(r.paraphrase.tokens[r.trigger.start : r.trigger.end + 1]).lower()
        per_frame[r.frame_id].append(lexicon.lemmatize(text, "v"))
    for frame, triggers in per_frame.items():
        assert len(triggers) == len(set(triggers)), frame
    report("pipeline determinism & invariants (byte-identical, 1-vs-4 workers)")


EXPORTER_CLI = Path(__file__).resolve().parents[1] / "exporter" / "dist" / "cli.js"


@pytest.mark.skipif(
    not EXPORTER_CLI.exists() or shutil.which("node") is None,
    reason="secondary exporter not built",
)
def test_secondary_exporter_round_trip(tmp_path):
    """[SECONDARY] Exported store validates and reads back via the provider."""
    started = time.monotonic()
    pairs = [
        (whitespace_tokenize(f"alpha beta w{i} gamma"),
         whitespace_tokenize(f"delta w{i} epsilon zeta eta"))
        for i in range(10)
    ]
    pairs_path = tmp_path / "pairs.jsonl"
    with open(pairs_path, "w") as fh:
        for src, ref in pairs:
            fh.write(json.dumps({"source": src.raw_text, "reference": ref.raw_text}) + "\n")
    store_path = tmp_path / "store.bin"
    subprocess.run(
        ["node", str(EXPORTER_CLI), "--in", str(pairs_path), "--out", str(store_path),
         "--encoder", "hash", "--dim", "64", "--batch", "4"],
        check=True,
        capture_output=True,
    )
    provider = FileEmbeddingProvider(store_path)
    assert provider.count == 10
    assert provider.dim == 64
    for src, ref in pairs:
        matrix = provider.embed_pair(src, ref)
        assert matrix.vectors.shape == (len(src) + len(ref) + 3, 64)
        for side, sentence in (("source", src), ("reference", ref)):
            for pos in range(len(sentence)):
                pooled = span_pool(matrix, Span(pos, pos), side)
                row = matrix.vectors[matrix.side_base(side) + pos]
                assert np.array_equal(pooled, row)
    provider.close()
    elapsed = time.monotonic() - started
    assert elapsed < 120, f"took {elapsed:.1f}s"
    report(f"exporter round trip ({elapsed:.1f}s)")
