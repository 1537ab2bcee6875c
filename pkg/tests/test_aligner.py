import copy

import numpy as np
import pytest

from paraspan.aligner import (
    AlignerConfig,
    AlignerModel,
    SpanAligner,
    align,
    candidates,
    features,
    forward,
    load_model,
    save_model,
    soft_label,
    train,
)
from paraspan.core import AlignmentExample, Span, TokenizedSentence, whitespace_tokenize
from paraspan.embeddings import HashEmbeddingProvider, span_pool
from paraspan.errors import EmptyDataset
from paraspan.nn import bce_with_logits, sigmoid
from synth import make_splice_corpus


def brute_force_candidates(m, span_len, k):
    return [
        Span(i, j)
        for i in range(m)
        for j in range(i, m)
        if abs((j - i + 1) - span_len) <= k
    ]


class TestCandidates:
    def test_counts_window(self):
        got = candidates(10, 2, 5)
        assert len(got) == 49  # lengths 1..7: 10+9+8+7+6+5+4

    def test_zero_window(self):
        assert candidates(3, 1, 0) == [Span(0, 0), Span(1, 1), Span(2, 2)]

    def test_window_covering_everything(self):
        got = candidates(5, 4, 5)
        assert got == brute_force_candidates(5, 4, 5)
        assert len(got) == 15

    def test_matches_brute_force(self):
        for m in range(1, 9):
            for span_len in range(1, 6):
                for k in range(0, 4):
                    assert candidates(m, span_len, k) == brute_force_candidates(m, span_len, k)

    def test_lexicographic_order(self):
        got = candidates(6, 2, 3)
        assert got == sorted(got, key=lambda s: (s.start, s.end))


class TestSoftLabel:
    def test_exact_match(self):
        assert soft_label(Span(3, 5), Span(3, 5)) == 1.0

    def test_distance_two(self):
        assert soft_label(Span(3, 5), Span(4, 6)) == 0.25

    def test_large_distance(self):
        assert soft_label(Span(0, 0), Span(5, 9)) == 2.0 ** -14

    def test_exhaustive_formula(self):
        """2^-d for every span pair on sentences of length <= 8; exact dyadics."""
        for length in range(1, 9):
            spans = [Span(i, j) for i in range(length) for j in range(i, length)]
            for gold in spans:
                for cand in spans:
                    d = abs(gold.start - cand.start) + abs(gold.end - cand.end)
                    assert soft_label(gold, cand) == 2.0 ** -d

    def test_symmetric_and_maximal_at_equality(self):
        spans = [Span(i, j) for i in range(6) for j in range(i, 6)]
        for a in spans:
            for b in spans:
                assert soft_label(a, b) == soft_label(b, a)
                if a != b:
                    assert soft_label(a, b) < 1.0


class TestFeatures:
    def test_identical_reps_zero_difference(self):
        rep = np.array([0.5, -1.0, 2.0])
        fv = features(rep, rep, Span(0, 0), Span(1, 1))
        assert np.array_equal(fv.df, np.zeros(3))

    def test_difference_and_maxima(self):
        fv = features(np.array([1.0, 5.0]), np.array([3.0, 2.0]), Span(0, 0), Span(0, 0))
        assert np.array_equal(fv.df, np.array([-2.0, 3.0]))
        assert np.array_equal(fv.mx, np.array([3.0, 5.0]))

    def test_cue_fields(self):
        fv = features(np.zeros(2), np.zeros(2), Span(2, 3), Span(2, 4))
        assert np.array_equal(fv.cue, np.array([2.0, 2.0, 2.0, 3.0]))

    def test_total_length(self):
        fv = features(np.zeros(16), np.zeros(16), Span(0, 1), Span(2, 2))
        assert fv.as_array().shape == (2 * 16 + 4,)


class TestForward:
    def _zero_model(self, dim=4, hidden=3):
        model = AlignerModel.initialize(dim, AlignerConfig(hidden_units=hidden, seed=0))
        for _, p in model.mlp.named_params():
            p[...] = 0.0
        model.training = False
        return model

    def test_zero_weights_give_half(self):
        model = self._zero_model()
        v = np.zeros(model.input_dim)
        assert forward(model, v) == 0.5

    def test_output_in_unit_interval(self, rng):
        model = AlignerModel.initialize(4, AlignerConfig(hidden_units=8, seed=1))
        model.training = False
        for _ in range(50):
            out = forward(model, rng.normal(size=model.input_dim))
            assert 0.0 < out < 1.0

    def test_train_vs_inference_statistics(self, rng):
        model = AlignerModel.initialize(4, AlignerConfig(hidden_units=8, seed=2))
        X = rng.normal(size=(6, model.input_dim))
        model.training = True
        train_out = model.mlp.forward(X, training=True)
        model.training = False
        infer_out = model.mlp.forward(X, training=False)
        assert not np.allclose(train_out, infer_out)


def model_loss(model, X, y):
    logits = model.mlp.forward(X, training=True)
    loss, dlogits, _ = bce_with_logits(logits, y)
    return loss, dlogits


class TestGradients:
    def test_finite_difference_check(self, rng):
        """Central differences at eps=1e-5, float64: rel error < 1e-3."""
        model = AlignerModel.initialize(3, AlignerConfig(hidden_units=5, seed=3))
        X = rng.normal(size=(7, model.input_dim))
        y = rng.uniform(size=7)
        loss, dlogits = model_loss(model, X, y)
        model.mlp.zero_grads()
        model.mlp.backward(dlogits)
        analytic = {name: g.copy() for name, g in model.mlp.named_grads()}

        eps = 1e-5
        checked = 0
        for name, param in model.mlp.named_params():
            flat = param.reshape(-1)
            for idx in range(flat.shape[0]):
                probe = copy.deepcopy(model)
                pflat = dict(probe.mlp.named_params())[name].reshape(-1)
                pflat[idx] += eps
                up, _ = model_loss(probe, X, y)
                pflat[idx] -= 2 * eps
                down, _ = model_loss(probe, X, y)
                fd = (up - down) / (2 * eps)
                an = analytic[name].reshape(-1)[idx]
                denom = max(abs(fd), abs(an), 1e-8)
                assert abs(fd - an) / denom < 1e-3, f"{name}[{idx}]: fd={fd} an={an}"
                checked += 1
        assert checked > 50


@pytest.fixture(scope="module")
def provider():
    return HashEmbeddingProvider(dim=24, seed=0)


@pytest.fixture(scope="module")
def small_corpus():
    return make_splice_corpus(80, seed=7)


class TestTrain:
    def test_memorizes_single_example(self, provider):
        example = make_splice_corpus(1, seed=3)[0]
        cfg = AlignerConfig(hidden_units=16, learning_rate=0.3, epochs=40, seed=0)
        model = train([example], provider, cfg)
        hit = align(model, provider, example.source, example.reference, example.source_span)
        assert hit is not None
        assert hit[0] == example.gold_span

    def test_loss_non_increasing_within_noise(self, provider):
        corpus = make_splice_corpus(50, seed=11)
        cfg = AlignerConfig(hidden_units=24, learning_rate=0.2, epochs=8, seed=0)
        model = train(corpus, provider, cfg)
        losses = model.epoch_losses
        for prev, cur in zip(losses, losses[1:]):
            assert cur <= prev * 1.05  # 5% noise tolerance

    def test_deterministic_given_seed(self, provider, small_corpus):
        cfg = AlignerConfig(hidden_units=16, learning_rate=0.2, epochs=3, seed=4)
        m1 = train(small_corpus, provider, cfg)
        m2 = train(small_corpus, provider, cfg)
        for (_, a), (_, b) in zip(m1.mlp.named_params(), m2.mlp.named_params()):
            assert np.array_equal(a, b)

    def test_window_violation_skipped_and_reported(self, provider):
        good = make_splice_corpus(3, seed=5)
        src = TokenizedSentence.from_tokens(["a", "b", "c", "d", "e", "f", "g", "h", "i"])
        ref = TokenizedSentence.from_tokens(["p", "q", "r", "s", "t", "u", "v", "w", "x"])
        bad = AlignmentExample(
            source=src, source_span=Span(0, 0), reference=ref, gold_span=Span(0, 8)
        )
        cfg = AlignerConfig(k=5, hidden_units=8, epochs=1, seed=0)
        model = train(good + [bad], provider, cfg)
        assert model.skipped_window == 1

    def test_none_gold_examples_excluded(self, provider):
        corpus = make_splice_corpus(4, seed=6)
        with_none = corpus + [
            AlignmentExample(
                source=corpus[0].source,
                source_span=corpus[0].source_span,
                reference=corpus[0].reference,
                gold_span=None,
            )
        ]
        cfg = AlignerConfig(hidden_units=8, epochs=1, seed=0)
        model = train(with_none, provider, cfg)
        assert model.skipped_window == 0

    def test_empty_dataset(self, provider):
        with pytest.raises(EmptyDataset):
            train([], provider, AlignerConfig())


@pytest.fixture(scope="module")
def trained(provider, small_corpus):
    cfg = AlignerConfig(hidden_units=24, learning_rate=0.3, epochs=6, seed=0)
    return train(small_corpus, provider, cfg)


class TestAlign:

    def test_zero_threshold_never_abstains(self, trained, provider):
        for example in make_splice_corpus(10, seed=21):
            hit = align(trained, provider, example.source, example.reference,
                        example.source_span, threshold=0.0)
            assert hit is not None

    def test_matches_brute_force_scoring(self, trained, provider):
        """align == naive loop over candidate feature vectors through forward."""
        for example in make_splice_corpus(5, seed=22):
            matrix = provider.embed_pair(example.source, example.reference)
            s_rep = span_pool(matrix, example.source_span, "source")
            best_span, best_score = None, -1.0
            for cand in candidates(len(example.reference), len(example.source_span),
                                   trained.k):
                c_rep = span_pool(matrix, cand, "reference")
                fv = features(s_rep, c_rep, example.source_span, cand)
                score = forward(trained, fv)
                if score > best_score:
                    best_span, best_score = cand, score
            got = align(trained, provider, example.source, example.reference,
                        example.source_span)
            assert got is not None
            assert got[0] == best_span
            assert got[1] == pytest.approx(best_score)

    def test_abstention_monotone_argmax_invariant(self, trained, provider):
        """Raising the threshold only switches answers to None, never changes them."""
        examples = make_splice_corpus(15, seed=23)
        base = [
            align(trained, provider, ex.source, ex.reference, ex.source_span, 0.0)
            for ex in examples
        ]
        for tau in [0.3, 0.6, 0.9, 0.99]:
            for ex, hit in zip(examples, base):
                gated = align(trained, provider, ex.source, ex.reference,
                              ex.source_span, tau)
                if gated is not None:
                    assert gated == hit
                else:
                    assert hit[1] < tau

    def test_returned_span_within_window(self, trained, provider):
        for ex in make_splice_corpus(10, seed=24):
            hit = align(trained, provider, ex.source, ex.reference, ex.source_span)
            assert abs(len(hit[0]) - len(ex.source_span)) <= trained.k

    def test_inference_deterministic(self, trained, provider):
        ex = make_splice_corpus(1, seed=25)[0]
        first = align(trained, provider, ex.source, ex.reference, ex.source_span)
        for _ in range(3):
            assert align(trained, provider, ex.source, ex.reference,
                         ex.source_span) == first


class TestModelFile:
    def test_round_trip(self, provider, small_corpus, tmp_path):
        cfg = AlignerConfig(hidden_units=12, epochs=2, seed=0)
        model = train(small_corpus[:10], provider, cfg)
        path = tmp_path / "aligner.bin"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.dim == model.dim and loaded.k == model.k
        ex = small_corpus[0]
        a = align(model, provider, ex.source, ex.reference, ex.source_span)
        b = align(loaded, provider, ex.source, ex.reference, ex.source_span)
        assert a[0] == b[0]
        assert a[1] == pytest.approx(b[1], abs=1e-6)  # float32 round trip


class TestSpanAlignerEstimator:
    def test_fit_predict(self, provider):
        corpus = make_splice_corpus(120, seed=31)
        est = SpanAligner(provider=provider, hidden_units=24, learning_rate=0.3,
                          epochs=20, seed=0)
        est.fit(corpus[:100])
        preds = est.predict(corpus[100:])
        golds = [ex.gold_span for ex in corpus[100:]]
        hits = sum(1 for p, g in zip(preds, golds) if p == g)
        assert hits >= 16

    def test_get_params_round_trip(self):
        est = SpanAligner(k=3, hidden_units=10, seed=9)
        params = est.get_params()
        assert params["k"] == 3 and params["hidden_units"] == 10
        clone = SpanAligner(**params)
        assert clone.get_params() == params
