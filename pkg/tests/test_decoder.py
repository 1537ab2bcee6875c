import itertools
import math

import numpy as np
import pytest

from oracles import RandomScorer, exhaustive_best, sequence_logprob
from paraspan.constraints import ConstraintSet, expand_phrase
from paraspan.core import whitespace_tokenize
from paraspan.decoder import EOS, Hypothesis, SubstitutionLatticeScorer, decode, top_n
from paraspan.errors import NoFeasibleOutput

SRC = whitespace_tokenize("He corroborated it")


def lattice_scorer():
    return SubstitutionLatticeScorer(
        {"corroborated": [("confirmed", 0.6), ("verified", 0.4)]},
        copy_prob=0.5,
        extra_vocabulary=("He", "it"),
    )


class TestSubstitutionLatticeScorer:
    def test_distributions_normalize(self):
        scorer = lattice_scorer()
        for prefix in [(), ("He",), ("He", "confirmed"), ("He", "confirmed", "it")]:
            lp = scorer.log_probs(SRC, prefix)
            assert abs(np.exp(lp[lp > -math.inf]).sum() - 1.0) < 1e-9

    def test_rejects_bad_substitute_mass(self):
        with pytest.raises(ValueError):
            SubstitutionLatticeScorer({"a": [("b", 0.5), ("c", 0.4)]})

    def test_copy_only_token(self):
        scorer = lattice_scorer()
        lp = scorer.log_probs(SRC, ())
        assert lp[scorer.vocabulary.index("He")] == 0.0  # prob 1

    def test_eos_after_source_end(self):
        scorer = lattice_scorer()
        lp = scorer.log_probs(SRC, ("He", "confirmed", "it"))
        assert lp[scorer.vocabulary.index(EOS)] == 0.0


class TestDecodeToyParaphrase:
    def test_constrained_substitution(self, toy_lexicon):
        scorer = lattice_scorer()
        constraints = ConstraintSet(expand_phrase(["corroborated"], toy_lexicon))
        hyps = decode(SRC, constraints, beam_size=5, max_len=10, scorer=scorer)
        assert hyps[0].tokens == ("He", "confirmed", "it")
        # no renormalization after masking: raw chain product, not 0.6
        assert hyps[0].logprob_sum == pytest.approx(math.log(0.5 * 0.6))
        assert all(not constraints.contains_banned(h.tokens) for h in hyps)

    def test_lattice_enumeration_oracle(self, toy_lexicon):
        scorer = lattice_scorer()
        constraints = ConstraintSet(expand_phrase(["corroborated"], toy_lexicon))
        options = [["He"], ["corroborated", "confirmed", "verified"], ["it"]]
        expected = []
        for path in itertools.product(*options):
            if constraints.contains_banned(path):
                continue
            lp = sequence_logprob(scorer, SRC, path, with_eos=True)
            if lp > -math.inf:
                expected.append((path, lp))
        expected.sort(key=lambda item: (-item[1], item[0]))
        hyps = decode(SRC, constraints, beam_size=10, max_len=10, scorer=scorer)
        assert [(h.tokens, pytest.approx(h.logprob_sum)) for h in hyps] == expected

    def test_unconstrained_top_is_copy(self):
        scorer = lattice_scorer()
        hyps = decode(SRC, ConstraintSet.empty(), beam_size=5, max_len=10, scorer=scorer)
        assert hyps[0].tokens == SRC.tokens

    def test_unmasked_path_scores_are_chain_products(self):
        scorer = lattice_scorer()
        hyps = decode(SRC, ConstraintSet.empty(), beam_size=10, max_len=10, scorer=scorer)
        for hyp in hyps:
            assert hyp.logprob_sum == pytest.approx(
                sequence_logprob(scorer, SRC, hyp.tokens, with_eos=True)
            )


class TestDecodeGeneral:
    def test_single_token_exclusion(self):
        scorer = RandomScorer(vocab_size=3, seed=7)  # vocab {t0, t1, </s>}
        constraints = ConstraintSet([("t0",)])
        hyps = decode(whitespace_tokenize("x"), constraints, beam_size=8, max_len=2,
                      scorer=scorer)
        assert hyps
        assert all("t0" not in h.tokens for h in hyps)

    def test_no_feasible_output(self):
        scorer = lattice_scorer()
        constraints = ConstraintSet([("He",), ("he",)])
        with pytest.raises(NoFeasibleOutput):
            decode(SRC, constraints, beam_size=4, max_len=8, scorer=scorer)

    def test_at_most_beam_size(self):
        scorer = RandomScorer(vocab_size=4, seed=3)
        hyps = decode(whitespace_tokenize("x"), ConstraintSet.empty(), beam_size=3,
                      max_len=3, scorer=scorer)
        assert len(hyps) <= 3

    def test_returns_descending_with_lex_ties(self):
        scorer = RandomScorer(vocab_size=4, seed=11)
        hyps = decode(whitespace_tokenize("x"), ConstraintSet.empty(), beam_size=50,
                      max_len=3, scorer=scorer)
        keys = [(-h.logprob_sum, h.tokens) for h in hyps]
        assert keys == sorted(keys)

    def test_oracle_equivalence_sample(self):
        """Beam covering the whole space equals exhaustive constrained argmax."""
        for seed in range(20):
            scorer = RandomScorer(vocab_size=4, seed=seed)
            constraints = ConstraintSet([("t0", "t1"), ("t2",)])
            source = whitespace_tokenize("x")
            got = decode(source, constraints, beam_size=200, max_len=3, scorer=scorer)[0]
            want_tokens, want_lp = exhaustive_best(scorer, source, constraints, max_len=3)
            assert got.tokens == want_tokens
            assert got.logprob_sum == pytest.approx(want_lp)

    def test_empty_constraints_oracle_equivalence(self):
        for seed in range(10):
            scorer = RandomScorer(vocab_size=4, seed=100 + seed)
            source = whitespace_tokenize("x")
            got = decode(source, ConstraintSet.empty(), beam_size=200, max_len=3,
                         scorer=scorer)[0]
            want_tokens, want_lp = exhaustive_best(scorer, source, ConstraintSet.empty(), 3)
            assert got.tokens == want_tokens
            assert got.logprob_sum == pytest.approx(want_lp)


class TestHypothesisScore:
    def test_score_range_and_direction(self):
        confident = Hypothesis(("a", "b"), math.log(0.9) * 2)
        hesitant = Hypothesis(("a", "b"), math.log(0.1) * 2)
        assert 0.0 <= confident.decoder_score < hesitant.decoder_score < 1.0

    def test_monotone_in_mean_logprob(self, rng):
        pairs = rng.uniform(-8, 0, size=(50, 2))
        for a, b in pairs:
            ha = Hypothesis(("x",), float(a))
            hb = Hypothesis(("x",), float(b))
            if a > b:
                assert ha.decoder_score < hb.decoder_score

    def test_perfect_confidence_scores_zero(self):
        assert Hypothesis(("a",), 0.0).decoder_score == 0.0


class TestTopN:
    def _hyps(self, n):
        return [Hypothesis((f"t{i}",), -float(i)) for i in range(n)]

    def test_clamps(self):
        assert len(top_n(self._hyps(2), 5)) == 2

    def test_takes_prefix(self):
        hyps = self._hyps(30)
        assert top_n(hyps, 20) == hyps[:20]
        assert top_n(self._hyps(20), 3) == self._hyps(20)[:3]

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            top_n(self._hyps(3), 0)
