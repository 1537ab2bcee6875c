"""Iterative augmentation: constraint expansion, constrained paraphrasing,
and span alignment, repeated for a fixed number of iterations per seed.

Each seed annotation starts a chain. One iteration (1) expands the chain's
current trigger into its constraint set, (2) decodes the current sentence
under those constraints and keeps the top-N beam elements, (3) aligns the
current trigger into each of them and picks the beam element with the highest
alignment score, then (4) emits a provenance-tracked record and carries the
chosen paraphrase and its aligned span into the next iteration. The newly
aligned trigger's variants join the constraint set immediately, so a chain
never reuses a surface family it already produced.

With frame-wise unioning enabled, all chains of a frame share one constraint
set and are processed sequentially within an iteration (deterministic chain
order), which keeps triggers distinct across the whole frame; frames stay
independent, so parallelism moves to the frame level. Without unioning,
chains are fully independent. Output order is canonicalized by (chain id,
iteration), so results are identical for any worker count.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .aligner import AlignerModel, align
from .constraints import ConstraintSet, InflectionLexicon, expand_phrase
from .core import AugmentationRecord, FrameAnnotation, Span, TokenizedSentence
from .decoder import TokenScorer, decode, top_n
from .embeddings import EmbeddingProvider
from .errors import ChainExhausted, MissingMetadata, NoFeasibleOutput

__all__ = ["PipelineConfig", "ChainState", "RunReport", "run_iteration", "run", "seed_ablation"]

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    iterations: int = 10
    beam_size: int = 20
    align_top_n: int = 3
    framewise_union: bool = False
    max_source_tokens: int = 80
    aligner_threshold: float = 0.0
    seed: int = 0
    combine_scores: bool = False  # rerank by aligner * (1 - decoder_score) instead

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.align_top_n > self.beam_size:
            raise ValueError("align_top_n must be <= beam_size")


@dataclass(frozen=True)
class ChainState:
    """Where one augmentation chain currently stands."""

    chain_id: str
    frame_id: str
    lu_pos: str
    sentence: TokenizedSentence
    trigger: Span
    constraints: ConstraintSet
    iteration: int  # iterations completed so far
    parent_id: str  # id of the record (or seed) the next record descends from


@dataclass
class RunReport:
    seeds_in: int = 0
    seeds_dropped_overlength: int = 0
    chains: int = 0
    records_emitted: int = 0
    exhausted_chains: dict[str, int] = field(default_factory=dict)  # chain -> iteration
    unique_frame_triggers: int = 0
    unique_frame_lemmas: int = 0

    def as_dict(self) -> dict:
        return {
            "seeds_in": self.seeds_in,
            "seeds_dropped_overlength": self.seeds_dropped_overlength,
            "chains": self.chains,
            "records_emitted": self.records_emitted,
            "exhausted_chains": dict(sorted(self.exhausted_chains.items())),
            "unique_frame_triggers": self.unique_frame_triggers,
            "unique_frame_lemmas": self.unique_frame_lemmas,
        }


def _trigger_phrase(state: ChainState) -> tuple[str, ...]:
    return state.sentence.tokens[state.trigger.start : state.trigger.end + 1]


def run_iteration(
    state: ChainState,
    scorer: TokenScorer,
    aligner: AlignerModel,
    provider: EmbeddingProvider,
    lexicon: InflectionLexicon,
    cfg: PipelineConfig,
) -> tuple[AugmentationRecord, ChainState]:
    """One constraint-expansion / paraphrase / align step for one chain.

    Raises :class:`ChainExhausted` when decoding is infeasible or the aligner
    abstains on every beam element.
    """
    iteration = state.iteration + 1
    constraints = state.constraints.add_phrases(expand_phrase(_trigger_phrase(state), lexicon))
    max_len = 2 * len(state.sentence) + 5
    try:
        hyps = decode(state.sentence, constraints, cfg.beam_size, max_len, scorer)
    except NoFeasibleOutput as exc:
        raise ChainExhausted(f"chain {state.chain_id}: {exc}") from exc

    best = None  # (sort key, hypothesis, span, aligner score)
    for rank, hyp in enumerate(top_n(hyps, cfg.align_top_n)):
        if not hyp.tokens:
            continue
        paraphrase = hyp.sentence()
        hit = align(aligner, provider, state.sentence, paraphrase,
                    state.trigger, cfg.aligner_threshold)
        if hit is None:
            continue
        span, align_score = hit
        rerank = align_score * (1.0 - hyp.decoder_score) if cfg.combine_scores else align_score
        key = (-rerank, rank)
        if best is None or key < best[0]:
            best = (key, hyp, span, align_score)
    if best is None:
        raise ChainExhausted(
            f"chain {state.chain_id}: aligner abstained on all {cfg.align_top_n} hypotheses"
        )
    _, hyp, span, align_score = best
    paraphrase = hyp.sentence()
    record = AugmentationRecord(
        record_id=f"{state.chain_id}.{iteration}",
        parent_id=state.parent_id,
        frame_id=state.frame_id,
        iteration=iteration,
        paraphrase=paraphrase,
        trigger=span,
        decoder_score=hyp.decoder_score,
        aligner_score=align_score,
    )
    new_trigger_phrase = paraphrase.tokens[span.start : span.end + 1]
    new_state = ChainState(
        chain_id=state.chain_id,
        frame_id=state.frame_id,
        lu_pos=state.lu_pos,
        sentence=paraphrase,
        trigger=span,
        constraints=constraints.add_phrases(expand_phrase(new_trigger_phrase, lexicon)),
        iteration=iteration,
        parent_id=record.record_id,
    )
    return record, new_state


def normalized_trigger(record_or_state, lexicon: InflectionLexicon, pos: str) -> str:
    """Lowercased, per-token lemmatized trigger text (lexical-unit identity)."""
    if isinstance(record_or_state, AugmentationRecord):
        sentence, span = record_or_state.paraphrase, record_or_state.trigger
    else:
        sentence, span = record_or_state.sentence, record_or_state.trigger
    tokens = sentence.tokens[span.start : span.end + 1]
    return " ".join(lexicon.lemmatize(tok, pos) for tok in tokens)


def _run_chain_group(
    states: list[ChainState],
    share_constraints: bool,
    scorer: TokenScorer,
    aligner: AlignerModel,
    provider: EmbeddingProvider,
    lexicon: InflectionLexicon,
    cfg: PipelineConfig,
) -> tuple[list[AugmentationRecord], dict[str, int]]:
    """Run a group of chains to completion; shared constraints stay threaded."""
    records: list[AugmentationRecord] = []
    exhausted: dict[str, int] = {}
    states = sorted(states, key=lambda s: s.chain_id)
    shared = states[0].constraints if share_constraints else None
    for _ in range(cfg.iterations):
        next_states = []
        for state in states:
            if share_constraints:
                state = replace(state, constraints=shared)
            try:
                record, state = run_iteration(state, scorer, aligner, provider, lexicon, cfg)
            except ChainExhausted:
                exhausted[state.chain_id] = state.iteration + 1
                continue
            records.append(record)
            next_states.append(state)
            if share_constraints:
                shared = state.constraints
        states = next_states
        if not states:
            break
    return records, exhausted


def run(
    seeds: list[FrameAnnotation],
    cfg: PipelineConfig,
    scorer: TokenScorer,
    aligner: AlignerModel,
    provider: EmbeddingProvider,
    lexicon: InflectionLexicon,
    workers: int = 1,
) -> tuple[list[AugmentationRecord], RunReport]:
    """Augment every seed for ``cfg.iterations`` iterations.

    Deterministic for a fixed config regardless of ``workers``: work units
    (frames when frame-wise unioning is on, chains otherwise) are independent
    and output order is canonicalized by (chain id, iteration).
    """
    ids = [seed.annotation_id for seed in seeds]
    if len(set(ids)) != len(ids):
        raise ValueError("seed annotation ids must be unique (they name chains)")
    report = RunReport(seeds_in=len(seeds))
    kept = []
    for seed in seeds:
        if len(seed.sentence) > cfg.max_source_tokens:
            report.seeds_dropped_overlength += 1
            continue
        kept.append(seed)
    report.chains = len(kept)

    initial = [
        ChainState(
            chain_id=seed.annotation_id,
            frame_id=seed.frame_id,
            lu_pos=seed.lu_pos,
            sentence=seed.sentence,
            trigger=seed.trigger,
            constraints=ConstraintSet.empty(),
            iteration=0,
            parent_id=seed.annotation_id,
        )
        for seed in kept
    ]

    if cfg.framewise_union:
        groups: dict[str, list[ChainState]] = {}
        for state in initial:
            groups.setdefault(state.frame_id, []).append(state)
        units = [(states, True) for _, states in sorted(groups.items())]
    else:
        units = [([state], False) for state in initial]

    def work(unit):
        states, share = unit
        return _run_chain_group(states, share, scorer, aligner, provider, lexicon, cfg)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, units))
    else:
        results = [work(u) for u in units]

    records: list[AugmentationRecord] = []
    for unit_records, unit_exhausted in results:
        records.extend(unit_records)
        report.exhausted_chains.update(unit_exhausted)
    records.sort(key=lambda r: (r.record_id.rsplit(".", 1)[0], r.iteration))
    report.records_emitted = len(records)

    pos_by_chain = {seed.annotation_id: seed.lu_pos for seed in kept}
    frame_triggers = set()
    frame_lemmas = set()
    for record in records:
        chain_id = record.record_id.rsplit(".", 1)[0]
        pos = pos_by_chain.get(chain_id, "v")
        text = " ".join(record.paraphrase.tokens[record.trigger.start : record.trigger.end + 1])
        frame_triggers.add((record.frame_id, text))
        frame_lemmas.add((record.frame_id, normalized_trigger(record, lexicon, pos)))
    report.unique_frame_triggers = len(frame_triggers)
    report.unique_frame_lemmas = len(frame_lemmas)
    return records, report


def seed_ablation(
    corpus: list[FrameAnnotation], n_frames: int, n_lus: int, n_anns: int
) -> list[FrameAnnotation]:
    """Earliest-added frames, lexical units per frame, annotations per unit.

    Selection at every level is by ascending ``created_order`` (ties by name),
    mirroring building a resource from its oldest entries outward.
    """
    for ann in corpus:
        if ann.created_order is None:
            raise MissingMetadata(f"annotation {ann.annotation_id} lacks created_order")

    frames: dict[str, list[FrameAnnotation]] = {}
    for ann in corpus:
        frames.setdefault(ann.frame_id, []).append(ann)

    def frame_key(item):
        frame_id, anns = item
        return (min(a.created_order for a in anns), frame_id)

    selected = []
    for frame_id, frame_anns in sorted(frames.items(), key=frame_key)[:n_frames]:
        lus: dict[str, list[FrameAnnotation]] = {}
        for ann in frame_anns:
            lus.setdefault(ann.lexical_unit, []).append(ann)

        def lu_key(item):
            lu, anns = item
            return (min(a.created_order for a in anns), lu)

        for _, lu_anns in sorted(lus.items(), key=lu_key)[:n_lus]:
            chosen = sorted(lu_anns, key=lambda a: (a.created_order, a.annotation_id))[:n_anns]
            selected.extend(chosen)
    return selected
