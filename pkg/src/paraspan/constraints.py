"""Negative lexical constraints: inflection lexicon, phrase expansion, trie matching.

A :class:`ConstraintSet` stores banned token sequences behind a prefix trie so
the decoder can ask, for a generation history, which next tokens would complete
a banned phrase. Sets are immutable after construction; growing one (at an
iteration boundary) builds a new set, so concurrent readers are safe.

Lexicon file format: one entry per line, ``lemma<TAB>pos<TAB>form1,form2,...``
(UTF-8, lowercase). Matching is case-sensitive at the token level; case
coverage comes from inserting case variants explicitly at expansion time.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

__all__ = [
    "Phrase",
    "InflectionLexicon",
    "ConstraintSet",
    "expand_phrase",
    "lemmatize",
    "union_framewise",
    "blocked_continuations",
]

Phrase = tuple[str, ...]

_END = object()  # trie sentinel marking the end of a banned phrase


class InflectionLexicon:
    """Maps (lemma, pos) to inflected surface forms, with the inverse index."""

    def __init__(self, entries: Mapping[tuple[str, str], Iterable[str]]):
        self.entries: dict[tuple[str, str], frozenset[str]] = {}
        self.reverse: dict[str, frozenset[tuple[str, str]]] = {}
        rev: dict[str, set[tuple[str, str]]] = {}
        for (lemma, pos), forms in entries.items():
            lemma, pos = lemma.lower(), pos.lower()
            all_forms = frozenset({lemma} | {f.lower() for f in forms})
            self.entries[(lemma, pos)] = all_forms
            for form in all_forms:
                rev.setdefault(form, set()).add((lemma, pos))
        self.reverse = {form: frozenset(keys) for form, keys in rev.items()}

    @classmethod
    def load(cls, path: str | Path) -> "InflectionLexicon":
        entries: dict[tuple[str, str], set[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
                lemma, pos, forms = parts
                entries.setdefault((lemma, pos), set()).update(
                    f for f in forms.split(",") if f
                )
        return cls(entries)

    @classmethod
    def empty(cls) -> "InflectionLexicon":
        return cls({})

    def variants(self, token: str) -> frozenset[str]:
        """All inflected forms of every lemma the token could belong to."""
        keys = self.reverse.get(token.lower())
        if not keys:
            return frozenset()
        out: set[str] = set()
        for key in keys:
            out |= self.entries[key]
        return frozenset(out)

    def lemmatize(self, form: str, pos: str) -> str:
        """Lemma of ``form`` under ``pos``, or the lowercased form if unknown.

        When several lemmas share the form for one POS, a form that is itself
        a lemma wins; otherwise the alphabetically first lemma is returned.
        """
        lowered = form.lower()
        pos = pos.lower()
        keys = [key for key in self.reverse.get(lowered, ()) if key[1] == pos]
        if not keys:
            return lowered
        if (lowered, pos) in keys:
            return lowered
        return min(lemma for lemma, _ in keys)

    def __len__(self) -> int:
        return len(self.entries)


def lemmatize(form: str, pos: str, lexicon: InflectionLexicon) -> str:
    return lexicon.lemmatize(form, pos)


def _case_variants(phrase: Phrase) -> set[Phrase]:
    first_upper = (phrase[0][:1].upper() + phrase[0][1:],) + phrase[1:]
    lower = tuple(tok.lower() for tok in phrase)
    upper = tuple(tok.upper() for tok in phrase)
    return {phrase, first_upper, lower, upper}


def expand_phrase(phrase: Sequence[str], lexicon: InflectionLexicon) -> set[Phrase]:
    """Inflectional and case variants of a phrase, varying one token at a time.

    Unknown tokens contribute only case variants. The result always contains
    the input phrase.
    """
    phrase = tuple(phrase)
    if not phrase:
        raise ValueError("phrase must be non-empty")
    inflected: set[Phrase] = {phrase}
    for i, token in enumerate(phrase):
        for variant in lexicon.variants(token):
            inflected.add(phrase[:i] + (variant,) + phrase[i + 1 :])
    out: set[Phrase] = set()
    for seq in inflected:
        out |= _case_variants(seq)
    return out


class ConstraintSet:
    """Immutable set of banned token sequences with a prefix-trie index."""

    __slots__ = ("phrases", "_trie", "_max_len")

    def __init__(self, phrases: Iterable[Sequence[str]] = ()):
        normalized = frozenset(tuple(p) for p in phrases)
        for p in normalized:
            if len(p) < 1:
                raise ValueError("constraint phrases must have length >= 1")
        self.phrases: frozenset[Phrase] = normalized
        self._trie: dict = {}
        self._max_len = 0
        for p in normalized:
            node = self._trie
            for tok in p:
                node = node.setdefault(tok, {})
            node[_END] = True
            self._max_len = max(self._max_len, len(p))

    @classmethod
    def empty(cls) -> "ConstraintSet":
        return cls()

    def add_phrases(self, phrases: Iterable[Sequence[str]]) -> "ConstraintSet":
        return ConstraintSet(self.phrases | {tuple(p) for p in phrases})

    def union(self, *others: "ConstraintSet") -> "ConstraintSet":
        merged = set(self.phrases)
        for other in others:
            merged |= other.phrases
        return ConstraintSet(merged)

    def __contains__(self, phrase) -> bool:
        return tuple(phrase) in self.phrases

    def __len__(self) -> int:
        return len(self.phrases)

    def blocked_continuations(self, history: Sequence[str]) -> set[str]:
        """Tokens whose emission would complete a banned phrase after ``history``.

        A token ``t`` is blocked iff some banned phrase equals ``suffix + (t,)``
        for a suffix of the history (including the empty suffix, so banned
        single tokens are always blocked).
        """
        blocked: set[str] = set()
        if not self._trie:
            return blocked
        start = max(0, len(history) - (self._max_len - 1))
        for i in range(start, len(history) + 1):
            node = self._trie
            for tok in history[i:]:
                node = node.get(tok)
                if node is None:
                    break
            else:
                for tok, child in node.items():
                    if tok is not _END and _END in child:
                        blocked.add(tok)
        return blocked

    def contains_banned(self, tokens: Sequence[str]) -> bool:
        """Whether any banned phrase occurs in ``tokens`` as a contiguous run."""
        tokens = tuple(tokens)
        for i in range(len(tokens)):
            node = self._trie
            for tok in tokens[i:]:
                node = node.get(tok)
                if node is None:
                    break
                if _END in node:
                    return True
        return False


def blocked_continuations(cs: ConstraintSet, history: Sequence[str]) -> set[str]:
    return cs.blocked_continuations(history)


def union_framewise(sets: Mapping[str, Sequence[ConstraintSet]]) -> dict[str, ConstraintSet]:
    """Per frame, the union of all listed constraint sets. No cross-frame mixing."""
    out: dict[str, ConstraintSet] = {}
    for frame_id, frame_sets in sets.items():
        merged: set[Phrase] = set()
        for cs in frame_sets:
            merged |= cs.phrases
        out[frame_id] = ConstraintSet(merged)
    return out
