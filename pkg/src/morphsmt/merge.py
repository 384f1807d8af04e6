"""Combining a morpheme-native phrase table with a retokenized word table.

Four strategies: add-1/add-2 (primary table wins, origin features appended),
plain linear interpolation, and the raw-count merge that recomputes the
phrase translation probabilities from summed extraction counts so they stay
normalized.  The raw-count merge interpolates lexicalized scores between the
morpheme table and the ORIGINAL word table; a side missing its entry gets an
estimate from the stored alignment instead of a zero.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Sequence

from .align import LexicalTable
from .morpho import (
    MorphSentence,
    to_words,
    token_strings,
    word_spans_of_tokens,
    words_from_tokens,
)
from .phrasex import PHRASE_PENALTY, PhraseEntry, PhraseTable, lexical_weight

# origin feature values for the add-feature merges
FEAT_BOTH = math.e
FEAT_ONE = math.exp(2.0 / 3.0)   # add-1, primary only
FEAT_OTHER = math.exp(1.0 / 3.0)  # add-1, secondary only
FEAT_ON = math.e                  # add-2 slot active
FEAT_OFF = 1.0                    # add-2 slot inactive


@dataclass
class SegmentationLexicon:
    """word -> serialized morpheme token sequence, from the corpus segmentation."""

    mapping: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def segment(self, word: str) -> tuple[str, ...]:
        """Known words map through the lexicon; unknown words become one STM."""
        return self.mapping.get(word, (f"{word}/STM",))

    def __len__(self) -> int:
        return len(self.mapping)


def build_lexicon(
    word_sentences: Sequence[Sequence[str]],
    morph_sentences: Sequence[MorphSentence],
) -> SegmentationLexicon:
    """Collect each word's segmentation; most frequent wins, ties lexicographic."""
    seen: dict[str, Counter] = {}
    for words, morphs in zip(word_sentences, morph_sentences, strict=True):
        if to_words(morphs) != list(words):
            raise ValueError(
                "segmented line does not reassemble to its word line: "
                f"{' '.join(words)!r}"
            )
        tokens = token_strings(morphs)
        for word, (start, end) in zip(words, word_spans_of_tokens(tokens)):
            seen.setdefault(word, Counter())[tokens[start : end + 1]] += 1
    mapping = {}
    for word in sorted(seen):
        top = max(seen[word].values())
        mapping[word] = min(seg for seg, n in seen[word].items() if n == top)
    return SegmentationLexicon(mapping)


def retokenize_pt(pt_w: PhraseTable, lex: SegmentationLexicon) -> PhraseTable:
    """Map a word-granularity table to morpheme granularity.

    Scores and counts are carried unchanged; each word-level link expands to
    the full product of the two words' morpheme positions.
    """
    if pt_w.granularity != "word":
        raise ValueError("retokenize_pt expects a word-granularity table")
    entries = {}
    for key in sorted(pt_w.entries):
        e = pt_w.entries[key]
        src_segs = [lex.segment(w) for w in e.source]
        tgt_segs = [lex.segment(w) for w in e.target]
        src_tokens = tuple(t for seg in src_segs for t in seg)
        tgt_tokens = tuple(t for seg in tgt_segs for t in seg)
        src_offsets = _offsets(src_segs)
        tgt_offsets = _offsets(tgt_segs)
        links = set()
        for wi, wj in e.alignment:
            for mi in range(src_offsets[wi], src_offsets[wi] + len(src_segs[wi])):
                for mj in range(tgt_offsets[wj], tgt_offsets[wj] + len(tgt_segs[wj])):
                    links.add((mi, mj))
        new_key = (src_tokens, tgt_tokens)
        if new_key in entries:
            raise ValueError(f"retokenization collision on {new_key}")
        entries[new_key] = replace(
            e, source=src_tokens, target=tgt_tokens, alignment=frozenset(links)
        )
    return PhraseTable(entries, "morpheme", pt_w.max_span, True, pt_w.n_extras)


def _offsets(segments: Sequence[Sequence[str]]) -> list[int]:
    offsets = []
    pos = 0
    for seg in segments:
        offsets.append(pos)
        pos += len(seg)
    return offsets


def merge_add_features(
    primary: PhraseTable, secondary: PhraseTable, n_features: int
) -> PhraseTable:
    """Union keyed by (src, tgt); duplicates keep the primary table's scores.

    add-1 appends e^1 / e^(2/3) / e^(1/3) for both / primary-only /
    secondary-only; add-2 appends (e,e) / (e,1) / (1,e).
    """
    if n_features not in (1, 2):
        raise ValueError("n_features must be 1 or 2")
    if primary.granularity != secondary.granularity:
        raise ValueError("granularity mismatch in add-feature merge")
    entries = {}
    for key in sorted(set(primary.entries) | set(secondary.entries)):
        in_p = key in primary.entries
        in_s = key in secondary.entries
        base = primary.entries[key] if in_p else secondary.entries[key]
        if n_features == 1:
            feats = (FEAT_BOTH,) if in_p and in_s else (FEAT_ONE,) if in_p else (FEAT_OTHER,)
        else:
            feats = (
                (FEAT_ON, FEAT_ON) if in_p and in_s
                else (FEAT_ON, FEAT_OFF) if in_p
                else (FEAT_OFF, FEAT_ON)
            )
        entries[key] = replace(base, extras=base.extras + feats)
    return PhraseTable(
        entries, primary.granularity, max(primary.max_span, secondary.max_span),
        primary.boundary_aware and secondary.boundary_aware,
        primary.n_extras + n_features,
    )


def merge_interpolate(
    pt_a: PhraseTable, pt_b: PhraseTable, alpha: float
) -> PhraseTable:
    """Linear interpolation of the four probability scores; missing side is 0."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    if pt_a.granularity != pt_b.granularity:
        raise ValueError("granularity mismatch in interpolation merge")
    entries = {}
    for key in sorted(set(pt_a.entries) | set(pt_b.entries)):
        a = pt_a.entries.get(key)
        b = pt_b.entries.get(key)
        src, tgt = key

        def mix(attr: str) -> float:
            va = getattr(a, attr) if a is not None else 0.0
            vb = getattr(b, attr) if b is not None else 0.0
            return alpha * va + (1.0 - alpha) * vb

        counts = [e.count_joint for e in (a, b) if e is not None and e.count_joint is not None]
        keeper = a if a is not None else b
        entries[key] = PhraseEntry(
            src, tgt, mix("phi_fwd"), mix("phi_bwd"), mix("lex_fwd"), mix("lex_bwd"),
            PHRASE_PENALTY, sum(counts) if counts else None, keeper.alignment,
        )
    return PhraseTable(
        entries, pt_a.granularity, max(pt_a.max_span, pt_b.max_span),
        pt_a.boundary_aware and pt_b.boundary_aware, 0,
    )


def induce_word_alignment(
    src_tokens: Sequence[str],
    tgt_tokens: Sequence[str],
    morph_links: Sequence[tuple[int, int]],
) -> frozenset[tuple[int, int]]:
    """Word pair linked iff any of their constituent morpheme pairs is linked."""
    src_word_of = _word_index(src_tokens)
    tgt_word_of = _word_index(tgt_tokens)
    return frozenset(
        (src_word_of[i], tgt_word_of[j]) for i, j in morph_links
    )


def _word_index(tokens: Sequence[str]) -> dict[int, int]:
    index = {}
    for w, (start, end) in enumerate(word_spans_of_tokens(tokens)):
        for pos in range(start, end + 1):
            index[pos] = w
    return index


def merge_our_method(
    pt_m: PhraseTable,
    pt_wm: PhraseTable,
    pt_w: PhraseTable,
    alpha: float,
    lex_m_fwd: LexicalTable,
    lex_m_bwd: LexicalTable,
    lex_w_fwd: LexicalTable,
    lex_w_bwd: LexicalTable,
) -> PhraseTable:
    """Raw-count phi merge plus lexicalized interpolation with estimation.

    phi(t|s) = (c_m + c_wm) / (sum_t' c_m + sum_t' c_wm) over the union of
    entries, and symmetrically for the backward direction, which keeps both
    distributions normalized.  lex = alpha*lex_m + (1-alpha)*lex_w, where
    lex_m comes from pt_m and lex_w from the original word table via word
    concatenation; a missing side is estimated with the standard lexical
    weight formula over the stored (induced) alignment, never zeroed.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    for name, pt in (("pt_m", pt_m), ("pt_wm", pt_wm)):
        for e in pt.entries.values():
            if e.count_joint is None:
                raise ValueError(f"{name} entry {e.source}->{e.target} lacks counts")

    keys = sorted(set(pt_m.entries) | set(pt_wm.entries))
    src_marginal: Counter = Counter()
    tgt_marginal: Counter = Counter()
    for key in keys:
        c = _count(pt_m, key) + _count(pt_wm, key)
        src_marginal[key[0]] += c
        tgt_marginal[key[1]] += c

    entries = {}
    for key in keys:
        src, tgt = key
        em = pt_m.entries.get(key)
        ewm = pt_wm.entries.get(key)
        carrier = em if em is not None else ewm
        c = _count(pt_m, key) + _count(pt_wm, key)

        if em is not None:
            lmf, lmb = em.lex_fwd, em.lex_bwd
        else:
            # morpheme-side estimate over the retokenized entry's alignment
            lmf = lexical_weight(tgt, src, carrier.alignment, lex_m_fwd)
            lmb = lexical_weight(
                src, tgt, [(j, i) for i, j in carrier.alignment], lex_m_bwd
            )

        src_words = tuple(words_from_tokens(src))
        tgt_words = tuple(words_from_tokens(tgt))
        ew = pt_w.entries.get((src_words, tgt_words))
        if ew is not None:
            lwf, lwb = ew.lex_fwd, ew.lex_bwd
        else:
            word_links = induce_word_alignment(src, tgt, carrier.alignment)
            lwf = lexical_weight(tgt_words, src_words, word_links, lex_w_fwd)
            lwb = lexical_weight(
                src_words, tgt_words, [(j, i) for i, j in word_links], lex_w_bwd
            )

        entries[key] = PhraseEntry(
            src, tgt,
            phi_fwd=c / src_marginal[src],
            phi_bwd=c / tgt_marginal[tgt],
            lex_fwd=alpha * lmf + (1.0 - alpha) * lwf,
            lex_bwd=alpha * lmb + (1.0 - alpha) * lwb,
            penalty=PHRASE_PENALTY,
            count_joint=c,
            alignment=carrier.alignment,
        )
    return PhraseTable(
        entries, "morpheme", max(pt_m.max_span, pt_wm.max_span),
        pt_m.boundary_aware and pt_wm.boundary_aware, 0,
    )


def _count(pt: PhraseTable, key) -> float:
    e = pt.entries.get(key)
    return e.count_joint if e is not None else 0.0
