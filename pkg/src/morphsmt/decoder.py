"""Stack/beam phrase-based decoder over morpheme tokens with twin-LM scoring.

Stacks are indexed by the number of covered source WORDS: boundary-aware
phrase options always cover whole words, which keeps a morpheme system's
search directly comparable to a word system's.  Scoring is log-linear; the
word LM contributes only for words completed so far, so pruning uses a rest
cost built from phrase scores plus a context-free morpheme-LM estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .lm import NGramModel, TwinScorerState, initial_twin_state, twin_extend, twin_finalize
from .morpho import MorphSentence, split_token_string, word_spans, words_from_tokens
from .phrasex import PhraseEntry, PhraseTable

LOG_ZERO = -100.0  # finite stand-in for ln(0); keeps 0-weighted features at 0

FEATURE_ORDER = (
    "lm_morph", "lm_word", "phi_fwd", "phi_bwd", "lex_fwd", "lex_bwd",
    "phrase_penalty", "word_penalty", "distortion", "oov",
    "merge_feat_1", "merge_feat_2",
)

# untuned starting point; the positive word_penalty counteracts the LMs'
# preference for fewer (or merged) words, MERT moves these freely
DEFAULT_WEIGHTS = {
    "lm_morph": 0.5,
    "lm_word": 0.15,
    "phi_fwd": 0.4,
    "phi_bwd": 0.4,
    "lex_fwd": 0.2,
    "lex_bwd": 0.2,
    "phrase_penalty": -0.2,
    "word_penalty": 0.9,
    "distortion": -0.3,
    "oov": 0.0,
    "merge_feat_1": 0.3,
    "merge_feat_2": 0.3,
}


def default_weights(
    n_extras: int = 0, with_morph_lm: bool = True, with_word_lm: bool = True
) -> dict[str, float]:
    names = ["phi_fwd", "phi_bwd", "lex_fwd", "lex_bwd", "phrase_penalty",
             "word_penalty", "distortion", "oov"]
    if with_morph_lm:
        names.insert(0, "lm_morph")
    if with_word_lm:
        names.insert(1 if with_morph_lm else 0, "lm_word")
    names.extend(f"merge_feat_{i + 1}" for i in range(n_extras))
    return {n: DEFAULT_WEIGHTS[n] for n in names}


def dot(weights: Mapping[str, float], features: Mapping[str, float]) -> float:
    return sum(weights.get(k, 0.0) * v for k, v in features.items())


def safe_ln(x: float) -> float:
    return math.log(x) if x > 0.0 else LOG_ZERO


@dataclass(frozen=True)
class TranslationOption:
    start: int  # source word span [start, end)
    end: int
    target: tuple[str, ...]
    tm_features: tuple[tuple[str, float], ...]  # log-domain, no LM, no distortion
    n_words: int  # word-final tokens in the target
    mask: int
    is_oov: bool = False
    entry: Optional[PhraseEntry] = None


@dataclass
class Hypothesis:
    coverage: int  # bitmask over source word indices
    n_covered: int
    last_end: int  # word index one past the last applied span
    state: TwinScorerState
    features: dict[str, float]
    score: float
    parent: Optional["Hypothesis"]
    option: Optional[TranslationOption]


def render_tokens(sentence: MorphSentence, granularity: str) -> tuple[str, ...]:
    """Table/LM view of the source: serialized morphs, or bare surfaces for word systems."""
    if granularity == "word":
        return tuple(t.surface for t in sentence.tokens)
    return tuple(t.serialize() for t in sentence.tokens)


def _span_mask(start: int, end: int) -> int:
    return ((1 << (end - start)) - 1) << start


def build_options(
    source: MorphSentence, table: PhraseTable, max_span: Optional[int] = None
) -> list[TranslationOption]:
    """Phrase options over whole-word source spans, plus OOV pass-through.

    A source word no option covers is copied through as its own word with a
    unit oov feature and neutral translation scores.
    """
    tokens = render_tokens(source, table.granularity)
    spans = word_spans(source)
    n_words = len(spans)
    limit = max_span or (table.max_span if table.max_span > 0 else n_words)
    options: list[TranslationOption] = []
    covered = set()
    for w1 in range(n_words):
        for w2 in range(w1 + 1, min(w1 + limit, n_words) + 1):
            src = tokens[spans[w1].start : spans[w2 - 1].end + 1]
            for entry in _entries_for(table, src):
                feats = [
                    ("phi_fwd", safe_ln(entry.phi_fwd)),
                    ("phi_bwd", safe_ln(entry.phi_bwd)),
                    ("lex_fwd", safe_ln(entry.lex_fwd)),
                    ("lex_bwd", safe_ln(entry.lex_bwd)),
                    ("phrase_penalty", safe_ln(entry.penalty)),
                ]
                feats.extend(
                    (f"merge_feat_{i + 1}", safe_ln(x))
                    for i, x in enumerate(entry.extras)
                )
                options.append(TranslationOption(
                    start=w1, end=w2, target=entry.target,
                    tm_features=tuple(feats),
                    n_words=_count_finals(entry.target),
                    mask=_span_mask(w1, w2),
                    entry=entry,
                ))
                covered.update(range(w1, w2))
    for w in range(n_words):
        if w in covered:
            continue
        span = spans[w]
        tgt = tokens[span.start : span.end + 1]
        options.append(TranslationOption(
            start=w, end=w + 1, target=tgt,
            tm_features=(("phrase_penalty", 1.0), ("oov", 1.0)),
            n_words=_count_finals(tgt),
            mask=_span_mask(w, w + 1),
            is_oov=True,
        ))
    return options


def _entries_for(table: PhraseTable, src: tuple[str, ...]) -> list[PhraseEntry]:
    index = getattr(table, "_source_index", None)
    if index is None:
        index = {}
        for key in sorted(table.entries):
            index.setdefault(key[0], []).append(table.entries[key])
        table._source_index = index  # tables are immutable by convention
    return index.get(src, [])


def _count_finals(tokens: Iterable[str]) -> int:
    return sum(1 for t in tokens if split_token_string(t)[1])


def _future_costs(
    options: Sequence[TranslationOption],
    n_words: int,
    weights: Mapping[str, float],
    lm_m: Optional[NGramModel],
) -> list[list[float]]:
    """Best achievable score per word span: phrase features, word penalty and a
    context-free morpheme-LM estimate; the word LM and distortion stay out."""
    w_lm = weights.get("lm_morph", 0.0)
    w_wp = weights.get("word_penalty", 0.0)
    best = [[-math.inf] * (n_words + 1) for _ in range(n_words + 1)]
    for opt in options:
        score = sum(weights.get(k, 0.0) * v for k, v in opt.tm_features)
        score += w_wp * opt.n_words
        if lm_m is not None and w_lm != 0.0:
            ctx: tuple[str, ...] = ()
            est = 0.0
            for tok in opt.target:
                est += lm_m.logprob(tok, ctx)
                ctx = (ctx + (tok,))[-(lm_m.order - 1):] if lm_m.order > 1 else ()
            score += w_lm * est
        if score > best[opt.start][opt.end]:
            best[opt.start][opt.end] = score
    for width in range(2, n_words + 1):
        for i in range(0, n_words - width + 1):
            j = i + width
            for k in range(i + 1, j):
                combined = best[i][k] + best[k][j]
                if combined > best[i][j]:
                    best[i][j] = combined
    return best


def _rest(coverage: int, n_words: int, future: list[list[float]], memo: dict) -> float:
    cached = memo.get(coverage)
    if cached is not None:
        return cached
    total = 0.0
    i = 0
    while i < n_words:
        if coverage >> i & 1:
            i += 1
            continue
        j = i
        while j < n_words and not (coverage >> j & 1):
            j += 1
        total += future[i][j]
        i = j
    memo[coverage] = total
    return total


def search(
    source: MorphSentence,
    table: PhraseTable,
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
    weights: Mapping[str, float],
    beam_size: Optional[int] = 100,
    distortion_limit: int = 6,
    max_span: Optional[int] = None,
) -> list[Hypothesis]:
    """All finalized complete hypotheses that survived the beam."""
    n_words = len(word_spans(source))
    options = build_options(source, table, max_span)
    by_start: dict[int, list[TranslationOption]] = {}
    for opt in options:
        by_start.setdefault(opt.start, []).append(opt)
    future = _future_costs(options, n_words, weights, lm_m)
    rest_memo: dict[int, float] = {}

    initial = Hypothesis(
        coverage=0, n_covered=0, last_end=0,
        state=initial_twin_state(lm_m, lm_w),
        features={}, score=0.0, parent=None, option=None,
    )
    stacks: list[list[Hypothesis]] = [[] for _ in range(n_words + 1)]
    stacks[0].append(initial)

    for level in range(n_words):
        stack = stacks[level]
        if beam_size is not None and len(stack) > beam_size:
            stack.sort(
                key=lambda h: h.score + _rest(h.coverage, n_words, future, rest_memo),
                reverse=True,
            )
            del stack[beam_size:]
        for hyp in stack:
            first_free = _first_uncovered(hyp.coverage, n_words)
            for start in range(first_free, min(first_free + distortion_limit, n_words - 1) + 1):
                if hyp.coverage >> start & 1:
                    continue
                for opt in by_start.get(start, ()):
                    if opt.mask & hyp.coverage:
                        continue
                    stacks[level + opt.end - opt.start].append(_extend(hyp, opt, lm_m, lm_w, weights))

    complete = stacks[n_words]
    if beam_size is not None and len(complete) > beam_size:
        complete.sort(key=lambda h: h.score, reverse=True)
        del complete[beam_size:]
    return [_finalize(h, lm_m, lm_w, weights) for h in complete]


def _first_uncovered(coverage: int, n_words: int) -> int:
    for i in range(n_words):
        if not (coverage >> i & 1):
            return i
    return n_words


def _extend(
    hyp: Hypothesis,
    opt: TranslationOption,
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
    weights: Mapping[str, float],
) -> Hypothesis:
    state, morph_delta, word_delta = twin_extend(hyp.state, opt.target, lm_m, lm_w)
    feats = dict(hyp.features)
    for k, v in opt.tm_features:
        feats[k] = feats.get(k, 0.0) + v
    if lm_m is not None:
        feats["lm_morph"] = feats.get("lm_morph", 0.0) + morph_delta
    if lm_w is not None:
        feats["lm_word"] = feats.get("lm_word", 0.0) + word_delta
    feats["word_penalty"] = feats.get("word_penalty", 0.0) + opt.n_words
    jump = abs(opt.start - hyp.last_end)
    if jump:
        feats["distortion"] = feats.get("distortion", 0.0) + jump
    return Hypothesis(
        coverage=hyp.coverage | opt.mask,
        n_covered=hyp.n_covered + (opt.end - opt.start),
        last_end=opt.end,
        state=state,
        features=feats,
        score=dot(weights, feats),
        parent=hyp,
        option=opt,
    )


def _finalize(
    hyp: Hypothesis,
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
    weights: Mapping[str, float],
) -> Hypothesis:
    morph_delta, word_delta = twin_finalize(hyp.state, lm_m, lm_w)
    feats = dict(hyp.features)
    if lm_m is not None:
        feats["lm_morph"] = feats.get("lm_morph", 0.0) + morph_delta
    if lm_w is not None:
        feats["lm_word"] = feats.get("lm_word", 0.0) + word_delta
    if hyp.state.pending:  # flushed tail counts as a completed word
        feats["word_penalty"] = feats.get("word_penalty", 0.0) + 1
    return Hypothesis(
        coverage=hyp.coverage, n_covered=hyp.n_covered, last_end=hyp.last_end,
        state=hyp.state, features=feats, score=dot(weights, feats),
        parent=hyp.parent, option=hyp.option,
    )


def target_tokens(hyp: Hypothesis) -> tuple[str, ...]:
    parts: list[tuple[str, ...]] = []
    node: Optional[Hypothesis] = hyp
    while node is not None:
        if node.option is not None:
            parts.append(node.option.target)
        node = node.parent
    out: list[str] = []
    for part in reversed(parts):
        out.extend(part)
    return tuple(out)


def trace(hyp: Hypothesis, source: MorphSentence) -> list[tuple[int, int, tuple[str, ...], tuple[str, ...]]]:
    """(src word start, end exclusive, src words, out words) per applied phrase."""
    from .morpho import to_words

    src_words = to_words(source)
    items = []
    node: Optional[Hypothesis] = hyp
    while node is not None:
        if node.option is not None:
            o = node.option
            items.append((
                o.start, o.end,
                tuple(src_words[o.start : o.end]),
                tuple(words_from_tokens(o.target)),
            ))
        node = node.parent
    items.reverse()
    return items


def decode(
    source: MorphSentence,
    table: PhraseTable,
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
    weights: Mapping[str, float],
    beam_size: Optional[int] = 100,
    distortion_limit: int = 6,
    max_span: Optional[int] = None,
) -> Hypothesis:
    """Highest-scoring complete hypothesis (ties broken by target string)."""
    complete = search(source, table, lm_m, lm_w, weights, beam_size,
                      distortion_limit, max_span)
    return max(complete, key=lambda h: (h.score, target_tokens(h)))


@dataclass(frozen=True)
class NBestEntry:
    tokens: tuple[str, ...]
    features: dict[str, float]
    score: float


def nbest(
    source: MorphSentence,
    table: PhraseTable,
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
    weights: Mapping[str, float],
    beam_size: Optional[int] = 100,
    distortion_limit: int = 6,
    n: int = 100,
    max_span: Optional[int] = None,
) -> list[NBestEntry]:
    """Top-n distinct target token strings by score, descending."""
    complete = search(source, table, lm_m, lm_w, weights, beam_size,
                      distortion_limit, max_span)
    best: dict[tuple[str, ...], Hypothesis] = {}
    for hyp in complete:
        key = target_tokens(hyp)
        old = best.get(key)
        if old is None or hyp.score > old.score:
            best[key] = hyp
    ranked = sorted(best.items(), key=lambda kv: (-kv[1].score, kv[0]))
    return [
        NBestEntry(tokens, dict(sorted(hyp.features.items())), hyp.score)
        for tokens, hyp in ranked[:n]
    ]


# --- n-best file format: sent_id ||| tokens ||| name=value ... ||| score -----


def write_nbest(path, lists: Sequence[Sequence[NBestEntry]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sent_id, entries in enumerate(lists):
            for e in entries:
                feats = " ".join(f"{k}={v!r}" for k, v in sorted(e.features.items()))
                fh.write(f"{sent_id} ||| {' '.join(e.tokens)} ||| {feats} ||| {e.score!r}\n")


def read_nbest(path) -> list[list[NBestEntry]]:
    lists: list[list[NBestEntry]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            sent_id_s, tokens_s, feats_s, score_s = [p.strip() for p in line.split("|||")]
            sent_id = int(sent_id_s)
            while len(lists) <= sent_id:
                lists.append([])
            feats = {}
            for piece in feats_s.split():
                name, value = piece.split("=")
                feats[name] = float(value)
            lists[sent_id].append(
                NBestEntry(tuple(tokens_s.split()), feats, float(score_s))
            )
    return lists


# --- weights file: name<TAB>value ---------------------------------------------


def write_weights(path, weights: Mapping[str, float]) -> None:
    order = {name: i for i, name in enumerate(FEATURE_ORDER)}
    with open(path, "w", encoding="utf-8") as fh:
        for name in sorted(weights, key=lambda n: order.get(n, len(order))):
            fh.write(f"{name}\t{weights[name]!r}\n")


def read_weights(path) -> dict[str, float]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            name, value = line.rstrip("\n").split("\t")
            out[name] = float(value)
    return out
