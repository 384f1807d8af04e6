"""Backoff n-gram language models and the twin morpheme/word scorer.

Models are stored ARPA-style: one table per order mapping the n-gram to its
(natural-log) conditional probability, plus log backoff weights per context.
Witten-Bell and Kneser-Ney are built in interpolated form, which makes every
context distribution sum to exactly 1 over vocabulary + <unk> + </s>.

The twin scorer walks a morpheme-token hypothesis once and produces two score
streams: the morpheme LM sees every token, the word LM sees each word the
moment its final morpheme arrives (surfaces concatenated, tags and "+"
stripped).  Carrying the pending-morphemes buffer in the state makes the
scoring invariant to how the decoder chunks its extensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence, Union

from .morpho import MorphToken, split_token_string

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

NEG_INF = float("-inf")

Smoothing = Literal["mle", "witten-bell", "kneser-ney"]

# absolute discount for Kneser-Ney; counts are always >= 1 so mass stays positive
KN_DISCOUNT = 0.75


@dataclass
class NGramModel:
    order: int
    smoothing: Smoothing
    vocab: frozenset[str]  # predicted events, </s> included
    logprobs: list[dict[tuple[str, ...], float]]  # index k-1: k-gram -> ln p
    backoffs: list[dict[tuple[str, ...], float]]  # index k-1: context -> ln bow

    def logprob(self, token: str, context: Sequence[str] = ()) -> float:
        """ln p(token | context); context is truncated to the last order-1 tokens."""
        w = token if token in self.vocab else UNK
        ctx = tuple(
            c if (c in self.vocab or c == BOS) else UNK
            for c in context[max(0, len(context) - (self.order - 1)):]
        )
        return self._query(ctx + (w,))

    def _query(self, gram: tuple[str, ...]) -> float:
        k = len(gram)
        val = self.logprobs[k - 1].get(gram)
        if val is not None:
            return val
        if k == 1:
            return NEG_INF
        if self.smoothing == "mle":
            return NEG_INF  # no backoff mass under plain ML estimation
        bow = self.backoffs[k - 2].get(gram[:-1], 0.0)
        return bow + self._query(gram[1:])

    def prob(self, token: str, context: Sequence[str] = ()) -> float:
        return math.exp(self.logprob(token, context))


def _collect_counts(
    corpus: Iterable[Sequence[str]], order: int
) -> list[dict[tuple[str, ...], int]]:
    """Raw k-gram counts for k=1..order from <s>-padded sentences + </s>."""
    counts: list[dict[tuple[str, ...], int]] = [dict() for _ in range(order)]
    for sentence in corpus:
        padded = (BOS,) * (order - 1) + tuple(sentence) + (EOS,)
        n_events = len(sentence) + 1
        for t in range(order - 1, order - 1 + n_events):
            for k in range(1, order + 1):
                gram = padded[t - k + 1 : t + 1]
                counts[k - 1][gram] = counts[k - 1].get(gram, 0) + 1
    return counts


def _context_totals(table: dict[tuple[str, ...], int]):
    totals: dict[tuple[str, ...], int] = {}
    types: dict[tuple[str, ...], int] = {}
    for gram, c in table.items():
        ctx = gram[:-1]
        totals[ctx] = totals.get(ctx, 0) + c
        types[ctx] = types.get(ctx, 0) + 1
    return totals, types


def train_lm(
    corpus: Iterable[Sequence[str]],
    order: int,
    smoothing: Smoothing = "witten-bell",
) -> NGramModel:
    """Train a backoff n-gram model over token sequences."""
    if order < 1:
        raise ValueError("order must be >= 1")
    sentences = [tuple(s) for s in corpus]
    if not sentences:
        raise ValueError("cannot train on an empty corpus")
    counts = _collect_counts(sentences, order)
    vocab = frozenset(w for (w,) in counts[0] if w != BOS) | {EOS}

    if smoothing == "mle":
        logprobs = []
        for k in range(1, order + 1):
            totals, _ = _context_totals(counts[k - 1])
            logprobs.append(
                {g: math.log(c / totals[g[:-1]]) for g, c in counts[k - 1].items()}
            )
        return NGramModel(order, smoothing, vocab, logprobs, [{} for _ in range(order)])

    if smoothing == "witten-bell":
        return _train_witten_bell(order, counts, vocab)
    if smoothing == "kneser-ney":
        return _train_kneser_ney(order, counts, vocab)
    raise ValueError(f"unknown smoothing: {smoothing}")


def _train_witten_bell(order, counts, vocab) -> NGramModel:
    # interpolated Witten-Bell, stored in backoff form; the novel-event mass
    # T/(c+T) at each context is exactly the ARPA backoff weight
    probs: list[dict[tuple[str, ...], float]] = []
    n_events = sum(counts[0].values())
    n_types = len(counts[0])
    denom = n_events + n_types
    level = {g: c / denom for g, c in counts[0].items()}
    level[(UNK,)] = n_types / denom
    probs.append(level)
    backoffs: list[dict[tuple[str, ...], float]] = []

    for k in range(2, order + 1):
        totals, types = _context_totals(counts[k - 1])
        level = {}
        bows = {}
        for gram, c in counts[k - 1].items():
            ctx = gram[:-1]
            t = types[ctx]
            lower = _interp_lookup(probs, gram[1:])
            level[gram] = (c + t * lower) / (totals[ctx] + t)
        for ctx in totals:
            bows[ctx] = types[ctx] / (totals[ctx] + types[ctx])
        probs.append(level)
        backoffs.append(bows)

    return _finish(order, "witten-bell", vocab, probs, backoffs)


def _train_kneser_ney(order, counts, vocab) -> NGramModel:
    # interpolated KN with fixed absolute discount; orders below the top use
    # continuation counts (distinct one-token left extensions)
    d = KN_DISCOUNT
    level_counts: list[dict[tuple[str, ...], int]] = [dict() for _ in range(order)]
    level_counts[order - 1] = dict(counts[order - 1])
    for k in range(order - 1, 0, -1):
        cont: dict[tuple[str, ...], int] = {}
        for gram in counts[k]:  # (k+1)-grams
            suffix = gram[1:]
            cont[suffix] = cont.get(suffix, 0) + 1
        level_counts[k - 1] = cont

    uni = level_counts[0]
    if not uni:  # order-1 model: no continuation counts exist, use raw
        uni = dict(counts[0])
    total = sum(uni.values())
    n_types = len(uni)
    # the discounted mass d*n_types is split evenly over vocab + unk, which
    # keeps every context distribution summing to exactly 1
    share = d * n_types / (n_types + 1) / total
    level = {g: max(c - d, 0.0) / total + share for g, c in uni.items()}
    level[(UNK,)] = share
    probs = [level]
    backoffs: list[dict[tuple[str, ...], float]] = []

    for k in range(2, order + 1):
        table = level_counts[k - 1]
        totals, types = _context_totals(table)
        lvl = {}
        bows = {}
        for gram, c in table.items():
            ctx = gram[:-1]
            lower = _interp_lookup(probs, gram[1:])
            lvl[gram] = (max(c - d, 0.0) + d * types[ctx] * lower) / totals[ctx]
        for ctx in totals:
            bows[ctx] = d * types[ctx] / totals[ctx]
        probs.append(lvl)
        backoffs.append(bows)

    return _finish(order, "kneser-ney", vocab, probs, backoffs)


def _interp_lookup(prob_levels, gram):
    """Probability of a lower-order gram during training (already interpolated)."""
    for k in range(len(gram), 0, -1):
        sub = gram[len(gram) - k :]
        val = prob_levels[k - 1].get(sub)
        if val is not None:
            return val
    return prob_levels[0][(UNK,)]


def _finish(order, smoothing, vocab, prob_levels, backoff_levels) -> NGramModel:
    logprobs = [
        {g: math.log(p) for g, p in level.items()} for level in prob_levels
    ]
    logbows = [
        {ctx: math.log(b) for ctx, b in level.items() if b > 0.0}
        for level in backoff_levels
    ]
    logbows.append({})  # the top order has no outgoing backoff
    return NGramModel(order, smoothing, vocab, logprobs, logbows)


def sentence_logprob(model: NGramModel, tokens: Sequence[str]) -> float:
    """ln p(tokens </s>) with <s> padding, the offline whole-sentence score."""
    ctx = (BOS,) * (model.order - 1)
    total = 0.0
    for tok in tokens:
        total += model.logprob(tok, ctx)
        ctx = _roll(ctx, tok if tok in model.vocab else UNK, model.order)
    return total + model.logprob(EOS, ctx)


def _roll(ctx: tuple[str, ...], event: str, order: int) -> tuple[str, ...]:
    if order <= 1:
        return ()
    return (ctx + (event,))[-(order - 1):]


# ---------------------------------------------------------------------------
# Twin scoring state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwinScorerState:
    morph_ctx: tuple[str, ...]
    pending: tuple[str, ...]  # surfaces of the in-progress word
    word_ctx: tuple[str, ...]


def initial_twin_state(
    lm_m: Optional[NGramModel], lm_w: Optional[NGramModel]
) -> TwinScorerState:
    morph_ctx = (BOS,) * (lm_m.order - 1) if lm_m else ()
    word_ctx = (BOS,) * (lm_w.order - 1) if lm_w else ()
    return TwinScorerState(morph_ctx, (), word_ctx)


TokenLike = Union[str, MorphToken]


def twin_extend(
    state: TwinScorerState,
    morphemes: Sequence[TokenLike],
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
) -> tuple[TwinScorerState, float, float]:
    """Score one phrase application under both views.

    Returns (new state, morpheme-LM delta, word-LM delta).  The word LM only
    sees words completed within this extension; an unfinished word stays in
    the pending buffer.
    """
    morph_ctx, pending, word_ctx = state.morph_ctx, list(state.pending), state.word_ctx
    morph_delta = 0.0
    word_delta = 0.0
    for m in morphemes:
        tok = m.serialize() if isinstance(m, MorphToken) else m
        if lm_m is not None:
            morph_delta += lm_m.logprob(tok, morph_ctx)
            morph_ctx = _roll(
                morph_ctx, tok if tok in lm_m.vocab else UNK, lm_m.order
            )
        surface, final = split_token_string(tok)
        pending.append(surface)
        if final:
            word = "".join(pending)
            pending = []
            if lm_w is not None:
                word_delta += lm_w.logprob(word, word_ctx)
                word_ctx = _roll(
                    word_ctx, word if word in lm_w.vocab else UNK, lm_w.order
                )
    return TwinScorerState(morph_ctx, tuple(pending), word_ctx), morph_delta, word_delta


def twin_finalize(
    state: TwinScorerState,
    lm_m: Optional[NGramModel],
    lm_w: Optional[NGramModel],
) -> tuple[float, float]:
    """End-of-sentence deltas; a non-empty pending buffer is flushed as a word first."""
    morph_delta = 0.0
    word_delta = 0.0
    word_ctx = state.word_ctx
    if state.pending and lm_w is not None:
        word = "".join(state.pending)
        word_delta += lm_w.logprob(word, word_ctx)
        word_ctx = _roll(word_ctx, word if word in lm_w.vocab else UNK, lm_w.order)
    if lm_m is not None:
        morph_delta += lm_m.logprob(EOS, state.morph_ctx)
    if lm_w is not None:
        word_delta += lm_w.logprob(EOS, word_ctx)
    return morph_delta, word_delta


# --- ARPA-style persistence -------------------------------------------------

_LN10 = math.log(10.0)
_ARPA_NEG_INF = -99.0  # conventional stand-in for ln p = -inf


def write_arpa(path, model: NGramModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"smoothing: {model.smoothing}\n\n")  # ARPA readers skip the preamble
        fh.write("\\data\\\n")
        for k in range(1, model.order + 1):
            bows = model.backoffs[k - 1] if k < model.order else {}
            fh.write(f"ngram {k}={len(set(model.logprobs[k - 1]) | set(bows))}\n")
        fh.write("\n")
        for k in range(1, model.order + 1):
            fh.write(f"\\{k}-grams:\n")
            bows = model.backoffs[k - 1] if k < model.order else {}
            # contexts that are never events (pure <s> prefixes) still need
            # their backoff weight carried; SRILM writes them as -99 lines
            grams = sorted(set(model.logprobs[k - 1]) | set(bows))
            for gram in grams:
                lp = model.logprobs[k - 1].get(gram, NEG_INF)
                lp10 = _ARPA_NEG_INF if lp == NEG_INF else lp / _LN10
                line = f"{lp10!r}\t{' '.join(gram)}"
                bow = bows.get(gram)
                if bow is not None:
                    line += f"\t{bow / _LN10!r}"
                fh.write(line + "\n")
            fh.write("\n")
        fh.write("\\end\\\n")


def read_arpa(path) -> NGramModel:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    smoothing: Smoothing = "witten-bell"
    start = lines.index("\\data\\")
    for line in lines[:start]:
        if line.startswith("smoothing:"):
            smoothing = line.split(":", 1)[1].strip()  # type: ignore[assignment]
    sizes: dict[int, int] = {}
    i = start + 1
    while lines[i].strip():
        name, n = lines[i].split("=")
        sizes[int(name.split()[1])] = int(n)
        i += 1
    order = max(sizes)
    logprobs: list[dict[tuple[str, ...], float]] = [dict() for _ in range(order)]
    backoffs: list[dict[tuple[str, ...], float]] = [dict() for _ in range(order)]
    k = 0
    for line in lines[i:]:
        line = line.strip()
        if not line:
            continue
        if line == "\\end\\":
            k = 0
            continue
        if line.endswith("-grams:"):
            k = int(line[1:].split("-")[0])
            continue
        parts = line.split("\t")
        lp10 = float(parts[0])
        gram = tuple(parts[1].split())
        if lp10 != _ARPA_NEG_INF:  # -99 lines are pure backoff carriers
            logprobs[k - 1][gram] = lp10 * _LN10
        if len(parts) > 2:
            backoffs[k - 1][gram] = float(parts[2]) * _LN10
    vocab = frozenset(w for (w,) in logprobs[0] if w not in (BOS, UNK))
    return NGramModel(order, smoothing, vocab, logprobs, backoffs)
