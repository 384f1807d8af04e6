"""Minimum error rate training: iterated n-best decoding + exact line search.

The decoder produces morpheme-token candidates; every candidate is converted
to words before its BLEU sufficient statistics are computed, so the metric
being optimized is word-token BLEU (brevity penalty in words, not morphemes).
Line search sweeps the exact piecewise-constant corpus-BLEU envelope along a
direction and lands in the middle of the best interval, preferring the step
closest to zero on ties.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .decoder import FEATURE_ORDER, NBestEntry, dot
from .metrics import add_stats, bleu_from_stats, bleu_stats, zero_stats
from .morpho import words_from_tokens

INF = math.inf


@dataclass(frozen=True)
class Candidate:
    words: tuple[str, ...]
    features: dict[str, float]
    stats: tuple[int, ...]  # word-level BLEU sufficient statistics vs the ref


@dataclass
class MertState:
    weights: dict[str, float]
    pool: list[dict]  # per dev sentence: dedup key -> Candidate
    iteration: int = 0
    history: list[float] = field(default_factory=list)  # pooled dev BLEU per iteration
    best_bleu: float = -1.0
    best_weights: dict[str, float] = field(default_factory=dict)

    def pool_lists(self) -> list[list[Candidate]]:
        return [[p[k] for k in sorted(p)] for p in self.pool]


def _as_candidate(entry, ref: Sequence[str]) -> tuple[tuple, Candidate]:
    if isinstance(entry, NBestEntry):
        tokens, feats = entry.tokens, entry.features
    else:
        tokens, feats = entry
    words = tuple(words_from_tokens(tokens))
    key = (words, tuple(sorted(feats.items())))
    return key, Candidate(words, dict(feats), bleu_stats(words, ref))


def _ensure_candidates(
    pool: Sequence[Sequence], refs: Optional[Sequence[Sequence[str]]]
) -> list[list[Candidate]]:
    out = []
    for s, cands in enumerate(pool):
        row = []
        for c in cands:
            if isinstance(c, Candidate):
                row.append(c)
            else:
                if refs is None:
                    raise ValueError("refs required when candidates carry no stats")
                row.append(_as_candidate(c, refs[s])[1])
        out.append(row)
    return out


def line_search(
    pool: Sequence[Sequence],
    refs: Optional[Sequence[Sequence[str]]],
    weights: Mapping[str, float],
    direction: Mapping[str, float],
) -> tuple[float, float]:
    """Best step along ``weights + step * direction`` by exact envelope sweep.

    Returns (step, corpus BLEU at that step).  Candidate selection per
    sentence is the upper envelope of score(c) = dot(w,f) + step*dot(d,f).
    """
    cand_lists = _ensure_candidates(pool, refs)
    events: list[tuple[float, int, Candidate, Candidate]] = []
    stats = zero_stats()
    for s, cands in enumerate(cand_lists):
        if not cands:
            continue
        hull = _upper_envelope(
            [(dot(direction, c.features), dot(weights, c.features), c) for c in cands]
        )
        stats = add_stats(stats, hull[0][1].stats)
        for (_, prev_c), (x, c) in zip(hull, hull[1:]):
            events.append((x, s, prev_c, c))
    events.sort(key=lambda e: e[0])

    best: Optional[tuple[float, float]] = None  # (bleu, step)
    left = -INF
    idx = 0
    while True:
        right = events[idx][0] if idx < len(events) else INF
        score = bleu_from_stats(stats).score
        step = _representative(left, right)
        if best is None or score > best[0] + 1e-12 or (
            abs(score - best[0]) <= 1e-12 and abs(step) < abs(best[1])
        ):
            best = (score, step)
        if idx >= len(events):
            break
        x = events[idx][0]
        while idx < len(events) and events[idx][0] == x:
            _, _, prev_c, new_c = events[idx]
            stats = tuple(
                v - p + n for v, p, n in zip(stats, prev_c.stats, new_c.stats)
            )
            idx += 1
        left = x
    return best[1], best[0]


def _representative(left: float, right: float) -> float:
    if left < 0.0 < right:
        return 0.0
    if left == -INF:
        return right - 1.0
    if right == INF:
        return left + 1.0
    return (left + right) / 2.0


def _upper_envelope(
    lines: list[tuple[float, float, Candidate]]
) -> list[tuple[float, Candidate]]:
    """[(x_from, winning candidate)] for max of a + b*x, left to right."""
    lines.sort(key=lambda l: (l[0], l[1]))
    dedup: list[tuple[float, float, Candidate]] = []
    for b, a, c in lines:
        if dedup and dedup[-1][0] == b:
            if a > dedup[-1][1]:
                dedup[-1] = (b, a, c)
        else:
            dedup.append((b, a, c))
    hull: list[tuple[float, float, float, Candidate]] = []  # (x_from, b, a, cand)
    for b, a, c in dedup:
        while hull:
            x_from, b0, a0, _ = hull[-1]
            x = (a0 - a) / (b - b0)
            if x <= x_from:
                hull.pop()
            else:
                break
        hull.append((x if hull else -INF, b, a, c))
    return [(x_from, c) for x_from, _, _, c in hull]


def select_bleu(
    pool_lists: Sequence[Sequence[Candidate]], weights: Mapping[str, float]
) -> float:
    """Corpus BLEU of the per-sentence argmax selection under the weights."""
    total = zero_stats()
    for cands in pool_lists:
        if not cands:
            continue
        best = max(cands, key=lambda c: dot(weights, c.features))
        total = add_stats(total, best.stats)
    return bleu_from_stats(total).score


DecoderHandle = Callable[[Mapping[str, float]], Sequence[Sequence]]


def mert_run(
    dev_refs: Sequence[Sequence[str]],
    initial_weights: Mapping[str, float],
    decoder_handle: DecoderHandle,
    max_iters: int = 10,
    epsilon: float = 1e-4,
    seed: int = 0,
    n_random_directions: int = 1,
    max_passes: int = 8,
) -> MertState:
    """Full MERT loop; the returned state carries the argmax-BLEU weights."""
    if not dev_refs:
        raise ValueError("empty dev set")
    state = MertState(
        weights=dict(initial_weights),
        pool=[dict() for _ in dev_refs],
        best_weights=dict(initial_weights),
    )
    rng = random.Random(seed)
    names = sorted(initial_weights, key=lambda n: _feature_rank(n))

    for iteration in range(max_iters):
        state.iteration = iteration
        nbests = decoder_handle(state.weights)
        for s, entries in enumerate(nbests):
            for entry in entries:
                key, cand = _as_candidate(entry, dev_refs[s])
                state.pool[s].setdefault(key, cand)
        pool_lists = state.pool_lists()

        directions = [{n: 1.0} for n in names]
        for _ in range(n_random_directions):
            directions.append({n: rng.gauss(0.0, 1.0) for n in names})

        current = select_bleu(pool_lists, state.weights)
        for _ in range(max_passes):
            best_move = None
            for d in directions:
                step, score = line_search(pool_lists, None, state.weights, d)
                if score > current + 1e-12 and (
                    best_move is None or score > best_move[0]
                ):
                    best_move = (score, step, d)
            if best_move is None:
                break
            score, step, d = best_move
            for n, v in d.items():
                state.weights[n] = state.weights.get(n, 0.0) + step * v
            current = score

        state.history.append(current)
        if current > state.best_bleu:
            state.best_bleu = current
            state.best_weights = dict(state.weights)
        if iteration > 0 and state.history[-1] - state.history[-2] < epsilon:
            break
    return state


def mert(
    dev_refs: Sequence[Sequence[str]],
    initial_weights: Mapping[str, float],
    decoder_handle: DecoderHandle,
    max_iters: int = 10,
    epsilon: float = 1e-4,
    seed: int = 0,
    n_random_directions: int = 1,
) -> dict[str, float]:
    """Tuned weights: the argmax-BLEU point over all iterations."""
    return mert_run(
        dev_refs, initial_weights, decoder_handle,
        max_iters, epsilon, seed, n_random_directions,
    ).best_weights


def _feature_rank(name: str) -> int:
    try:
        return FEATURE_ORDER.index(name)
    except ValueError:
        return len(FEATURE_ORDER)


def write_mert_log(path, state: MertState) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, b in enumerate(state.history):
            fh.write(f"iteration {i}\tdev_bleu {b:.6f}\n")
        fh.write(f"best\tdev_bleu {state.best_bleu:.6f}\n")
