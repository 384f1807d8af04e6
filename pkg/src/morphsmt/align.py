"""Token-level alignment: IBM Model 1 EM training, Viterbi links, symmetrization.

Works on opaque token strings at either granularity.  The NULL source token is
the ``None`` key in the lexical table; a target whose best source is NULL gets
no link at all.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional, Sequence

Granularity = Literal["word", "morpheme"]

# fallback translation probability for pairs absent from a trained table;
# keeps Viterbi total and lexical weighting finite on held-out data
FLOOR_PROB = 1e-9


@dataclass
class ParallelCorpus:
    pairs: list[tuple[tuple[str, ...], tuple[str, ...]]]
    granularity: Granularity = "word"
    dropped: int = 0  # empty-side pairs removed at load

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_sentences(
        cls,
        source: Iterable[Sequence[str]],
        target: Iterable[Sequence[str]],
        granularity: Granularity = "word",
    ) -> "ParallelCorpus":
        pairs = []
        dropped = 0
        for src, tgt in zip(source, target, strict=True):
            if not src or not tgt:
                dropped += 1
                continue
            pairs.append((tuple(src), tuple(tgt)))
        return cls(pairs, granularity, dropped)

    def concat(self, other: "ParallelCorpus") -> "ParallelCorpus":
        """Corpus concatenation (e.g. appending a test set before aligning it)."""
        if other.granularity != self.granularity:
            raise ValueError("granularity mismatch in corpus concatenation")
        return ParallelCorpus(
            self.pairs + other.pairs, self.granularity, self.dropped + other.dropped
        )


@dataclass
class LexicalTable:
    """t(target | source) with source=None acting as the NULL token."""

    probs: dict[tuple[Optional[str], str], float] = field(default_factory=dict)
    granularity: Granularity = "word"

    def prob(self, target: str, source: Optional[str]) -> float:
        return self.probs.get((source, target), FLOOR_PROB)

    def source_sums(self) -> dict[Optional[str], float]:
        sums: dict[Optional[str], float] = defaultdict(float)
        for (src, _), p in self.probs.items():
            sums[src] += p
        return dict(sums)


@dataclass(frozen=True)
class AlignmentMatrix:
    links: frozenset[tuple[int, int]]
    source_len: int
    target_len: int

    def __post_init__(self):
        for i, j in self.links:
            if not (0 <= i < self.source_len and 0 <= j < self.target_len):
                raise ValueError(f"link ({i},{j}) out of bounds "
                                 f"{self.source_len}x{self.target_len}")

    def transpose(self) -> "AlignmentMatrix":
        return AlignmentMatrix(
            frozenset((j, i) for i, j in self.links), self.target_len, self.source_len
        )


def train_model1(
    corpus: ParallelCorpus,
    iterations: int = 5,
    initial: Optional[LexicalTable] = None,
) -> LexicalTable:
    """EM-train IBM Model 1 translation probabilities with a NULL source.

    Passing the returned table back as ``initial`` continues training exactly
    where it stopped, so k iterations twice equals 2k iterations once.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not corpus.pairs:
        raise ValueError("cannot train on an empty corpus")

    if initial is not None:
        t = dict(initial.probs)
    else:
        # uniform over each source token's observed targets
        cooc: dict[Optional[str], set[str]] = defaultdict(set)
        for src, tgt in corpus.pairs:
            for e in (None, *src):
                cooc[e].update(tgt)
        t = {}
        for src, tgt in corpus.pairs:
            for e in (None, *src):
                u = 1.0 / len(cooc[e])
                for f in tgt:
                    t[(e, f)] = u

    for _ in range(iterations):
        counts: dict[tuple[Optional[str], str], float] = defaultdict(float)
        totals: dict[Optional[str], float] = defaultdict(float)
        for src, tgt in corpus.pairs:
            sources = (None, *src)
            for f in tgt:
                denom = sum(t.get((e, f), FLOOR_PROB) for e in sources)
                for e in sources:
                    c = t.get((e, f), FLOOR_PROB) / denom
                    counts[(e, f)] += c
                    totals[e] += c
        t = {pair: c / totals[pair[0]] for pair, c in counts.items()}

    return LexicalTable(t, corpus.granularity)


def corpus_logprob(corpus: ParallelCorpus, table: LexicalTable) -> float:
    """Model 1 log-likelihood (uniform alignment prior dropped); EM never lowers it."""
    import math

    total = 0.0
    for src, tgt in corpus.pairs:
        sources = (None, *src)
        for f in tgt:
            total += math.log(sum(table.prob(f, e) for e in sources))
    return total


def viterbi_align(
    source: Sequence[str], target: Sequence[str], table: LexicalTable
) -> AlignmentMatrix:
    """Link each target token to its argmax source token.

    Ties between source tokens go to the smallest index.  A target stays
    unlinked when no source beats the unknown-pair floor (fully unseen
    token) or when NULL is strictly more probable than every source.
    """
    links = set()
    for j, f in enumerate(target):
        best_i, best_p = 0, -1.0
        for i, e in enumerate(source):
            p = table.prob(f, e)
            if p > best_p:
                best_i, best_p = i, p
        if best_p > FLOOR_PROB and table.prob(f, None) <= best_p:
            links.add((best_i, j))
    return AlignmentMatrix(frozenset(links), len(source), len(target))


_NEIGHBORS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))

Heuristic = Literal["intersection", "union", "grow-diag-final-and"]


def symmetrize(
    fwd: AlignmentMatrix, rev: AlignmentMatrix, heuristic: Heuristic
) -> AlignmentMatrix:
    """Combine source->target and target->source Viterbi alignments.

    ``rev`` is the raw reverse-direction matrix (its frame is target x source);
    it is transposed here.  grow-diag-final-and scans row-major, grows from
    the intersection through the 8-neighborhood within the union, then runs
    the final-and pass over each directed alignment.
    """
    if (fwd.source_len, fwd.target_len) != (rev.target_len, rev.source_len):
        raise ValueError("alignment dimension mismatch")
    rev_t = rev.transpose()
    inter = fwd.links & rev_t.links
    union = fwd.links | rev_t.links

    if heuristic == "intersection":
        links = inter
    elif heuristic == "union":
        links = union
    elif heuristic == "grow-diag-final-and":
        links = set(inter)
        aligned_src = {i for i, _ in links}
        aligned_tgt = {j for _, j in links}

        def grow(candidates: Iterable[tuple[int, int]], require_both: bool) -> bool:
            added = False
            for i, j in candidates:
                has_src, has_tgt = i in aligned_src, j in aligned_tgt
                free = (not has_src and not has_tgt) if require_both \
                    else (not has_src or not has_tgt)
                if free:
                    links.add((i, j))
                    aligned_src.add(i)
                    aligned_tgt.add(j)
                    added = True
            return added

        changed = True
        while changed:
            changed = False
            for i in range(fwd.source_len):
                for j in range(fwd.target_len):
                    if (i, j) not in links:
                        continue
                    cands = [(i + di, j + dj) for di, dj in _NEIGHBORS]
                    if grow((c for c in cands if c in union and c not in links),
                            require_both=False):
                        changed = True
        # final-and: only points whose source AND target are both uncovered
        grow(sorted(fwd.links - links), require_both=True)
        grow(sorted(rev_t.links - links), require_both=True)
        links = frozenset(links)
    else:
        raise ValueError(f"unknown heuristic: {heuristic}")

    return AlignmentMatrix(frozenset(links), fwd.source_len, fwd.target_len)


def align_corpus(
    corpus: ParallelCorpus,
    iterations: int = 5,
    heuristic: Heuristic = "grow-diag-final-and",
) -> tuple[list[AlignmentMatrix], LexicalTable, LexicalTable]:
    """Train both directions, Viterbi-align every pair, symmetrize.

    Returns (alignments, forward lexical table t(tgt|src), backward t(src|tgt)).
    """
    fwd_table = train_model1(corpus, iterations)
    rev_corpus = ParallelCorpus(
        [(tgt, src) for src, tgt in corpus.pairs], corpus.granularity
    )
    bwd_table = train_model1(rev_corpus, iterations)
    alignments = []
    for src, tgt in corpus.pairs:
        fwd = viterbi_align(src, tgt, fwd_table)
        rev = viterbi_align(tgt, src, bwd_table)
        alignments.append(symmetrize(fwd, rev, heuristic))
    return alignments, fwd_table, bwd_table


# --- lexical table format: src<TAB>tgt<TAB>prob, NULL source = empty field ---


def write_lexical_table(path, table: LexicalTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (src, tgt), p in sorted(
            table.probs.items(), key=lambda kv: (kv[0][0] or "", kv[0][1])
        ):
            fh.write(f"{src or ''}\t{tgt}\t{p!r}\n")


def read_lexical_table(path, granularity: Granularity = "word") -> LexicalTable:
    probs = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            src, tgt, p = line.rstrip("\n").split("\t")
            probs[(src or None, tgt)] = float(p)
    return LexicalTable(probs, granularity)


# --- Pharaoh alignment file format: one line per pair, space-separated i-j ---


def write_alignments(path, alignments: Iterable[AlignmentMatrix]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in alignments:
            fh.write(" ".join(f"{i}-{j}" for i, j in sorted(a.links)) + "\n")


def read_alignments(path, dimensions: Sequence[tuple[int, int]]) -> list[AlignmentMatrix]:
    """Read Pharaoh lines; dimensions supply (source_len, target_len) per line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) != len(dimensions):
        raise ValueError("alignment file length does not match corpus")
    for line, (slen, tlen) in zip(lines, dimensions):
        links = set()
        for piece in line.split():
            i, j = piece.split("-")
            links.add((int(i), int(j)))
        out.append(AlignmentMatrix(frozenset(links), slen, tlen))
    return out
