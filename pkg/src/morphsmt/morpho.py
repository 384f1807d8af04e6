"""Tagged morpheme representation: parsing, word boundaries, round-tripping.

A segmented sentence is a stream of ``surface/TAG`` tokens where TAG is one
of PRE, STM, SUF and a trailing ``+`` marks word-internal morphemes.  Word
boundaries fall after every token without ``+``; every other module gets its
notion of "word" from here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class MorphTag(Enum):
    PRE = "PRE"
    STM = "STM"
    SUF = "SUF"


class MorphParseError(ValueError):
    """Malformed segmented input (bad token shape, unknown tag, dangling +)."""

    def __init__(self, message: str, token_index: int):
        super().__init__(f"token {token_index}: {message}")
        self.token_index = token_index


@dataclass(frozen=True)
class MorphToken:
    """One morpheme with its tag and word-internal continuation flag.

    Token identity is (surface, tag, continues): ``care/STM+`` and
    ``care/STM`` are different tokens everywhere downstream.
    """

    surface: str
    tag: MorphTag
    continues: bool

    def __post_init__(self):
        if not self.surface or any(c.isspace() for c in self.surface):
            raise ValueError(f"bad morph surface: {self.surface!r}")

    def serialize(self) -> str:
        return f"{self.surface}/{self.tag.value}{'+' if self.continues else ''}"


@dataclass(frozen=True)
class WordSpan:
    """Inclusive token-index range [start, end] forming one word."""

    start: int
    end: int


@dataclass(frozen=True)
class MorphSentence:
    tokens: tuple[MorphToken, ...]

    def __post_init__(self):
        if self.tokens and self.tokens[-1].continues:
            raise ValueError("sentence ends on a word-internal morpheme")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def serialize(self) -> str:
        return " ".join(t.serialize() for t in self.tokens)


_TOKEN_RE = re.compile(r"^(?P<surface>\S+)/(?P<tag>PRE|STM|SUF)(?P<plus>\+?)$")


def parse_token(text: str, index: int = 0) -> MorphToken:
    # greedy surface group claims any "/" inside the surface itself
    m = _TOKEN_RE.match(text)
    if m is None:
        raise MorphParseError(f"not of form surface/TAG[+]: {text!r}", index)
    return MorphToken(m.group("surface"), MorphTag(m.group("tag")), m.group("plus") == "+")


def parse_segmented_line(line: str) -> MorphSentence:
    """Parse one whitespace-separated segmented line into a MorphSentence.

    Raises MorphParseError on malformed tokens, and when the final token
    carries "+" (a dangling continuation is an upstream segmenter bug, not
    something to repair silently).
    """
    pieces = line.split()
    tokens = [parse_token(p, i) for i, p in enumerate(pieces)]
    if tokens and tokens[-1].continues:
        raise MorphParseError(
            f"dangling continuation at end of sentence: {pieces[-1]!r}",
            len(tokens) - 1,
        )
    return MorphSentence(tuple(tokens))


def word_spans(sentence: MorphSentence) -> list[WordSpan]:
    """Spans partitioning the token range into words, in order."""
    spans = []
    start = 0
    for i, tok in enumerate(sentence.tokens):
        if not tok.continues:
            spans.append(WordSpan(start, i))
            start = i + 1
    return spans


def to_words(sentence: MorphSentence) -> list[str]:
    """Concatenate surfaces within each word span."""
    words = []
    parts: list[str] = []
    for tok in sentence.tokens:
        parts.append(tok.surface)
        if not tok.continues:
            words.append("".join(parts))
            parts = []
    return words


def validate_morphotactics(sentence: MorphSentence) -> bool:
    """True iff every word's tag sequence matches (PRE* STM SUF*)+."""
    for span in word_spans(sentence):
        letters = "".join(
            {"PRE": "P", "STM": "S", "SUF": "F"}[t.tag.value]
            for t in sentence.tokens[span.start : span.end + 1]
        )
        if not re.fullmatch(r"(P*SF*)+", letters):
            return False
    return True


DEFAULT_STUB_SUFFIXES = ("ing", "ed", "s")


def stub_segment(
    word: str, suffixes: Sequence[str] = DEFAULT_STUB_SUFFIXES
) -> list[MorphToken]:
    """Deterministic test segmenter: strip at most one known suffix.

    Longest suffix wins; a word never loses its stem, so a pure-suffix word
    comes back as a bare STM.  No linguistic fidelity intended.
    """
    if not word or any(c.isspace() for c in word):
        raise ValueError(f"bad word: {word!r}")
    for suf in sorted(suffixes, key=lambda s: (-len(s), s)):
        if suf and word.endswith(suf) and len(word) > len(suf):
            stem = word[: -len(suf)]
            return [
                MorphToken(stem, MorphTag.STM, True),
                MorphToken(suf, MorphTag.SUF, False),
            ]
    return [MorphToken(word, MorphTag.STM, False)]


def segment_words(
    words: Iterable[str], suffixes: Sequence[str] = DEFAULT_STUB_SUFFIXES
) -> MorphSentence:
    tokens: list[MorphToken] = []
    for w in words:
        tokens.extend(stub_segment(w, suffixes))
    return MorphSentence(tuple(tokens))


# ---------------------------------------------------------------------------
# String-level helpers.  Downstream modules (alignment, tables, LMs, decoder)
# treat tokens as opaque strings; these recover word structure leniently so
# that plain word tokens and OOV pass-through text survive unharmed.
# ---------------------------------------------------------------------------


def token_strings(sentence: MorphSentence) -> tuple[str, ...]:
    return tuple(t.serialize() for t in sentence.tokens)


def split_token_string(token: str) -> tuple[str, bool]:
    """(surface, is word-final) for a serialized token; plain words pass through."""
    m = _TOKEN_RE.match(token)
    if m is None:
        return token, True
    return m.group("surface"), m.group("plus") != "+"


def words_from_tokens(tokens: Iterable[str]) -> list[str]:
    """Word view of a token-string sequence; a trailing open word is flushed."""
    words = []
    parts: list[str] = []
    for tok in tokens:
        surface, final = split_token_string(tok)
        parts.append(surface)
        if final:
            words.append("".join(parts))
            parts = []
    if parts:
        words.append("".join(parts))
    return words


def word_spans_of_tokens(tokens: Sequence[str]) -> list[tuple[int, int]]:
    """Inclusive (start, end) token-index spans of the words in a string sequence.

    A trailing open word (last token still word-internal) counts as a word.
    """
    spans = []
    start = 0
    for i, tok in enumerate(tokens):
        _, final = split_token_string(tok)
        if final:
            spans.append((start, i))
            start = i + 1
    if start < len(tokens):
        spans.append((start, len(tokens) - 1))
    return spans


def read_segmented_file(path) -> list[MorphSentence]:
    with open(path, encoding="utf-8") as fh:
        return [parse_segmented_line(line) for line in fh if line.strip()]


def read_word_file(path) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh if line.strip()]


def write_sentences(path, sentences: Iterable[MorphSentence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(s.serialize() + "\n")


def write_word_lines(path, lines: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for words in lines:
            fh.write(" ".join(words) + "\n")
